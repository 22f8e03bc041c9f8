// End-to-end orchestration: configuration, per-stage runners and artifacts.
#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "assertgen/error.hpp"
#include "assertgen/io.hpp"
#include "assertgen/llm_gateway.hpp"
#include "assertgen/mutation_lab.hpp"

namespace assertgen::pipeline {

struct RunConfig {
    std::filesystem::path base_dir; // directory of the config file; relative paths resolve here
    std::vector<std::string> spec_paths;
    std::vector<std::string> rtl_paths;
    std::string seed_signal;
    std::optional<std::string> top_module;

    std::size_t k = 5;
    double k1 = 1.2;
    double b = 0.75;
    std::size_t chunk_chars = 1200;
    std::size_t overlap_chars = 200;

    std::size_t max_rounds = 64;
    std::size_t max_depth = 32;
    std::size_t max_chains = 100000;
    std::size_t max_mutants = 50;
    std::size_t context_budget = 6000;

    llm::SessionMode mode = llm::SessionMode::Replay;
    std::string fixture_path;
    std::string model_id = "gpt-4o";
    double temperature = 0.0;
    int max_tokens = 1024;
    std::size_t max_in_flight = 4;

    std::string output_dir = "out";

    bool reverse_chains = false;
    bool llm_chain_check = false;
    bool llm_bridge_check = false;

    std::set<mutation::Operator> operators;
    std::uint64_t mutation_seed = 7;
    std::string verifier_command;
    std::size_t verifier_workers = 4;
    std::string fpv_report;

    std::filesystem::path resolve(const std::string& p) const;
    std::filesystem::path out_dir() const { return resolve(output_dir); }
};

/// INI text, see README for the accepted keys. Throws ConfigError.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);
/// Reads and validates (input paths must exist). Throws ConfigError.
RunConfig load_config(const std::filesystem::path& path);
void validate_config(const RunConfig& config);

/// Canonical JSON of every setting that influences artifacts.
Json config_to_json(const RunConfig& config);
/// First 16 hex digits of the SHA-256 of config_to_json.
std::string run_id(const RunConfig& config);

enum class Stage { Ingest, Entities, Objectives, Chains, Bridge, Sva, Mutate };
std::string_view to_string(Stage stage);
Stage stage_from_string(std::string_view text);
/// Stages executed by run_pipeline, in order.
const std::vector<Stage>& pipeline_stages();

class StageError : public Error {
public:
    StageError(Stage stage, const Error& cause)
        : Error(cause.code(), std::string(to_string(stage)) + ": " + cause.detail()), stage_(stage) {}
    Stage stage() const { return stage_; }

private:
    Stage stage_;
};

/// Counts and warnings reported by one stage.
struct StageOutcome {
    Json counts = Json::object();
    std::vector<std::string> warnings;
};

/// Shared state for stages of one process; the session is opened lazily.
class Runner {
public:
    explicit Runner(RunConfig config, std::shared_ptr<llm::Backend> backend = nullptr);

    const RunConfig& config() const { return config_; }
    /// Runs one stage from persisted upstream artifacts. Throws StageError.
    StageOutcome run(Stage stage);

private:
    const llm::Session& session();

    RunConfig config_;
    std::shared_ptr<llm::Backend> backend_;
    std::optional<llm::Session> session_;
};

struct StageRecord {
    Stage stage = Stage::Ingest;
    bool ok = false;
    double duration_ms = 0;
    StageOutcome outcome;
    std::string error;
};

struct RunReport {
    std::string run_id;
    std::vector<StageRecord> stages;
    bool ok = true;
    std::string started_at;
};

/// Runs ingest through sva, stopping at the first failing stage, and writes
/// run_report.json. Never throws for stage failures.
RunReport run_pipeline(const RunConfig& config, std::shared_ptr<llm::Backend> backend = nullptr);

/// run_report.json layout; timing data lives under "timings" and "started_at".
Json to_json(const RunReport& report);

/// Artifact file names, relative to the output directory.
namespace artifacts {
inline constexpr const char* kCorpusDir = "corpus";
inline constexpr const char* kEntities = "entities.json";
inline constexpr const char* kObjectives = "objectives.json";
inline constexpr const char* kChains = "chains.json";
inline constexpr const char* kBridge = "bridge.json";
inline constexpr const char* kDiagnostics = "diagnostics.json";
inline constexpr const char* kSva = "out.sva";
inline constexpr const char* kRunReport = "run_report.json";
inline constexpr const char* kMutantsDir = "mutants";
inline constexpr const char* kMutants = "mutants.json";
inline constexpr const char* kMetrics = "metrics.json";
} // namespace artifacts

} // namespace assertgen::pipeline
