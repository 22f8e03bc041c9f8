// Mutant generation over the RTL syntax tree and evaluation metric records.
#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "assertgen/io.hpp"
#include "assertgen/rtl/design.hpp"

namespace assertgen::mutation {

enum class Operator {
    NegateCondition,
    ReplaceBinaryOp,
    FlipConstantBit,
    SwapAssignRhsOperands,
    StuckAtZero,
    StuckAtOne,
};
std::string_view to_string(Operator op);
Operator operator_from_string(std::string_view text);
const std::vector<Operator>& all_operators();

/// Operator substitution used by replace_binary_op, e.g. "&" -> "|".
const std::map<std::string, std::string, std::less<>>& binary_op_replacements();
/// Operators for which swapping the operands changes the value.
const std::set<std::string, std::less<>>& non_commutative_ops();

struct MutantLocation {
    std::string file;
    int line = 0;
    std::size_t node_index = 0; // preorder index in the original file's tree
};

struct MutantSpec {
    std::string mutant_id; // "m0001", ...
    Operator op = Operator::NegateCondition;
    MutantLocation location;
    std::string original_text; // trimmed source lines touched by the edit
    std::string mutated_text;
};

/// One place an operator can apply, as a byte-range text substitution.
struct Site {
    Operator op = Operator::NegateCondition;
    std::size_t file_index = 0;
    std::size_t begin = 0;
    std::size_t end = 0;
    std::string replacement;
    /// Used when `replacement` re-parses into a different tree shape.
    std::optional<std::pair<std::pair<std::size_t, std::size_t>, std::string>> fallback;
};

/// Sites in (file, operator order, source position) order.
std::vector<Site> enumerate_sites(const rtl::RtlDesign& design, const std::set<Operator>& operators);

/// Flipped literal, or nullopt when the last digit is x/z/? or the literal is real.
std::optional<std::string> flip_lsb(std::string_view literal);

struct Mutant {
    MutantSpec spec;
    std::size_t file_index = 0;
    std::string mutated_source; // full text of the mutated file
};

struct MutationResult {
    std::size_t site_count = 0;
    std::vector<Mutant> mutants;
    std::vector<std::string> warnings; // sites rejected by the single-edit check
};

/// Seeded sample of at most max_mutants sites, each applied and re-parsed.
/// Throws NoApplicableSites.
MutationResult generate_mutants(const rtl::RtlDesign& design, const std::set<Operator>& operators,
                                std::uint64_t seed, std::size_t max_mutants);

/// k distinct indices from [0, n) chosen with a partial Fisher-Yates shuffle
/// driven by mt19937_64, returned sorted. Same on every platform.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed);

/// One directory per mutant holding every design file (the mutated one
/// replaced) and mutant.json.
void write_mutants(const MutationResult& result, const rtl::RtlDesign& design, const std::filesystem::path& dir);

Json to_json(const MutantSpec& spec);

struct MetricsRecord {
    std::string design_id;
    std::optional<double> fpr_percent;
    std::optional<double> coi_percent;
    std::optional<double> pc_percent;
    std::optional<double> bdr_percent;
    std::size_t sva_total = 0;
    std::size_t timeout_passes = 0;
    std::optional<std::size_t> detected_mutants;
    std::optional<std::size_t> total_mutants;
};

/// 100 * num / den rounded half-up to two decimals.
double percent_2dp(std::size_t num, std::size_t den);

/// Throws EmptyVerdicts, DuplicateMutant.
MetricsRecord compute_bdr(const std::vector<std::pair<std::string, bool>>& verdicts);

/// CSV "mutant_id,verdict" with verdict DETECTED or SURVIVED.
std::vector<std::pair<std::string, bool>> read_verdicts(std::string_view csv);

/// CSV "property_id,status,coi_percent,pc_percent"; status is proven, cex,
/// timeout or error, percent cells may be empty. Timeouts count as passes.
/// Throws SchemaMismatch.
MetricsRecord ingest_fpv_report(const std::filesystem::path& report);
MetricsRecord ingest_fpv_text(std::string_view csv);

Json to_json(const MetricsRecord& record);

struct VerifierOptions {
    /// Shell command; "{mutant_dir}" is replaced by the mutant directory.
    std::string command_template;
    std::size_t workers = 4;
};

/// Runs the external verifier once per mutant directory and reads the last
/// "DETECTED"/"SURVIVED" line of its stdout. A nonzero exit or no verdict
/// line throws BackendUnavailable.
std::vector<std::pair<std::string, bool>> collect_verdicts(const std::vector<std::string>& mutant_ids,
                                                           const std::filesystem::path& mutants_dir,
                                                           const VerifierOptions& options);

} // namespace assertgen::mutation
