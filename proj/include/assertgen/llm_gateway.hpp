// Text-generation gateway with deterministic record/replay.
//
// Every LLM-dependent stage talks to a Session. In replay mode the session
// answers from a line-delimited JSON fixture store keyed by the SHA-256 digest
// of the request; in record mode it forwards to a live backend and appends each
// exchange to the store; in live mode it only forwards.
#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "assertgen/io.hpp"

namespace assertgen::llm {

enum class StageTag { EntityTarget, EntityContext, Objective, Chain, Bridge, Sva };

std::string_view to_string(StageTag tag);
StageTag stage_from_string(std::string_view text);

struct PromptRequest {
    StageTag stage_tag = StageTag::EntityTarget;
    std::string system_text;
    std::string user_text;
    double temperature = 0.0;
    int max_tokens = 1024;
    std::string model_id = "gpt-4o";
};

/// Decoding parameters shared by every stage that builds a request.
struct GenerationParams {
    std::string model_id = "gpt-4o";
    double temperature = 0.0;
    int max_tokens = 1024;
};

PromptRequest make_request(StageTag tag, std::string system_text, std::string user_text,
                           const GenerationParams& params);

/// Throws PreconditionViolation when the request breaks its invariants.
void check_request(const PromptRequest& request);

/// Digest over (model_id, system_text, user_text, temperature, max_tokens).
/// The stage tag is metadata and does not participate.
std::string hash_request(const PromptRequest& request);

/// The exact byte string that hash_request digests.
std::string canonical_serialization(const PromptRequest& request);

enum class BackendKind { Live, Replay };

struct LlmExchange {
    PromptRequest request;
    std::string response_text;
    std::string request_digest;
    std::chrono::system_clock::time_point timestamp;
    BackendKind backend_kind = BackendKind::Replay;
};

/// One line of the fixture store.
struct FixtureEntry {
    std::string digest;
    PromptRequest request;
    std::string response_text;
};

Json fixture_to_json(const FixtureEntry& entry);
/// Throws FixtureCorrupt on missing fields or a digest that does not match the
/// stored request.
FixtureEntry fixture_from_json(const Json& j);
/// Serialized entry without trailing newline.
std::string fixture_line(const FixtureEntry& entry);

class Backend {
public:
    virtual ~Backend() = default;
    /// Returns the raw completion text. Throws BackendUnavailable on failure.
    virtual std::string generate(const PromptRequest& request) = 0;
};

struct HttpBackendOptions {
    std::string url;
    std::string api_key;
    int max_retries = 3;
    std::chrono::milliseconds backoff_base{1000};
    std::chrono::seconds timeout{120};

    /// Reads ASSERTGEN_LLM_URL and ASSERTGEN_LLM_KEY.
    static HttpBackendOptions from_env();
};

/// OpenAI-compatible chat-completion client.
class HttpBackend final : public Backend {
public:
    explicit HttpBackend(HttpBackendOptions options);
    std::string generate(const PromptRequest& request) override;

    static Json request_body(const PromptRequest& request);
    /// Extracts choices[0].message.content; throws BackendUnavailable on a
    /// malformed body.
    static std::string parse_response_body(std::string_view body);

private:
    HttpBackendOptions options_;
};

enum class SessionMode { Live, Record, Replay };

std::string_view to_string(SessionMode mode);
SessionMode session_mode_from_string(std::string_view text);

/// Shared handle; copies refer to the same fixture index and in-flight bound.
class Session {
public:
    SessionMode mode() const;
    std::size_t fixture_count() const;
    bool has_fixture(const std::string& digest) const;
    const std::filesystem::path& fixture_path() const;

    LlmExchange complete(const PromptRequest& request) const;

private:
    struct State;
    explicit Session(std::shared_ptr<State> state);
    std::shared_ptr<State> state_;

    friend Session open_session(SessionMode, const std::filesystem::path&,
                                std::shared_ptr<Backend>, std::size_t);
};

/// Live and record sessions need a backend; when none is given an HttpBackend
/// configured from the environment is created.
Session open_session(SessionMode mode, const std::filesystem::path& fixture_path,
                     std::shared_ptr<Backend> backend = nullptr, std::size_t max_in_flight = 4);

inline LlmExchange complete(const PromptRequest& request, const Session& session) {
    return session.complete(request);
}

} // namespace assertgen::llm
