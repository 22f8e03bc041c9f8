#include "assertgen/llm_gateway.hpp"

#include <charconv>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <shared_mutex>
#include <thread>
#include <unordered_map>

#include <httplib.h>

#include "assertgen/error.hpp"

namespace assertgen::llm {

namespace {

constexpr std::pair<StageTag, std::string_view> kStageNames[] = {
    {StageTag::EntityTarget, "entity_target"},
    {StageTag::EntityContext, "entity_context"},
    {StageTag::Objective, "objective"},
    {StageTag::Chain, "chain"},
    {StageTag::Bridge, "bridge"},
    {StageTag::Sva, "sva"},
};

std::string format_real(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void append_field(std::string& out, std::string_view name, std::string_view value) {
    out += name;
    out += ':';
    out += std::to_string(value.size());
    out += ':';
    out += value;
    out += '\n';
}

bool is_hex_digest(std::string_view s) {
    if (s.size() != 64)
        return false;
    for (char c : s)
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')))
            return false;
    return true;
}

} // namespace

std::string_view to_string(StageTag tag) {
    for (auto& [t, name] : kStageNames)
        if (t == tag)
            return name;
    return "unknown";
}

StageTag stage_from_string(std::string_view text) {
    for (auto& [t, name] : kStageNames)
        if (name == text)
            return t;
    fail(ErrorCode::PreconditionViolation, "unknown stage tag '" + std::string(text) + "'");
}

PromptRequest make_request(StageTag tag, std::string system_text, std::string user_text,
                           const GenerationParams& params) {
    PromptRequest r;
    r.stage_tag = tag;
    r.system_text = std::move(system_text);
    r.user_text = std::move(user_text);
    r.temperature = params.temperature;
    r.max_tokens = params.max_tokens;
    r.model_id = params.model_id;
    return r;
}

void check_request(const PromptRequest& request) {
    if (request.user_text.empty())
        fail(ErrorCode::PreconditionViolation, "user_text must be non-empty");
    if (!(request.temperature >= 0.0 && request.temperature <= 1.0))
        fail(ErrorCode::PreconditionViolation, "temperature must lie in [0,1]");
    if (request.max_tokens <= 0)
        fail(ErrorCode::PreconditionViolation, "max_tokens must be positive");
    if (request.model_id.empty())
        fail(ErrorCode::PreconditionViolation, "model_id must be non-empty");
}

std::string canonical_serialization(const PromptRequest& request) {
    std::string out = "assertgen-request-v1\n";
    append_field(out, "model_id", request.model_id);
    append_field(out, "system_text", request.system_text);
    append_field(out, "user_text", request.user_text);
    append_field(out, "temperature", format_real(request.temperature));
    append_field(out, "max_tokens", std::to_string(request.max_tokens));
    return out;
}

std::string hash_request(const PromptRequest& request) {
    return sha256_hex(canonical_serialization(request));
}

Json fixture_to_json(const FixtureEntry& entry) {
    return Json{
        {"digest", entry.digest},
        {"stage", to_string(entry.request.stage_tag)},
        {"model_id", entry.request.model_id},
        {"temperature", entry.request.temperature},
        {"max_tokens", entry.request.max_tokens},
        {"system", entry.request.system_text},
        {"user", entry.request.user_text},
        {"response", entry.response_text},
    };
}

FixtureEntry fixture_from_json(const Json& j) {
    FixtureEntry e;
    try {
        e.digest = j.at("digest").get<std::string>();
        e.request.stage_tag = stage_from_string(j.at("stage").get<std::string>());
        e.request.model_id = j.at("model_id").get<std::string>();
        e.request.temperature = j.at("temperature").get<double>();
        e.request.max_tokens = j.at("max_tokens").get<int>();
        e.request.system_text = j.at("system").get<std::string>();
        e.request.user_text = j.at("user").get<std::string>();
        e.response_text = j.at("response").get<std::string>();
    }
    catch (const Json::exception& ex) {
        fail(ErrorCode::FixtureCorrupt, ex.what());
    }
    catch (const Error& ex) {
        fail(ErrorCode::FixtureCorrupt, ex.what());
    }
    if (!is_hex_digest(e.digest))
        fail(ErrorCode::FixtureCorrupt, "digest is not 64 lowercase hex characters");
    if (hash_request(e.request) != e.digest)
        fail(ErrorCode::FixtureCorrupt, "digest " + e.digest + " does not match its request");
    return e;
}

std::string fixture_line(const FixtureEntry& entry) {
    return fixture_to_json(entry).dump();
}

// ---------------------------------------------------------------------------
// HTTP backend

HttpBackendOptions HttpBackendOptions::from_env() {
    HttpBackendOptions opts;
    if (const char* url = std::getenv("ASSERTGEN_LLM_URL"))
        opts.url = url;
    if (const char* key = std::getenv("ASSERTGEN_LLM_KEY"))
        opts.api_key = key;
    return opts;
}

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {}

Json HttpBackend::request_body(const PromptRequest& request) {
    Json messages = Json::array();
    if (!request.system_text.empty())
        messages.push_back({{"role", "system"}, {"content", request.system_text}});
    messages.push_back({{"role", "user"}, {"content", request.user_text}});
    return Json{
        {"model", request.model_id},
        {"messages", messages},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
    };
}

std::string HttpBackend::parse_response_body(std::string_view body) {
    try {
        auto j = Json::parse(body);
        const auto& content = j.at("choices").at(0).at("message").at("content");
        if (content.is_null())
            return {};
        return content.get<std::string>();
    }
    catch (const Json::exception& ex) {
        fail(ErrorCode::BackendUnavailable, std::string("malformed completion body: ") + ex.what());
    }
}

std::string HttpBackend::generate(const PromptRequest& request) {
    if (options_.url.empty())
        fail(ErrorCode::BackendUnavailable, "ASSERTGEN_LLM_URL is not set");

    // Split "scheme://host[:port]/path" into client base and request path.
    const auto scheme_end = options_.url.find("://");
    const auto path_begin =
        options_.url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    const std::string base =
        path_begin == std::string::npos ? options_.url : options_.url.substr(0, path_begin);
    const std::string path =
        path_begin == std::string::npos ? "/v1/chat/completions" : options_.url.substr(path_begin);

    httplib::Client client(base);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);

    httplib::Headers headers;
    if (!options_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + options_.api_key);
    const std::string body = request_body(request).dump();

    std::string last_error;
    auto delay = options_.backoff_base;
    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(delay);
            delay *= 2;
        }
        auto res = client.Post(path, headers, body, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 200)
            return parse_response_body(res->body);
        last_error = "HTTP " + std::to_string(res->status);
        // Client errors other than rate limiting will not improve on retry.
        if (res->status >= 400 && res->status < 500 && res->status != 429)
            break;
    }
    fail(ErrorCode::BackendUnavailable, last_error);
}

// ---------------------------------------------------------------------------
// Session

std::string_view to_string(SessionMode mode) {
    switch (mode) {
        case SessionMode::Live: return "live";
        case SessionMode::Record: return "record";
        case SessionMode::Replay: return "replay";
    }
    return "unknown";
}

SessionMode session_mode_from_string(std::string_view text) {
    if (text == "live")
        return SessionMode::Live;
    if (text == "record")
        return SessionMode::Record;
    if (text == "replay")
        return SessionMode::Replay;
    fail(ErrorCode::PreconditionViolation, "unknown session mode '" + std::string(text) + "'");
}

struct Session::State {
    SessionMode mode;
    std::filesystem::path fixture_path;
    std::shared_ptr<Backend> backend;

    mutable std::shared_mutex index_mutex;
    std::unordered_map<std::string, FixtureEntry> index;

    std::mutex flight_mutex;
    std::condition_variable flight_cv;
    std::size_t in_flight = 0;
    std::size_t max_in_flight = 4;

    std::mutex write_mutex;
};

Session::Session(std::shared_ptr<State> state) : state_(std::move(state)) {}

SessionMode Session::mode() const { return state_->mode; }

const std::filesystem::path& Session::fixture_path() const { return state_->fixture_path; }

std::size_t Session::fixture_count() const {
    std::shared_lock lock(state_->index_mutex);
    return state_->index.size();
}

bool Session::has_fixture(const std::string& digest) const {
    std::shared_lock lock(state_->index_mutex);
    return state_->index.contains(digest);
}

LlmExchange Session::complete(const PromptRequest& request) const {
    check_request(request);
    LlmExchange ex;
    ex.request = request;
    ex.request_digest = hash_request(request);

    if (state_->mode == SessionMode::Replay) {
        {
            std::shared_lock lock(state_->index_mutex);
            auto it = state_->index.find(ex.request_digest);
            if (it == state_->index.end())
                fail(ErrorCode::MissingFixture, "no fixture for " + std::string(to_string(request.stage_tag)) +
                                                    " request " + ex.request_digest);
            ex.response_text = it->second.response_text;
        }
        ex.backend_kind = BackendKind::Replay;
    }
    else {
        {
            std::unique_lock lock(state_->flight_mutex);
            state_->flight_cv.wait(lock, [&] { return state_->in_flight < state_->max_in_flight; });
            ++state_->in_flight;
        }
        struct Release {
            State& s;
            ~Release() {
                {
                    std::lock_guard lock(s.flight_mutex);
                    --s.in_flight;
                }
                s.flight_cv.notify_one();
            }
        } release{*state_};
        ex.response_text = state_->backend->generate(request);
        ex.backend_kind = BackendKind::Live;
    }

    if (ex.response_text.empty())
        fail(ErrorCode::EmptyResponse, "empty response for request " + ex.request_digest);

    if (state_->mode == SessionMode::Record) {
        FixtureEntry entry{ex.request_digest, request, ex.response_text};
        std::lock_guard wlock(state_->write_mutex);
        std::ofstream out(state_->fixture_path, std::ios::binary | std::ios::app);
        if (!out)
            fail(ErrorCode::FixtureUnreadable, "cannot append to " + state_->fixture_path.string());
        out << fixture_line(entry) << '\n';
        std::unique_lock lock(state_->index_mutex);
        state_->index[entry.digest] = std::move(entry);
    }
    ex.timestamp = std::chrono::system_clock::now();
    return ex;
}

Session open_session(SessionMode mode, const std::filesystem::path& fixture_path,
                     std::shared_ptr<Backend> backend, std::size_t max_in_flight) {
    auto state = std::make_shared<Session::State>();
    state->mode = mode;
    state->fixture_path = fixture_path;
    state->max_in_flight = max_in_flight == 0 ? 1 : max_in_flight;

    if (mode != SessionMode::Replay)
        state->backend = backend ? std::move(backend)
                                 : std::make_shared<HttpBackend>(HttpBackendOptions::from_env());

    if (mode == SessionMode::Live)
        return Session(std::move(state));

    if (mode == SessionMode::Record && !std::filesystem::exists(fixture_path)) {
        std::ofstream touch(fixture_path, std::ios::binary | std::ios::app);
        if (!touch)
            fail(ErrorCode::FixtureUnreadable, "cannot create " + fixture_path.string());
        return Session(std::move(state));
    }

    std::ifstream in(fixture_path, std::ios::binary);
    if (!in)
        fail(ErrorCode::FixtureUnreadable, "cannot read " + fixture_path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (trim(line).empty())
            continue;
        Json j;
        try {
            j = Json::parse(line);
        }
        catch (const Json::parse_error& ex) {
            fail(ErrorCode::FixtureCorrupt,
                 fixture_path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
        }
        FixtureEntry entry;
        try {
            entry = fixture_from_json(j);
        }
        catch (const Error& ex) {
            fail(ErrorCode::FixtureCorrupt,
                 fixture_path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
        }
        // Later lines win so that re-recording supersedes older answers.
        state->index[entry.digest] = std::move(entry);
    }
    return Session(std::move(state));
}

} // namespace assertgen::llm
