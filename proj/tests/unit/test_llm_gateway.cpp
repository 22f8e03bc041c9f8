#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include "assertgen/error.hpp"
#include "assertgen/llm_gateway.hpp"

namespace fs = std::filesystem;
using namespace assertgen;
using namespace assertgen::llm;

namespace {

PromptRequest sample_request() {
    PromptRequest r;
    r.stage_tag = StageTag::EntityTarget;
    r.system_text = "You are terse.";
    r.user_text = "Target signal: core_en";
    r.temperature = 0.0;
    r.max_tokens = 1024;
    r.model_id = "gpt-4o";
    return r;
}

fs::path temp_file(const std::string& name) {
    auto dir = fs::temp_directory_path() / "assertgen_gateway_tests";
    fs::create_directories(dir);
    auto p = dir / name;
    fs::remove(p);
    return p;
}

class EchoBackend : public Backend {
public:
    std::string generate(const PromptRequest& r) override {
        ++calls;
        return "echo: " + r.user_text;
    }
    std::atomic<int> calls{0};
};

class FixedBackend : public Backend {
public:
    explicit FixedBackend(std::string text) : text_(std::move(text)) {}
    std::string generate(const PromptRequest&) override { return text_; }

private:
    std::string text_;
};

void write_lines(const fs::path& p, const std::vector<std::string>& lines) {
    std::ofstream out(p, std::ios::binary);
    for (const auto& l : lines)
        out << l << '\n';
}

} // namespace

TEST_CASE("canonical serialization is length-prefixed and fixed-order") {
    CHECK(canonical_serialization(sample_request()) ==
          "assertgen-request-v1\nmodel_id:6:gpt-4o\nsystem_text:14:You are terse.\n"
          "user_text:22:Target signal: core_en\ntemperature:1:0\nmax_tokens:4:1024\n");
}

TEST_CASE("golden digests match an independent SHA-256 of the serialization") {
    // values produced once with Python hashlib over the serialization above
    CHECK(hash_request(sample_request()) == "b1212ca58e6374750830c30f5f2de7dae7f92f736f8e42a79ff82f51bdc4ecb5");

    PromptRequest r;
    r.system_text = "";
    r.user_text = "\xC2\xB5-arch: \xC3\xBCn\xC3\xAF" "code\nline2";
    r.temperature = 0.2;
    r.max_tokens = 256;
    CHECK(hash_request(r) == "320966683075abe61545f8cdd8ecac90ee878ed7e8b3d4d73c9af648fc7daaf2");
}

TEST_CASE("digest depends on every hashed field and nothing else") {
    const auto base = sample_request();
    const auto d0 = hash_request(base);
    CHECK(d0.size() == 64);
    CHECK(hash_request(base) == d0);

    std::mt19937 rng(11);
    for (int i = 0; i < 200; ++i) {
        auto r = base;
        r.stage_tag = static_cast<StageTag>(rng() % 6);
        CHECK(hash_request(r) == d0);
    }

    auto t = base;
    t.temperature = 0.5;
    CHECK(hash_request(t) != d0);
    auto m = base;
    m.max_tokens = 1023;
    CHECK(hash_request(m) != d0);
    auto s = base;
    s.system_text += " ";
    CHECK(hash_request(s) != d0);
    auto u = base;
    u.user_text = "Target signal: core_eN";
    CHECK(hash_request(u) != d0);
    auto id = base;
    id.model_id = "gpt-4o-mini";
    CHECK(hash_request(id) != d0);

    // moving bytes between fields must not collide
    auto a = base, b = base;
    a.system_text = "ab";
    a.user_text = "c";
    b.system_text = "a";
    b.user_text = "bc";
    CHECK(hash_request(a) != hash_request(b));
}

TEST_CASE("request preconditions") {
    auto r = sample_request();
    r.user_text = "";
    CHECK_THROWS_AS(check_request(r), Error);
    try {
        check_request(r);
    }
    catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PreconditionViolation);
    }
    r = sample_request();
    r.temperature = 1.5;
    CHECK_THROWS_AS(check_request(r), Error);
    r = sample_request();
    r.max_tokens = 0;
    CHECK_THROWS_AS(check_request(r), Error);
    CHECK_NOTHROW(check_request(sample_request()));
}

TEST_CASE("replay answers from the fixture store byte for byte") {
    auto path = temp_file("replay.jsonl");
    FixtureEntry e{hash_request(sample_request()), sample_request(), "TARGET: core_en\n"};
    write_lines(path, {fixture_line(e)});

    auto session = open_session(SessionMode::Replay, path);
    CHECK(session.fixture_count() == 1);
    auto x1 = complete(sample_request(), session);
    auto x2 = complete(sample_request(), session);
    CHECK(x1.response_text == "TARGET: core_en\n");
    CHECK(x1.response_text == x2.response_text);
    CHECK(x1.request_digest == x2.request_digest);
    CHECK(x1.backend_kind == BackendKind::Replay);

    auto other = sample_request();
    other.user_text = "Target signal: ien";
    try {
        complete(other, session);
        FAIL("expected MissingFixture");
    }
    catch (const Error& err) {
        CHECK(err.code() == ErrorCode::MissingFixture);
    }
}

TEST_CASE("record then replay round trip") {
    auto path = temp_file("record.jsonl");
    auto backend = std::make_shared<EchoBackend>();
    auto rec = open_session(SessionMode::Record, path, backend);
    std::vector<PromptRequest> requests;
    for (int i = 0; i < 5; ++i) {
        auto r = sample_request();
        r.user_text = "question " + std::to_string(i);
        requests.push_back(r);
    }
    std::vector<std::string> answers;
    for (const auto& r : requests)
        answers.push_back(rec.complete(r).response_text);
    CHECK(backend->calls == 5);

    auto replay = open_session(SessionMode::Replay, path);
    CHECK(replay.fixture_count() == 5);
    for (std::size_t i = 0; i < requests.size(); ++i)
        CHECK(replay.complete(requests[i]).response_text == answers[i]);
}

TEST_CASE("later fixture lines supersede earlier ones") {
    auto path = temp_file("supersede.jsonl");
    auto r = sample_request();
    write_lines(path, {fixture_line({hash_request(r), r, "old"}), fixture_line({hash_request(r), r, "new"})});
    auto s = open_session(SessionMode::Replay, path);
    CHECK(s.fixture_count() == 1);
    CHECK(s.complete(r).response_text == "new");
}

TEST_CASE("corrupt and unreadable fixture stores") {
    auto path = temp_file("corrupt.jsonl");
    write_lines(path, {"{not json"});
    try {
        open_session(SessionMode::Replay, path);
        FAIL("expected FixtureCorrupt");
    }
    catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FixtureCorrupt);
    }

    // a digest that does not belong to its request
    auto r = sample_request();
    write_lines(path, {fixture_line({std::string(64, 'a'), r, "x"})});
    try {
        open_session(SessionMode::Replay, path);
        FAIL("expected FixtureCorrupt");
    }
    catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FixtureCorrupt);
    }

    try {
        open_session(SessionMode::Replay, temp_file("missing.jsonl"));
        FAIL("expected FixtureUnreadable");
    }
    catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FixtureUnreadable);
    }
}

TEST_CASE("empty completions are errors") {
    auto s = open_session(SessionMode::Live, {}, std::make_shared<FixedBackend>(""));
    try {
        s.complete(sample_request());
        FAIL("expected EmptyResponse");
    }
    catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyResponse);
    }
}

TEST_CASE("in-flight requests stay within the configured bound") {
    struct Slow : Backend {
        std::atomic<int> now{0}, peak{0};
        std::string generate(const PromptRequest&) override {
            int n = ++now;
            int p = peak;
            while (n > p && !peak.compare_exchange_weak(p, n)) {
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
            --now;
            return "ok";
        }
    };
    auto backend = std::make_shared<Slow>();
    auto s = open_session(SessionMode::Live, {}, backend, 2);
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i)
        threads.emplace_back([&, i] {
            auto r = sample_request();
            r.user_text = "q" + std::to_string(i);
            s.complete(r);
        });
    for (auto& t : threads)
        t.join();
    CHECK(backend->peak <= 2);
    CHECK(backend->peak >= 1);
}

TEST_CASE("concurrent recording keeps every line intact") {
    auto path = temp_file("concurrent.jsonl");
    auto s = open_session(SessionMode::Record, path, std::make_shared<EchoBackend>(), 8);
    std::vector<std::thread> threads;
    for (int i = 0; i < 16; ++i)
        threads.emplace_back([&, i] {
            auto r = sample_request();
            r.user_text = "parallel " + std::to_string(i);
            s.complete(r);
        });
    for (auto& t : threads)
        t.join();
    auto replay = open_session(SessionMode::Replay, path);
    CHECK(replay.fixture_count() == 16);
}

TEST_CASE("HTTP backend speaks the chat-completion wire format") {
    httplib::Server server;
    std::mutex mu;
    Json seen;
    std::string auth;
    int failures_left = 2;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        std::lock_guard lock(mu);
        if (failures_left > 0) {
            --failures_left;
            res.status = 503;
            return;
        }
        seen = Json::parse(req.body);
        auth = req.get_header_value("Authorization");
        Json body{{"choices", Json::array({{{"message", {{"role", "assistant"}, {"content", "TARGET: core_en"}}}}})}};
        res.set_content(body.dump(), "application/json");
    });
    server.Post("/bad", [&](const httplib::Request&, httplib::Response& res) { res.status = 401; });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    HttpBackendOptions opts;
    opts.url = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    opts.api_key = "secret";
    opts.backoff_base = std::chrono::milliseconds(1);
    HttpBackend backend(opts);
    CHECK(backend.generate(sample_request()) == "TARGET: core_en");
    CHECK(seen.at("model") == "gpt-4o");
    CHECK(seen.at("temperature") == 0.0);
    CHECK(seen.at("max_tokens") == 1024);
    REQUIRE(seen.at("messages").size() == 2);
    CHECK(seen["messages"][0]["role"] == "system");
    CHECK(seen["messages"][1]["content"] == "Target signal: core_en");
    CHECK(auth == "Bearer secret");

    // client errors are not retried
    opts.url = "http://127.0.0.1:" + std::to_string(port) + "/bad";
    HttpBackend bad(opts);
    try {
        bad.generate(sample_request());
        FAIL("expected BackendUnavailable");
    }
    catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BackendUnavailable);
    }

    // retries exhausted
    {
        std::lock_guard lock(mu);
        failures_left = 10;
    }
    opts.url = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    opts.max_retries = 3;
    HttpBackend flaky(opts);
    CHECK_THROWS_AS(flaky.generate(sample_request()), Error);
    {
        std::lock_guard lock(mu);
        CHECK(failures_left == 6); // one attempt plus three retries
    }

    server.stop();
    t.join();
}

TEST_CASE("malformed completion bodies") {
    CHECK(HttpBackend::parse_response_body(R"({"choices":[{"message":{"content":"hi"}}]})") == "hi");
    CHECK_THROWS_AS(HttpBackend::parse_response_body("{}"), Error);
    CHECK_THROWS_AS(HttpBackend::parse_response_body("not json"), Error);
}

TEST_CASE("stage and mode names") {
    for (auto tag : {StageTag::EntityTarget, StageTag::EntityContext, StageTag::Objective, StageTag::Chain,
                     StageTag::Bridge, StageTag::Sva})
        CHECK(stage_from_string(to_string(tag)) == tag);
    CHECK(to_string(StageTag::EntityTarget) == "entity_target");
    CHECK(session_mode_from_string("replay") == SessionMode::Replay);
    CHECK_THROWS_AS(session_mode_from_string("offline"), Error);
}
