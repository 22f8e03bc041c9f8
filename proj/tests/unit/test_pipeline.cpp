#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "assertgen/error.hpp"
#include "assertgen/io.hpp"
#include "assertgen/pipeline.hpp"
#include "assertgen/sva_emitter.hpp"
#include "data_files.hpp"
#include "desk_responder.hpp"

namespace fs = std::filesystem;
using namespace assertgen;
using namespace assertgen::pipeline;

namespace {

ErrorCode code_of(auto fn) {
    try {
        fn();
    }
    catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::IoError;
}

fs::path fresh_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("assertgen_pipeline_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const fs::path kDesk = testdata::kRoot / "desk";

// Copies the desk inputs into dir and writes an INI there; prompts quote the
// relative RTL paths, so the layout must match the bundled one.
fs::path desk_ini(const fs::path& dir, const std::string& name, const std::string& seed = "core_en",
                  const std::string& extra = "") {
    if (!fs::exists(dir / "rtl"))
        fs::copy(kDesk, dir, fs::copy_options::recursive | fs::copy_options::skip_existing);
    auto path = dir / (name + ".ini");
    std::ofstream(path) << "[input]\nspec = spec/i2c_spec.md\n"
                           "rtl = rtl/i2c_top.v, rtl/i2c_byte_ctrl.v, rtl/i2c_bit_ctrl.v\nseed_signal = "
                        << seed
                        << "\n[retrieval]\nk = 3\nchunk_chars = 700\noverlap_chars = 120\n"
                           "[limits]\nmax_depth = 8\n[llm]\nmode = replay\nfixtures = fixtures.jsonl\n"
                           "[output]\ndir = "
                        << name << "_out\n"
                        << extra;
    return path;
}

int run_cli(const std::string& args) {
    int status = std::system((std::string(ASSERTGEN_CLI) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// out.sva without its header, which carries the run id.
std::string sva_body(const fs::path& path) {
    auto text = read_text_file(path);
    std::string out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos + 1);
        if (line.rfind("// assertgen run:", 0) != 0)
            out += line;
        pos = nl == std::string::npos ? text.size() : nl + 1;
    }
    return out;
}

} // namespace

TEST_CASE("config parsing accepts every section and rejects unknown keys") {
    auto c = parse_config("[input]\nspec = a.md, b.md\nrtl = x.v\nseed_signal = en\ntop = top\n"
                          "[retrieval]\nk = 4\nk1 = 1.5\nb = 0.5\nchunk_chars = 900\noverlap_chars = 100\n"
                          "[limits]\nmax_rounds = 9\nmax_depth = 5\nmax_chains = 77\nmax_mutants = 12\n"
                          "context_budget = 3000\n"
                          "[llm]\nmode = record\nfixtures = f.jsonl\nmodel = m\ntemperature = 0.5\n"
                          "max_tokens = 64\nmax_in_flight = 2\n"
                          "[output]\ndir = results\n[chains]\nreverse = yes\nllm_check = 1\n"
                          "[bridge]\nllm_check = true\n"
                          "[mutation]\noperators = negate_condition\nseed = 3\nverifier = v {mutant_dir}\n"
                          "workers = 6\nfpv_report = r.csv\n",
                          "/base");
    CHECK(c.spec_paths == std::vector<std::string>{"a.md", "b.md"});
    CHECK(c.top_module == std::optional<std::string>("top"));
    CHECK(c.k == 4);
    CHECK(c.k1 == 1.5);
    CHECK(c.overlap_chars == 100);
    CHECK(c.max_chains == 77);
    CHECK(c.context_budget == 3000);
    CHECK(c.mode == llm::SessionMode::Record);
    CHECK(c.temperature == 0.5);
    CHECK(c.max_in_flight == 2);
    CHECK(c.reverse_chains);
    CHECK(c.llm_chain_check);
    CHECK(c.llm_bridge_check);
    CHECK(c.operators.size() == 1);
    CHECK(c.mutation_seed == 3);
    CHECK(c.verifier_workers == 6);
    CHECK(c.out_dir() == fs::path("/base/results"));
    CHECK(c.resolve("/abs/x.v") == fs::path("/abs/x.v"));

    auto defaults = parse_config("", "/b");
    CHECK(defaults.k == 5);
    CHECK(defaults.chunk_chars == 1200);
    CHECK(defaults.mode == llm::SessionMode::Replay);

    for (auto bad : {"[nope]\nx = 1\n", "[input]\nfoo = 1\n", "stray = 1\n", "[retrieval]\nk = -3\n",
                     "[retrieval]\nk = 3x\n", "[retrieval]\nk1 = fast\n", "[llm]\nmode = maybe\n",
                     "[chains]\nreverse = sometimes\n", "[input\n"}) {
        CAPTURE(bad);
        CHECK(code_of([&] { parse_config(bad, "/b"); }) == ErrorCode::ConfigError);
    }
}

TEST_CASE("config validation") {
    auto base = testdata::desk_config("/tmp/unused");
    CHECK_NOTHROW(validate_config(base));

    auto broken = [&](auto edit) {
        auto c = base;
        edit(c);
        return code_of([&] { validate_config(c); });
    };
    CHECK(broken([](RunConfig& c) { c.overlap_chars = c.chunk_chars; }) == ErrorCode::ConfigError);
    CHECK(broken([](RunConfig& c) { c.temperature = 1.5; }) == ErrorCode::ConfigError);
    CHECK(broken([](RunConfig& c) { c.temperature = -0.1; }) == ErrorCode::ConfigError);
    CHECK(broken([](RunConfig& c) { c.k = 0; }) == ErrorCode::ConfigError);
    CHECK(broken([](RunConfig& c) { c.max_tokens = 0; }) == ErrorCode::ConfigError);
    CHECK(broken([](RunConfig& c) { c.seed_signal = "not a name"; }) == ErrorCode::ConfigError);
    CHECK(broken([](RunConfig& c) { c.spec_paths = {"/missing/spec.md"}; }) == ErrorCode::ConfigError);
    CHECK(broken([](RunConfig& c) { c.rtl_paths.clear(); }) == ErrorCode::ConfigError);
    CHECK(broken([](RunConfig& c) { c.fixture_path = "/missing/f.jsonl"; }) == ErrorCode::ConfigError);
    CHECK(broken([](RunConfig& c) { c.fpv_report = "/missing/r.csv"; }) == ErrorCode::ConfigError);
    CHECK(code_of([] { load_config("/missing/assertgen.ini"); }) == ErrorCode::ConfigError);

    // record mode does not need the fixture file to exist yet
    auto rec = base;
    rec.mode = llm::SessionMode::Record;
    rec.fixture_path = "/tmp/not_yet.jsonl";
    CHECK_NOTHROW(validate_config(rec));
}

TEST_CASE("run ids follow the settings that shape artifacts") {
    auto a = testdata::desk_config("/tmp/a");
    auto b = testdata::desk_config("/tmp/b");
    CHECK(run_id(a).size() == 16);
    CHECK(run_id(a).find_first_not_of("0123456789abcdef") == std::string::npos);
    // the output directory does not shape artifacts
    CHECK(run_id(a) == run_id(b));
    b.max_depth = 9;
    CHECK(run_id(a) != run_id(b));
    b = a;
    b.mode = llm::SessionMode::Record;
    CHECK(run_id(a) != run_id(b));
    b = a;
    b.mutation_seed = 8;
    CHECK(run_id(a) != run_id(b));
    CHECK(config_to_json(a) == config_to_json(testdata::desk_config("/tmp/c")));

    for (auto s : {Stage::Ingest, Stage::Entities, Stage::Objectives, Stage::Chains, Stage::Bridge, Stage::Sva,
                   Stage::Mutate})
        CHECK(stage_from_string(to_string(s)) == s);
    CHECK(code_of([] { stage_from_string("lint"); }) == ErrorCode::ConfigError);
    CHECK(pipeline_stages().back() == Stage::Sva);
}

TEST_CASE("replaying the desk fixture twice gives identical artifacts") {
    auto one = fresh_dir("replay1");
    auto two = fresh_dir("replay2");
    auto r1 = run_pipeline(testdata::desk_config(one));
    auto r2 = run_pipeline(testdata::desk_config(two));
    for (const auto& s : r1.stages)
        CHECK_MESSAGE(s.ok, s.error);
    REQUIRE(r1.ok);
    REQUIRE(r2.ok);
    CHECK(r1.stages.size() == pipeline_stages().size());
    CHECK(r1.run_id == r2.run_id);

    for (auto name : {artifacts::kEntities, artifacts::kObjectives, artifacts::kChains, artifacts::kBridge,
                      artifacts::kDiagnostics, artifacts::kSva, artifacts::kRunReport})
        CHECK_MESSAGE(fs::exists(one / name), name);
    CHECK(fs::is_directory(one / artifacts::kCorpusDir));

    auto s1 = testdata::snapshot(one);
    auto s2 = testdata::snapshot(two);
    REQUIRE(s1.size() == s2.size());
    for (const auto& [rel, text] : s1) {
        CAPTURE(rel);
        REQUIRE(s2.contains(rel));
        CHECK(text == s2.at(rel));
    }

    auto report = read_json_file(one / artifacts::kRunReport);
    CHECK(report["run_id"] == r1.run_id);
    CHECK(report["timings"].size() == pipeline_stages().size());

    auto sva = sva::parse_sva_file(read_text_file(one / artifacts::kSva));
    CHECK(sva.run_id == r1.run_id);
    CHECK(sva.assertions.size() == 13);
    auto diags = read_json_file(one / artifacts::kDiagnostics);
    std::size_t unqualified = 0;
    for (const auto& d : diags.is_array() ? diags : diags["diagnostics"])
        if (d["rule"] == "UnqualifiedSignal")
            ++unqualified;
    CHECK(unqualified == 2);
}

TEST_CASE("single stages rerun from saved artifacts") {
    auto dir = fresh_dir("stages");
    auto config = testdata::desk_config(dir);
    Runner cold(config);
    try {
        cold.run(Stage::Chains);
        FAIL("chains ran without an entity table");
    }
    catch (const StageError& e) {
        CHECK(e.stage() == Stage::Chains);
        CHECK(e.code() == ErrorCode::MissingUpstreamArtifact);
    }

    REQUIRE(run_pipeline(config).ok);
    auto before = read_text_file(dir / artifacts::kSva);
    fs::remove(dir / artifacts::kSva);
    Runner warm(config);
    auto outcome = warm.run(Stage::Sva);
    CHECK(read_text_file(dir / artifacts::kSva) == before);
    CHECK_FALSE(outcome.counts.empty());

    // mutate is outside the default run and picks up the formal report
    auto with_fpv = config;
    with_fpv.fpv_report = (testdata::kRoot / "fpv_sample.csv").string();
    with_fpv.max_mutants = 5;
    Runner(with_fpv).run(Stage::Mutate);
    auto mutants = read_json_file(dir / artifacts::kMutants);
    CHECK(mutants["mutants"].size() + mutants["warnings"].size() == 5);
    auto metrics = read_json_file(dir / artifacts::kMetrics);
    CHECK(metrics["fpr_percent"] == 75.0);
    CHECK(metrics["design_id"] == "i2c_top");
}

TEST_CASE("a prompt missing from the fixture stops the run") {
    auto dir = fresh_dir("missing");
    auto config = testdata::desk_config(dir);
    config.seed_signal = "txr";
    auto report = run_pipeline(config);
    CHECK_FALSE(report.ok);
    REQUIRE_FALSE(report.stages.empty());
    CHECK(report.stages.front().ok);
    CHECK_FALSE(report.stages.back().ok);
    CHECK(report.stages.back().stage == Stage::Entities);
    CHECK(report.stages.back().error.find("MissingFixture: entities: no fixture") == 0);
    CHECK(read_json_file(dir / artifacts::kRunReport)["ok"] == false);
}

TEST_CASE("recording with the desk responder reproduces the bundled fixture run") {
    auto dir = fresh_dir("record");
    auto config = testdata::desk_config(dir / "out");
    config.mode = llm::SessionMode::Record;
    config.fixture_path = (dir / "recorded.jsonl").string();
    auto backend = std::make_shared<deskfix::DeskResponder>();
    REQUIRE(run_pipeline(config, backend).ok);
    CHECK(backend->calls() > 0);

    auto replay_dir = fresh_dir("record_replay");
    REQUIRE(run_pipeline(testdata::desk_config(replay_dir)).ok);
    CHECK(sva_body(dir / "out" / artifacts::kSva) == sva_body(replay_dir / artifacts::kSva));

    // the fresh recording replays on its own
    auto again = config;
    again.mode = llm::SessionMode::Replay;
    again.output_dir = (dir / "again").string();
    REQUIRE(run_pipeline(again).ok);
    CHECK(sva_body(dir / "again" / artifacts::kSva) == sva_body(replay_dir / artifacts::kSva));
}

TEST_CASE("command line exit codes") {
    auto dir = fresh_dir("cli");
    auto ini = desk_ini(dir, "run");
    CHECK(run_cli("run --config " + ini.string() + " --dump-graph " + (dir / "graph.json").string()) == 0);
    CHECK(fs::exists(dir / "run_out" / artifacts::kSva));
    CHECK(fs::exists(dir / "graph.json"));
    CHECK(run_cli("sva --config " + ini.string()) == 0);
    CHECK(run_cli("--help") == 0);

    CHECK(run_cli("") == 2);
    CHECK(run_cli("run") == 2);
    CHECK(run_cli("run --config " + (dir / "absent.ini").string()) == 2);
    CHECK(run_cli("run --config " + desk_ini(dir, "bad", "core_en", "[extra]\nx = 1\n").string()) == 2);

    CHECK(run_cli("bridge --config " + desk_ini(dir, "stale").string()) == 3);
    CHECK(run_cli("run --config " + desk_ini(dir, "unseen", "txr").string()) == 3);
}
