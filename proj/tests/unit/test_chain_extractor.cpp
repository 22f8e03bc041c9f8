#include <doctest.h>

#include <functional>
#include <map>
#include <random>

#include "assertgen/chain_extractor.hpp"
#include "assertgen/error.hpp"
#include "assertgen/io.hpp"
#include "graph_fixture.hpp"
#include "oracles.hpp"

using namespace assertgen;
using namespace assertgen::chain;
using rtl::SignalRef;

namespace {

const std::filesystem::path kData = ASSERTGEN_TEST_DATA;

ErrorCode code_of(auto fn) {
    try {
        fn();
    }
    catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::IoError;
}

using PathKey = std::pair<std::vector<std::size_t>, bool>;

std::set<PathKey> as_keys(const rtl::SignalGraph& g, const std::vector<SignalChain>& chains) {
    std::set<PathKey> out;
    for (const auto& c : chains) {
        std::vector<std::size_t> ids;
        for (const auto& n : c.nodes())
            ids.push_back(*g.find(n));
        out.insert({ids, c.truncated});
    }
    return out;
}

std::set<PathKey> as_keys(const std::vector<oracle::Path>& paths) {
    std::set<PathKey> out;
    for (const auto& p : paths)
        out.insert({p.nodes, p.truncated});
    return out;
}

const char* kTop = R"(module top(input clk, input en, output done);
  wire busy;
  sub u_sub(.clk(clk), .go(en), .busy(busy));
  assign done = ~busy;
endmodule
)";

const char* kSub = R"(module sub(input clk, input go, output reg busy);
  reg [3:0] cnt;
  always @(posedge clk) begin
    cnt <= go ? 4'd0 : cnt + 1;
    busy <= cnt != 4'd15;
  end
endmodule
)";

struct ScriptedBackend final : llm::Backend {
    std::map<std::string, std::string> next; // current "module.signal" -> answer
    std::string generate(const llm::PromptRequest& r) override {
        const std::string key = "Current signal: ";
        auto at = r.user_text.find(key) + key.size();
        auto cur = r.user_text.substr(at, r.user_text.find(' ', at) - at);
        auto it = next.find(cur);
        return it == next.end() ? "(end)" : it->second;
    }
};

SignalRef ref_of(const rtl::RtlDesign& d, const std::string& name) {
    return rtl::locate_signal(d, name).module0;
}

} // namespace

TEST_CASE("chains equal exhaustive path enumeration on random graphs") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        auto r = graphfix::random_signal_graph(rng, 30);
        std::size_t origin = rng() % r.adj.size();
        std::size_t depth = 1 + rng() % 12;
        auto got = extract_chains(r.graph, r.graph.nodes()[origin], {.max_depth = depth});
        CHECK_FALSE(got.capped);
        CHECK(as_keys(r.graph, got.chains) == as_keys(oracle::maximal_simple_paths(r.adj, origin, depth)));
        for (const auto& c : got.chains) {
            CHECK(check_propagation(c, r.graph));
            CHECK(c.links.size() <= depth);
            CHECK(c.edge_kinds.size() == c.links.size());
        }
        // lexicographic by node sequence
        for (std::size_t i = 1; i < got.chains.size(); ++i)
            CHECK(got.chains[i - 1].nodes() < got.chains[i].nodes());
    }
}

TEST_CASE("chains equal exhaustive enumeration on the desk design") {
    auto d = rtl::parse_design(rtl::load_sources({kData / "desk/rtl/i2c_top.v", kData / "desk/rtl/i2c_byte_ctrl.v",
                                                  kData / "desk/rtl/i2c_bit_ctrl.v"}));
    auto g = rtl::build_connectivity(d);
    auto adj = graphfix::adjacency_of(g);
    for (const std::string name : {"core_en", "cr", "prer", "cnt", "clk_en", "irq_flag", "wb_inta_o"}) {
        CAPTURE(name);
        auto origin = ref_of(d, name);
        auto got = extract_chains(g, origin, {.max_depth = 8});
        CHECK(as_keys(g, got.chains) == as_keys(oracle::maximal_simple_paths(adj, *g.find(origin), 8)));
        for (const auto& c : got.chains)
            CHECK(check_propagation(c, g));
    }
}

TEST_CASE("edge cases of extraction") {
    rtl::SignalGraph g;
    g.add_node({{}, "m", "a", {}});
    g.add_node({{}, "m", "b", {}});
    auto lone = extract_chains(g, g.nodes()[0]);
    REQUIRE(lone.chains.size() == 1);
    CHECK(lone.chains[0].links.empty());
    CHECK_FALSE(lone.chains[0].truncated);

    g.add_edge(0, 1, rtl::EdgeKind::Procedural, {});
    g.add_edge(1, 0, rtl::EdgeKind::Continuous, {});
    auto loop = extract_chains(g, g.nodes()[0]);
    REQUIRE(loop.chains.size() == 1);
    CHECK(loop.chains[0].truncated); // b leads back to a
    CHECK(loop.chains[0].edge_kinds == std::vector<rtl::EdgeKind>{rtl::EdgeKind::Procedural});

    CHECK(code_of([&] { extract_chains(g, {{}, "m", "zz", {}}); }) == ErrorCode::OriginNotInGraph);

    rtl::SignalGraph fan;
    fan.add_node({{}, "m", "root", {}});
    for (int i = 0; i < 5; ++i) {
        fan.add_node({{}, "m", "leaf" + std::to_string(i), {}});
        fan.add_edge(0, static_cast<std::size_t>(i + 1), rtl::EdgeKind::Continuous, {});
    }
    auto capped = extract_chains(fan, fan.nodes()[0], {.max_depth = 4, .max_chains = 3});
    CHECK(capped.capped);
    CHECK(capped.chains.size() == 3);

    SignalChain broken;
    broken.origin = fan.nodes()[1];
    broken.links = {fan.nodes()[0]};
    broken.edge_kinds = {rtl::EdgeKind::Continuous};
    CHECK_FALSE(check_propagation(broken, fan));
}

TEST_CASE("chain response parsing") {
    auto r = parse_chain_response("\n  NEXT: sub.go\nextra");
    REQUIRE(r.has_value());
    CHECK(r->first == "sub");
    CHECK(r->second == "go");
    CHECK_FALSE(parse_chain_response("(end)").has_value());
    for (auto bad : {"", "NEXT: go", "NEXT: a.b.c", "NEXT: 1a.b", "next: a.b", "The next one is a.b"})
        CHECK(code_of([&] { parse_chain_response(bad); }) == ErrorCode::UnparseableResponse);
}

TEST_CASE("model-built chains follow the graph or diverge") {
    auto d = rtl::parse_design({{"top.v", kTop}, {"sub.v", kSub}});
    auto g = rtl::build_connectivity(d);
    auto backend = std::make_shared<ScriptedBackend>();
    backend->next = {{"top.en", "NEXT: sub.go"},
                     {"sub.go", "Reasoning first.\nNEXT: sub.cnt"},
                     {"sub.cnt", "NEXT: sub.busy"},
                     {"sub.busy", "NEXT: top.busy"},
                     {"top.busy", "NEXT: top.done"}};
    auto session = llm::open_session(llm::SessionMode::Live, {}, backend);
    auto origin = ref_of(d, "en");

    // "Reasoning first." is the first non-blank line, so that answer is unparseable
    CHECK(code_of([&] { llm_chain(d, g, origin, session); }) == ErrorCode::UnparseableResponse);

    backend->next["sub.go"] = "NEXT: sub.cnt";
    auto c = llm_chain(d, g, origin, session);
    CHECK(c.links.size() == 5);
    CHECK(c.links.back().hierarchical_name("top") == "top.done");
    CHECK_FALSE(c.truncated);
    CHECK(check_propagation(c, g));
    CHECK(c.edge_kinds.front() == rtl::EdgeKind::PortBinding);

    auto short_chain = llm_chain(d, g, origin, session, 2);
    CHECK(short_chain.links.size() == 2);
    CHECK(short_chain.truncated);

    backend->next["sub.cnt"] = "NEXT: top.done";
    try {
        llm_chain(d, g, origin, session);
        FAIL("expected divergence");
    }
    catch (const ChainDivergenceError& e) {
        CHECK(e.code() == ErrorCode::ChainDivergence);
        CHECK(e.chain().links.size() == 3);
        CHECK_FALSE(check_propagation(e.chain(), g));
    }

    backend->next["sub.cnt"] = "NEXT: sub.cnt";
    CHECK(code_of([&] { llm_chain(d, g, origin, session); }) == ErrorCode::ChainDivergence);

    auto prompt = build_chain_prompt(d, c, {});
    CHECK(prompt.stage_tag == llm::StageTag::Chain);
    CHECK(prompt.user_text.find("Source of module top:") != std::string::npos);
    CHECK(prompt.user_text.find("NEXT: <module>.<signal>") != std::string::npos);
}

TEST_CASE("compact chain records round trip through the signal table") {
    auto d = rtl::parse_design({{"top.v", kTop}, {"sub.v", kSub}});
    auto g = rtl::build_connectivity(d);
    auto res = extract_chains(g, ref_of(d, "en"));
    SignalTable table;
    Json records = Json::array();
    for (auto c : res.chains) {
        c.chain_id = "en#" + std::to_string(records.size());
        collect_signals(c, "top", table);
        records.push_back(to_json(c, "top"));
    }
    auto table_back = signal_table_from_json(to_json(table));
    CHECK(table_back.size() == table.size());
    for (std::size_t i = 0; i < res.chains.size(); ++i) {
        auto back = chain_from_json(records[i], table_back);
        CHECK(back.nodes() == res.chains[i].nodes());
        CHECK(back.edge_kinds == res.chains[i].edge_kinds);
        CHECK(back.truncated == res.chains[i].truncated);
        CHECK(back.origin.decl_span == res.chains[i].origin.decl_span);
    }
    auto bad = records[0];
    bad["nodes"].push_back("top.nowhere");
    CHECK(code_of([&] { chain_from_json(bad, table_back); }) == ErrorCode::SchemaMismatch);
    bad["nodes"] = Json::array();
    CHECK(code_of([&] { chain_from_json(bad, table_back); }) == ErrorCode::SchemaMismatch);
}
