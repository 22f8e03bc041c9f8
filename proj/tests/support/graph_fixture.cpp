#include "graph_fixture.hpp"

#include <fstream>

#include "assertgen/entity_engine.hpp"
#include "assertgen/llm_gateway.hpp"

namespace graphfix {

using namespace assertgen;

oracle::Adjacency EntityGraph::adjacency() const {
    oracle::Adjacency adj;
    for (std::size_t i = 0; i < names.size(); ++i) {
        auto& out = adj[names[i]];
        for (int j : succ[i])
            out.push_back(names[static_cast<std::size_t>(j)]);
    }
    return adj;
}

EntityGraph random_graph(std::mt19937& rng, int max_nodes) {
    EntityGraph g;
    int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_nodes));
    for (int i = 0; i < n; ++i)
        g.names.push_back("sig" + std::to_string(i));
    g.succ.resize(static_cast<std::size_t>(n));
    // sparse enough that some nodes stay unreachable
    double p = 1.5 / n;
    std::uniform_real_distribution<double> coin(0, 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (coin(rng) < p)
                g.succ[static_cast<std::size_t>(i)].push_back(j);
    return g;
}

std::vector<corpus::SpecChunk> graph_corpus(const EntityGraph& g) {
    std::vector<corpus::SpecChunk> out;
    for (std::size_t i = 0; i < g.names.size(); ++i) {
        corpus::SpecChunk c;
        c.doc_id = "graph";
        c.chunk_id = "graph#" + std::to_string(i);
        c.ordinal = i;
        c.text = g.names[i] + " is a control signal.";
        for (int j : g.succ[i])
            c.text += " It affects " + g.names[static_cast<std::size_t>(j)] + ".";
        c.char_span = {0, c.text.size()};
        out.push_back(std::move(c));
    }
    return out;
}

void write_fixtures(const EntityGraph& g, const retrieval::Index& index, std::size_t k,
                    const std::filesystem::path& fixture_path) {
    std::ofstream out(fixture_path, std::ios::binary | std::ios::trunc);
    llm::GenerationParams params;
    auto put = [&](const llm::PromptRequest& req, const std::string& response) {
        llm::FixtureEntry e{llm::hash_request(req), req, response};
        out << llm::fixture_line(e) << '\n';
    };
    for (std::size_t i = 0; i < g.names.size(); ++i) {
        auto name = entity::normalize_entity(g.names[i]);
        std::vector<corpus::SpecChunk> chunks;
        for (auto& r : retrieval::retrieve(index, retrieval::make_query(name.canonical), k))
            chunks.push_back(std::move(r.chunk));
        put(entity::build_target_prompt(name, chunks, params), "TARGET: " + name.surface);

        std::string context;
        for (int j : g.succ[i])
            context += (context.empty() ? "" : ", ") + g.names[static_cast<std::size_t>(j)];
        entity::EntitySet target{name};
        put(entity::build_context_prompt(name, chunks, target, params),
            "CONTEXT: " + (context.empty() ? std::string("(none)") : context));
    }
}

SignalGraphCase random_signal_graph(std::mt19937& rng, int max_nodes) {
    SignalGraphCase r;
    int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_nodes));
    for (int i = 0; i < n; ++i) {
        std::string name = (i < 10 ? "n0" : "n") + std::to_string(i);
        r.graph.add_node({{}, "m", name, {"m.v", i + 1, i + 1}});
    }
    r.adj.assign(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
    // about two successors per node keeps the path count small enough to enumerate
    double p = 2.0 / n;
    std::uniform_real_distribution<double> coin(0, 1);
    for (std::size_t i = 0; i < r.adj.size(); ++i)
        for (std::size_t j = 0; j < r.adj.size(); ++j)
            if (coin(rng) < p) {
                r.adj[i][j] = true;
                r.graph.add_edge(i, j, rtl::EdgeKind::Continuous, {"m.v", 1, 1});
            }
    return r;
}

std::vector<std::vector<bool>> adjacency_of(const rtl::SignalGraph& g) {
    std::vector<std::vector<bool>> adj(g.nodes().size(), std::vector<bool>(g.nodes().size(), false));
    for (const auto& e : g.edges())
        adj[e.from][e.to] = true;
    return adj;
}

} // namespace graphfix
