#include "assertgen/chain_extractor.hpp"

#include <algorithm>
#include <cctype>

namespace assertgen::chain {

namespace {

constexpr std::string_view kSystemText =
    "You are a hardware design engineer tracing how a signal propagates through Verilog modules.";

std::string lower(std::string s) {
    for (auto& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

struct Walker {
    const rtl::SignalGraph& g;
    const ExtractOptions& opt;
    ExtractResult& out;
    std::vector<std::size_t> path;
    std::vector<bool> on_path;

    void emit(bool truncated) {
        SignalChain c;
        c.origin = g.nodes()[path.front()];
        for (std::size_t i = 1; i < path.size(); ++i) {
            c.links.push_back(g.nodes()[path[i]]);
            c.edge_kinds.push_back(*g.edge_kind(path[i - 1], path[i]));
        }
        c.truncated = truncated;
        out.chains.push_back(std::move(c));
    }

    void visit(std::size_t u) {
        if (out.capped)
            return;
        bool fresh = false, back = false;
        for (auto v : g.successors(u))
            (on_path[v] ? back : fresh) = true;
        if (!fresh || path.size() - 1 >= opt.max_depth) {
            if (out.chains.size() >= opt.max_chains) {
                out.capped = true;
                return;
            }
            emit(back || fresh);
            return;
        }
        for (auto v : g.successors(u)) {
            if (on_path[v])
                continue;
            path.push_back(v);
            on_path[v] = true;
            visit(v);
            on_path[v] = false;
            path.pop_back();
        }
    }
};

std::string qualified(const rtl::SignalRef& r) {
    return r.module + "." + r.signal;
}

} // namespace

std::vector<rtl::SignalRef> SignalChain::nodes() const {
    std::vector<rtl::SignalRef> out{origin};
    out.insert(out.end(), links.begin(), links.end());
    return out;
}

ExtractResult extract_chains(const rtl::SignalGraph& graph, const rtl::SignalRef& origin,
                             const ExtractOptions& options) {
    if (options.max_depth == 0)
        fail(ErrorCode::PreconditionViolation, "max_depth must be at least 1");
    auto start = graph.find(origin);
    if (!start)
        fail(ErrorCode::OriginNotInGraph, "signal '" + qualified(origin) + "' is not a node of the graph");
    ExtractResult out;
    Walker w{graph, options, out, {*start}, std::vector<bool>(graph.nodes().size(), false)};
    w.on_path[*start] = true;
    w.visit(*start);
    return out;
}

bool check_propagation(const SignalChain& chain, const rtl::SignalGraph& graph) {
    auto nodes = chain.nodes();
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        auto a = graph.find(nodes[i - 1]);
        auto b = graph.find(nodes[i]);
        if (!a || !b || !graph.has_edge(*a, *b))
            return false;
    }
    return true;
}

llm::PromptRequest build_chain_prompt(const rtl::RtlDesign& design, const SignalChain& so_far,
                                      const llm::GenerationParams& params) {
    auto nodes = so_far.nodes();
    const auto& current = nodes.back();
    const auto& def = design.module(current.module);
    std::string user;
    user += "Design root module: " + design.root_module() + "\n";
    user += "Chain so far:";
    for (const auto& n : nodes)
        user += " " + qualified(n);
    user += "\n";
    user += "Current signal: " + qualified(current) + " (instance path: " +
            current.hierarchical_name(design.root_module()) + ")\n\n";
    user += "Source of module " + def.name + ":\n" + design.slice(def.source_span) + "\n";
    user += "Step by step: find where the current signal is read, which signal is assigned from it "
            "or which sub-module port it is bound to, and continue the chain by one signal.\n";
    user += "Answer with exactly one line:\n";
    user += "NEXT: <module>.<signal>\n";
    user += "or, when the signal drives nothing further:\n";
    user += "(end)\n";
    return llm::make_request(llm::StageTag::Chain, std::string(kSystemText), std::move(user), params);
}

std::optional<std::pair<std::string, std::string>> parse_chain_response(std::string_view text) {
    std::string line;
    std::size_t pos = 0;
    while (pos < text.size() && line.empty()) {
        auto nl = text.find('\n', pos);
        line = trim(std::string(text.substr(pos, nl == text.npos ? text.npos : nl - pos)));
        pos = nl == text.npos ? text.size() : nl + 1;
    }
    if (line == "(end)")
        return std::nullopt;
    if (line.rfind("NEXT:", 0) != 0)
        fail(ErrorCode::UnparseableResponse, "expected 'NEXT: <module>.<signal>' or '(end)', got: " + line);
    std::string q = trim(line.substr(5));
    auto dot = q.find('.');
    auto ident = [](const std::string& s) {
        if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
            return false;
        return std::all_of(s.begin(), s.end(),
                           [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
    };
    if (dot == std::string::npos || !ident(q.substr(0, dot)) || !ident(q.substr(dot + 1)))
        fail(ErrorCode::UnparseableResponse, "'" + q + "' is not <module>.<signal>");
    return std::make_pair(q.substr(0, dot), q.substr(dot + 1));
}

SignalChain llm_chain(const rtl::RtlDesign& design, const rtl::SignalGraph& graph, const rtl::SignalRef& origin,
                      const llm::Session& session, std::size_t max_depth, const llm::GenerationParams& params) {
    auto start = graph.find(origin);
    if (!start)
        fail(ErrorCode::OriginNotInGraph, "signal '" + qualified(origin) + "' is not a node of the graph");
    SignalChain chain;
    chain.origin = graph.nodes()[*start];
    std::size_t current = *start;
    while (true) {
        if (chain.links.size() >= max_depth) {
            chain.truncated = true;
            break;
        }
        auto answer = parse_chain_response(session.complete(build_chain_prompt(design, chain, params)).response_text);
        if (!answer)
            break;
        const auto& [module, signal] = *answer;
        // prefer a graph successor; otherwise any declaration with that name
        std::optional<std::size_t> next;
        for (auto v : graph.successors(current)) {
            const auto& n = graph.nodes()[v];
            if (n.module == module && lower(n.signal) == lower(signal)) {
                next = v;
                break;
            }
        }
        rtl::SignalRef ref;
        if (next) {
            ref = graph.nodes()[*next];
        }
        else {
            for (std::size_t i = 0; i < graph.nodes().size() && !next; ++i) {
                const auto& n = graph.nodes()[i];
                if (n.module == module && lower(n.signal) == lower(signal))
                    next = i;
            }
            if (next)
                ref = graph.nodes()[*next];
            else
                ref = {{}, module, signal, {}};
        }
        auto prior = chain.nodes();
        bool repeat = std::find(prior.begin(), prior.end(), ref) != prior.end();
        chain.links.push_back(ref);
        auto kind = next ? graph.edge_kind(current, *next) : std::nullopt;
        chain.edge_kinds.push_back(kind.value_or(rtl::EdgeKind::Continuous));
        if (repeat)
            throw ChainDivergenceError("chain revisits " + qualified(ref), chain);
        if (!kind)
            throw ChainDivergenceError("no derivation edge from " + qualified(graph.nodes()[current]) + " to " +
                                           qualified(ref),
                                       chain);
        current = *next;
    }
    if (!check_propagation(chain, graph))
        throw ChainDivergenceError("chain fails the propagation check", chain);
    return chain;
}

Json to_json(const SignalChain& c, const std::string& root) {
    Json nodes = Json::array();
    for (const auto& n : c.nodes())
        nodes.push_back(n.hierarchical_name(root));
    Json kinds = Json::array();
    for (auto k : c.edge_kinds)
        kinds.push_back(rtl::to_string(k));
    return Json{{"chain_id", c.chain_id}, {"nodes", nodes}, {"edge_kinds", kinds}, {"truncated", c.truncated}};
}

void collect_signals(const SignalChain& chain, const std::string& root, SignalTable& table) {
    for (const auto& n : chain.nodes())
        table.emplace(n.hierarchical_name(root), n);
}

Json to_json(const SignalTable& table) {
    Json out = Json::object();
    for (const auto& [name, ref] : table)
        out[name] = rtl::to_json(ref);
    return out;
}

SignalTable signal_table_from_json(const Json& j) {
    try {
        SignalTable out;
        for (const auto& [name, ref] : j.items())
            out.emplace(name, rtl::signal_ref_from_json(ref));
        return out;
    }
    catch (const Json::exception& e) {
        fail(ErrorCode::SchemaMismatch, std::string("signal table: ") + e.what());
    }
}

SignalChain chain_from_json(const Json& j, const SignalTable& table) {
    try {
        SignalChain c;
        c.chain_id = j.at("chain_id").get<std::string>();
        std::vector<rtl::SignalRef> nodes;
        for (const auto& n : j.at("nodes")) {
            auto name = n.get<std::string>();
            auto it = table.find(name);
            if (it == table.end())
                fail(ErrorCode::SchemaMismatch, "chain " + c.chain_id + ": unknown signal '" + name + "'");
            nodes.push_back(it->second);
        }
        if (nodes.empty())
            fail(ErrorCode::SchemaMismatch, "chain " + c.chain_id + " has no nodes");
        c.origin = nodes.front();
        c.links.assign(nodes.begin() + 1, nodes.end());
        for (const auto& k : j.at("edge_kinds")) {
            auto s = k.get<std::string>();
            if (s == "continuous")
                c.edge_kinds.push_back(rtl::EdgeKind::Continuous);
            else if (s == "procedural")
                c.edge_kinds.push_back(rtl::EdgeKind::Procedural);
            else if (s == "port_binding")
                c.edge_kinds.push_back(rtl::EdgeKind::PortBinding);
            else
                fail(ErrorCode::SchemaMismatch, "unknown edge kind '" + s + "'");
        }
        c.truncated = j.at("truncated").get<bool>();
        if (c.edge_kinds.size() != c.links.size())
            fail(ErrorCode::SchemaMismatch, "chain " + c.chain_id + ": edge_kinds and links differ in length");
        return c;
    }
    catch (const Json::exception& e) {
        fail(ErrorCode::SchemaMismatch, std::string("chain record: ") + e.what());
    }
}

} // namespace assertgen::chain
