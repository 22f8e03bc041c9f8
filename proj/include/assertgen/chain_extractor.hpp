// Cross-layer signal chains over the connectivity graph.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "assertgen/error.hpp"
#include "assertgen/llm_gateway.hpp"
#include "assertgen/rtl/design.hpp"

namespace assertgen::chain {

struct SignalChain {
    std::string chain_id; // assigned by the caller, empty until then
    rtl::SignalRef origin;
    std::vector<rtl::SignalRef> links;
    std::vector<rtl::EdgeKind> edge_kinds; // edge_kinds[i] is the kind of the edge into links[i]
    bool truncated = false;

    /// origin followed by links.
    std::vector<rtl::SignalRef> nodes() const;
};

struct ExtractOptions {
    std::size_t max_depth = 32;
    /// Enumeration stops after this many chains; `capped` is then set.
    std::size_t max_chains = 100000;
};

struct ExtractResult {
    std::vector<SignalChain> chains;
    bool capped = false;
};

/// All maximal simple forward paths from `origin`, ordered lexicographically by
/// node sequence. A path is truncated when its last node has an edge back into
/// the path or when it reaches max_depth links with unvisited successors left.
/// Throws OriginNotInGraph.
ExtractResult extract_chains(const rtl::SignalGraph& graph, const rtl::SignalRef& origin,
                             const ExtractOptions& options = {});

/// True iff every adjacent pair is an edge of the graph.
bool check_propagation(const SignalChain& chain, const rtl::SignalGraph& graph);

class ChainDivergenceError : public Error {
public:
    ChainDivergenceError(const std::string& message, SignalChain chain)
        : Error(ErrorCode::ChainDivergence, message), chain_(std::move(chain)) {}
    const SignalChain& chain() const { return chain_; }

private:
    SignalChain chain_;
};

llm::PromptRequest build_chain_prompt(const rtl::RtlDesign& design, const SignalChain& so_far,
                                      const llm::GenerationParams& params);

/// Parses "NEXT: <module>.<signal>" or "(end)" from the first non-blank line.
/// Returns nullopt for "(end)". Throws UnparseableResponse.
std::optional<std::pair<std::string, std::string>> parse_chain_response(std::string_view text);

/// Builds one chain by asking the model for the next derived signal until it
/// answers "(end)" or max_depth links exist. Throws ChainDivergenceError when
/// the answered chain is not a path of `graph`.
SignalChain llm_chain(const rtl::RtlDesign& design, const rtl::SignalGraph& graph, const rtl::SignalRef& origin,
                      const llm::Session& session, std::size_t max_depth = 32,
                      const llm::GenerationParams& params = {});

/// Hierarchical name -> signal, shared by every chain record of an artifact.
using SignalTable = std::map<std::string, rtl::SignalRef>;

/// Compact record: node names only; the refs live in a SignalTable.
Json to_json(const SignalChain& chain, const std::string& root);
/// Adds every node of `chain` to `table`.
void collect_signals(const SignalChain& chain, const std::string& root, SignalTable& table);
Json to_json(const SignalTable& table);
SignalTable signal_table_from_json(const Json& j);
/// Throws SchemaMismatch, also for node names missing from `table`.
SignalChain chain_from_json(const Json& j, const SignalTable& table);

} // namespace assertgen::chain
