// Verification objective generation and layer classification.
#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "assertgen/entity_engine.hpp"
#include "assertgen/llm_gateway.hpp"
#include "assertgen/rtl/design.hpp"
#include "assertgen/spec_corpus.hpp"

namespace assertgen::objective {

using entity::EntityName;

enum class LayerTag { TopLevel, SubLevel };
std::string_view to_string(LayerTag tag);
LayerTag layer_tag_from_string(std::string_view text);

struct VerificationObjective {
    std::string objective_id; // "<target>:<ordinal>", ordinals from 1
    EntityName target_signal;
    std::string statement;
    std::vector<EntityName> involved_signals; // response order, no duplicates, target included
    std::set<LayerTag> layer_tags;
    std::set<std::string> provenance_chunk_ids;
    /// False when no involved signal exists in the design.
    bool resolved = true;
};

struct ObjectiveOptions {
    std::size_t context_budget = 6000;
    llm::GenerationParams generation;
};

struct ParsedObjective {
    std::string statement;
    std::vector<EntityName> signals;
};

/// Grammar, one objective per line:
///   OBJ: <statement> | SIGNALS: <name>, <name>, ...
/// Blank lines and lines starting with "THINK:" are ignored. A response made
/// only of "(none)" yields NoObjectives; anything else is UnparseableResponse.
std::vector<ParsedObjective> parse_objective_response(std::string_view text);

/// Chunk texts in the given (rank) order, cut at `budget` characters.
/// `used` receives the ids of chunks that contributed text.
std::string concatenate_chunks(const std::vector<corpus::SpecChunk>& chunks, std::size_t budget,
                               std::set<std::string>* used = nullptr);

llm::PromptRequest build_objective_prompt(const EntityName& signal, const std::string& context,
                                          const llm::GenerationParams& params);

std::vector<VerificationObjective> generate_objectives(const EntityName& signal,
                                                       const std::vector<corpus::SpecChunk>& chunks,
                                                       const llm::Session& session,
                                                       const ObjectiveOptions& options = {});

/// Throws UnresolvedSignals when no involved signal is declared anywhere.
std::set<LayerTag> classify_layers(const VerificationObjective& objective, const rtl::RtlDesign& design);

Json to_json(const VerificationObjective& objective);
VerificationObjective objective_from_json(const Json& j);

} // namespace assertgen::objective
