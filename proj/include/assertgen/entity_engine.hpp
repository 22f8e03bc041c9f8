// Contextual entity extraction and worklist expansion over the spec corpus.
#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "assertgen/io.hpp"
#include "assertgen/llm_gateway.hpp"
#include "assertgen/retriever.hpp"
#include "assertgen/spec_corpus.hpp"

namespace assertgen::entity {

/// A signal, bit or register name. Identity is the canonical form.
struct EntityName {
    std::string canonical;
    std::string surface;

    friend bool operator==(const EntityName& a, const EntityName& b) {
        return a.canonical == b.canonical;
    }
    friend auto operator<=>(const EntityName& a, const EntityName& b) {
        return a.canonical <=> b.canonical;
    }
};

using EntitySet = std::set<EntityName>;

/// Trims, lowercases, and strips one trailing "[i]" or "[msb:lsb]".
/// Throws EmptyEntity.
EntityName normalize_entity(std::string_view raw);

/// Identifier grammar for entity lists: [A-Za-z_][A-Za-z0-9_]*(\[[0-9]+(:[0-9]+)?\])?
bool is_entity_identifier(std::string_view text);

struct EntitySets {
    EntityName target_signal;
    EntitySet e_target;
    EntitySet e_context;
    EntitySet e_final;
    /// Retrieved chunk ids in rank order.
    std::vector<std::string> source_chunk_ids;
};

/// e_context minus (e_target ∩ e_context).
EntitySet finalize_context(const EntitySet& e_target, const EntitySet& e_context);

/// Parses the first line of a response as "<header>: a, b[3], ..." or
/// "<header>: (none)". Throws UnparseableResponse.
std::vector<EntityName> parse_entity_response(std::string_view text, std::string_view header);

llm::PromptRequest build_target_prompt(const EntityName& signal,
                                       const std::vector<corpus::SpecChunk>& chunks,
                                       const llm::GenerationParams& params);
llm::PromptRequest build_context_prompt(const EntityName& signal,
                                        const std::vector<corpus::SpecChunk>& chunks,
                                        const EntitySet& e_target,
                                        const llm::GenerationParams& params);

EntitySets extract_entities(const EntityName& signal, const std::vector<corpus::SpecChunk>& chunks,
                            const llm::Session& session, const llm::GenerationParams& params = {});

struct ExpansionOptions {
    std::size_t max_rounds = 64;
    std::size_t k = 5;
    llm::GenerationParams generation;
};

struct ExpansionResult {
    EntityName seed;
    EntitySet visited;
    std::vector<EntitySets> rounds;
    std::set<std::string> accumulated_chunks;
    std::size_t iterations = 0;
    /// Set when max_rounds stopped the expansion with work still queued.
    bool round_limit_exceeded = false;
    std::vector<EntityName> pending;
    std::vector<std::string> warnings;
};

/// FIFO worklist seeded with `seed`; each round retrieves chunks for one
/// entity, extracts its entity sets and enqueues unseen members of e_final.
ExpansionResult expand_worklist(const EntityName& seed, const retrieval::Index& index,
                                const llm::Session& session, const ExpansionOptions& options = {});

Json to_json(const EntityName& name);
EntityName entity_name_from_json(const Json& j);
Json to_json(const EntitySets& sets);
Json to_json(const ExpansionResult& result);
ExpansionResult expansion_from_json(const Json& j);

} // namespace assertgen::entity
