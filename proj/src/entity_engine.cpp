#include "assertgen/entity_engine.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <regex>

#include "assertgen/error.hpp"

namespace assertgen::entity {

namespace {

const std::regex& identifier_re() {
    static const std::regex re(R"([A-Za-z_][A-Za-z0-9_]*(\[[0-9]+(:[0-9]+)?\])?)");
    return re;
}

std::string first_line(std::string_view text) {
    auto nl = text.find('\n');
    std::string line(text.substr(0, nl));
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    return line;
}

std::string excerpts(const std::vector<corpus::SpecChunk>& chunks) {
    std::string out;
    for (const auto& c : chunks) {
        out += "[" + c.chunk_id + "]\n";
        out += c.text;
        if (out.empty() || out.back() != '\n')
            out += '\n';
        out += '\n';
    }
    return out;
}

std::string join_surfaces(const EntitySet& set) {
    if (set.empty())
        return "(none)";
    std::string out;
    for (const auto& e : set) {
        if (!out.empty())
            out += ", ";
        out += e.canonical;
    }
    return out;
}

const char* kSystemText =
    "You are a hardware verification engineer. You read design specification excerpts and "
    "identify entities: signals, register bits and registers that carry behavioral meaning.";

} // namespace

bool is_entity_identifier(std::string_view text) {
    return std::regex_match(text.begin(), text.end(), identifier_re());
}

EntityName normalize_entity(std::string_view raw) {
    std::string s = trim(raw);
    if (s.empty())
        fail(ErrorCode::EmptyEntity, "entity name is empty");
    EntityName name;
    name.surface = s;
    if (!s.empty() && s.back() == ']') {
        auto open = s.rfind('[');
        if (open != std::string::npos && open > 0) {
            auto inner = std::string_view(s).substr(open + 1, s.size() - open - 2);
            auto colon = inner.find(':');
            auto digits = [](std::string_view d) {
                return !d.empty() &&
                       std::all_of(d.begin(), d.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
            };
            bool ok = colon == std::string_view::npos
                          ? digits(inner)
                          : digits(inner.substr(0, colon)) && digits(inner.substr(colon + 1));
            if (ok)
                s = trim(std::string_view(s).substr(0, open));
        }
    }
    for (auto& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s.empty())
        fail(ErrorCode::EmptyEntity, "entity name '" + name.surface + "' is empty after canonicalization");
    if (std::any_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }))
        fail(ErrorCode::PreconditionViolation, "entity name '" + name.surface + "' contains whitespace");
    name.canonical = std::move(s);
    return name;
}

EntitySet finalize_context(const EntitySet& e_target, const EntitySet& e_context) {
    EntitySet overlap;
    std::set_intersection(e_target.begin(), e_target.end(), e_context.begin(), e_context.end(),
                          std::inserter(overlap, overlap.end()));
    EntitySet out;
    std::set_difference(e_context.begin(), e_context.end(), overlap.begin(), overlap.end(),
                        std::inserter(out, out.end()));
    return out;
}

std::vector<EntityName> parse_entity_response(std::string_view text, std::string_view header) {
    const std::string line = first_line(text);
    const std::string prefix = std::string(header) + ": ";
    if (line.rfind(prefix, 0) != 0)
        fail(ErrorCode::UnparseableResponse,
             "expected a line starting with '" + prefix + "', got '" + line + "'");
    const std::string rest = trim(std::string_view(line).substr(prefix.size()));
    std::vector<EntityName> out;
    if (rest == "(none)")
        return out;
    std::size_t pos = 0;
    while (pos <= rest.size()) {
        auto comma = rest.find(',', pos);
        auto item = trim(std::string_view(rest).substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (!is_entity_identifier(item))
            fail(ErrorCode::UnparseableResponse, "'" + item + "' is not an identifier");
        out.push_back(normalize_entity(item));
        if (comma == std::string::npos)
            break;
        pos = comma + 1;
    }
    return out;
}

llm::PromptRequest build_target_prompt(const EntityName& signal,
                                       const std::vector<corpus::SpecChunk>& chunks,
                                       const llm::GenerationParams& params) {
    std::string user;
    user += "Target signal: " + signal.canonical + "\n\n";
    user += "Specification excerpts:\n\n" + excerpts(chunks);
    user += "Task: list the entities (signals, bits, registers) that directly describe the target "
            "signal, including the target itself.\n";
    user += "Answer with exactly one line:\n";
    user += "TARGET: <name>, <name>, ...\n";
    user += "or, if nothing qualifies:\n";
    user += "TARGET: (none)\n";
    return llm::make_request(llm::StageTag::EntityTarget, kSystemText, std::move(user), params);
}

llm::PromptRequest build_context_prompt(const EntityName& signal,
                                        const std::vector<corpus::SpecChunk>& chunks,
                                        const EntitySet& e_target,
                                        const llm::GenerationParams& params) {
    std::string user;
    user += "Target signal: " + signal.canonical + "\n";
    user += "Entities describing the target: " + join_surfaces(e_target) + "\n\n";
    user += "Specification excerpts:\n\n" + excerpts(chunks);
    user += "Task: list every entity (signal, bit, register) that the excerpts associate with the "
            "target signal's behavior, including entities that influence it or that it influences.\n";
    user += "Answer with exactly one line:\n";
    user += "CONTEXT: <name>, <name>, ...\n";
    user += "or, if nothing qualifies:\n";
    user += "CONTEXT: (none)\n";
    return llm::make_request(llm::StageTag::EntityContext, kSystemText, std::move(user), params);
}

EntitySets extract_entities(const EntityName& signal, const std::vector<corpus::SpecChunk>& chunks,
                            const llm::Session& session, const llm::GenerationParams& params) {
    if (chunks.empty())
        fail(ErrorCode::PreconditionViolation, "extract_entities needs at least one chunk");
    EntitySets sets;
    sets.target_signal = signal;
    for (const auto& c : chunks)
        sets.source_chunk_ids.push_back(c.chunk_id);

    auto target = session.complete(build_target_prompt(signal, chunks, params));
    for (auto& e : parse_entity_response(target.response_text, "TARGET"))
        sets.e_target.insert(std::move(e));

    auto context = session.complete(build_context_prompt(signal, chunks, sets.e_target, params));
    for (auto& e : parse_entity_response(context.response_text, "CONTEXT"))
        sets.e_context.insert(std::move(e));

    sets.e_final = finalize_context(sets.e_target, sets.e_context);
    return sets;
}

ExpansionResult expand_worklist(const EntityName& seed, const retrieval::Index& index,
                                const llm::Session& session, const ExpansionOptions& options) {
    if (options.max_rounds == 0)
        fail(ErrorCode::PreconditionViolation, "max_rounds must be at least 1");
    if (seed.canonical.empty() || normalize_entity(seed.canonical).canonical != seed.canonical)
        fail(ErrorCode::PreconditionViolation, "seed '" + seed.surface + "' is not canonical");

    ExpansionResult result;
    result.seed = seed;
    std::deque<EntityName> worklist{seed};
    EntitySet seen{seed};

    while (!worklist.empty()) {
        if (result.iterations == options.max_rounds) {
            result.round_limit_exceeded = true;
            result.pending.assign(worklist.begin(), worklist.end());
            result.warnings.push_back("RoundLimitExceeded: stopped after " +
                                      std::to_string(options.max_rounds) + " rounds with " +
                                      std::to_string(worklist.size()) + " entities queued");
            break;
        }
        EntityName current = worklist.front();
        worklist.pop_front();
        result.visited.insert(current);
        ++result.iterations;

        auto ranked = retrieval::retrieve(index, retrieval::make_query(current.canonical), options.k);
        std::vector<corpus::SpecChunk> chunks;
        for (auto& r : ranked) {
            result.accumulated_chunks.insert(r.chunk.chunk_id);
            chunks.push_back(std::move(r.chunk));
        }

        EntitySets sets;
        if (chunks.empty()) {
            sets.target_signal = current;
            result.warnings.push_back("no chunks retrieved for '" + current.canonical + "'");
        }
        else {
            sets = extract_entities(current, chunks, session, options.generation);
        }
        for (const auto& e : sets.e_final)
            if (seen.insert(e).second)
                worklist.push_back(e);
        result.rounds.push_back(std::move(sets));
    }
    return result;
}

// ---------------------------------------------------------------------------
// JSON

Json to_json(const EntityName& name) {
    return Json{{"canonical", name.canonical}, {"surface", name.surface}};
}

EntityName entity_name_from_json(const Json& j) {
    return {j.at("canonical").get<std::string>(), j.at("surface").get<std::string>()};
}

namespace {
Json set_to_json(const EntitySet& set) {
    Json a = Json::array();
    for (const auto& e : set)
        a.push_back(to_json(e));
    return a;
}
EntitySet set_from_json(const Json& j) {
    EntitySet s;
    for (const auto& e : j)
        s.insert(entity_name_from_json(e));
    return s;
}
} // namespace

Json to_json(const EntitySets& sets) {
    return Json{{"target_signal", to_json(sets.target_signal)},
                {"e_target", set_to_json(sets.e_target)},
                {"e_context", set_to_json(sets.e_context)},
                {"e_final", set_to_json(sets.e_final)},
                {"source_chunk_ids", sets.source_chunk_ids}};
}

Json to_json(const ExpansionResult& result) {
    Json rounds = Json::array();
    for (const auto& r : result.rounds)
        rounds.push_back(to_json(r));
    Json pending = Json::array();
    for (const auto& p : result.pending)
        pending.push_back(to_json(p));
    return Json{{"seed", to_json(result.seed)},
                {"visited", set_to_json(result.visited)},
                {"rounds", rounds},
                {"accumulated_chunks", result.accumulated_chunks},
                {"iterations", result.iterations},
                {"round_limit_exceeded", result.round_limit_exceeded},
                {"pending", pending},
                {"warnings", result.warnings}};
}

ExpansionResult expansion_from_json(const Json& j) {
    ExpansionResult r;
    r.seed = entity_name_from_json(j.at("seed"));
    r.visited = set_from_json(j.at("visited"));
    for (const auto& round : j.at("rounds")) {
        EntitySets s;
        s.target_signal = entity_name_from_json(round.at("target_signal"));
        s.e_target = set_from_json(round.at("e_target"));
        s.e_context = set_from_json(round.at("e_context"));
        s.e_final = set_from_json(round.at("e_final"));
        s.source_chunk_ids = round.at("source_chunk_ids").get<std::vector<std::string>>();
        r.rounds.push_back(std::move(s));
    }
    r.accumulated_chunks = j.at("accumulated_chunks").get<std::set<std::string>>();
    r.iterations = j.at("iterations").get<std::size_t>();
    r.round_limit_exceeded = j.at("round_limit_exceeded").get<bool>();
    for (const auto& p : j.at("pending"))
        r.pending.push_back(entity_name_from_json(p));
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
}

} // namespace assertgen::entity
