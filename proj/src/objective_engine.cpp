#include "assertgen/objective_engine.hpp"

#include <algorithm>

#include "assertgen/error.hpp"

namespace assertgen::objective {

namespace {

constexpr std::string_view kSystemText =
    "You are a hardware verification engineer. You read design specifications and state "
    "checkable verification objectives for RTL signals.";

constexpr std::string_view kObj = "OBJ:";
constexpr std::string_view kSignals = "| SIGNALS:";

bool starts_with(std::string_view s, std::string_view p) {
    return s.substr(0, p.size()) == p;
}

std::vector<EntityName> parse_signal_list(std::string_view list, std::string_view line) {
    std::vector<EntityName> out;
    std::string trimmed = trim(std::string(list));
    if (trimmed.empty() || trimmed == "(none)")
        return out;
    std::size_t pos = 0;
    while (pos <= trimmed.size()) {
        auto comma = trimmed.find(',', pos);
        std::string item = trim(trimmed.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (!entity::is_entity_identifier(item))
            fail(ErrorCode::UnparseableResponse,
                 "'" + item + "' is not a signal name in objective line: " + std::string(line));
        auto name = entity::normalize_entity(item);
        if (std::find(out.begin(), out.end(), name) == out.end())
            out.push_back(std::move(name));
        if (comma == std::string::npos)
            break;
        pos = comma + 1;
    }
    return out;
}

} // namespace

std::string_view to_string(LayerTag tag) {
    return tag == LayerTag::TopLevel ? "top_level" : "sub_level";
}

LayerTag layer_tag_from_string(std::string_view text) {
    if (text == "top_level")
        return LayerTag::TopLevel;
    if (text == "sub_level")
        return LayerTag::SubLevel;
    fail(ErrorCode::SchemaMismatch, "unknown layer tag '" + std::string(text) + "'");
}

std::vector<ParsedObjective> parse_objective_response(std::string_view text) {
    std::vector<ParsedObjective> out;
    bool saw_none = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        std::string line = trim(std::string(text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos)));
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        if (line.empty() || starts_with(line, "THINK:"))
            continue;
        if (line == "(none)") {
            saw_none = true;
            continue;
        }
        if (!starts_with(line, kObj))
            fail(ErrorCode::UnparseableResponse, "expected 'OBJ: ... | SIGNALS: ...', got: " + line);
        auto bar = line.rfind(kSignals);
        if (bar == std::string::npos)
            fail(ErrorCode::UnparseableResponse, "objective line has no SIGNALS field: " + line);
        ParsedObjective obj;
        obj.statement = trim(line.substr(kObj.size(), bar - kObj.size()));
        if (obj.statement.empty())
            fail(ErrorCode::UnparseableResponse, "objective line has an empty statement: " + line);
        obj.signals = parse_signal_list(std::string_view(line).substr(bar + kSignals.size()), line);
        out.push_back(std::move(obj));
    }
    if (out.empty()) {
        if (saw_none)
            fail(ErrorCode::NoObjectives, "the response lists no objectives");
        fail(ErrorCode::UnparseableResponse, "the response contains no objective lines");
    }
    if (saw_none)
        fail(ErrorCode::UnparseableResponse, "'(none)' mixed with objective lines");
    return out;
}

std::string concatenate_chunks(const std::vector<corpus::SpecChunk>& chunks, std::size_t budget,
                               std::set<std::string>* used) {
    std::string out;
    for (const auto& c : chunks) {
        if (out.size() >= budget)
            break;
        std::string block = "[" + c.chunk_id + "]\n" + c.text + "\n\n";
        out += block.substr(0, budget - out.size());
        if (used)
            used->insert(c.chunk_id);
    }
    return out;
}

llm::PromptRequest build_objective_prompt(const EntityName& signal, const std::string& context,
                                          const llm::GenerationParams& params) {
    std::string user;
    user += "Target signal: " + signal.canonical + "\n\n";
    user += "Specification excerpts:\n\n" + context;
    user += "Work through the following before answering:\n";
    user += "1. What the excerpts say about the signal's function, including any timing or waveform "
            "descriptions.\n";
    user += "2. Structural facts: which module drives it, which module consumes it, and whether it "
            "crosses from the top-level module into a sub-module.\n";
    user += "3. Temporal dependencies on other signals that are implied but not stated outright.\n";
    user += "You may write reasoning lines starting with \"THINK:\".\n";
    user += "Then give each verification objective on its own line:\n";
    user += "OBJ: <objective> | SIGNALS: <signal>, <signal>, ...\n";
    user += "If the excerpts support no objective, answer with the single line:\n";
    user += "(none)\n";
    return llm::make_request(llm::StageTag::Objective, std::string(kSystemText), std::move(user), params);
}

std::vector<VerificationObjective> generate_objectives(const EntityName& signal,
                                                       const std::vector<corpus::SpecChunk>& chunks,
                                                       const llm::Session& session,
                                                       const ObjectiveOptions& options) {
    if (chunks.empty())
        fail(ErrorCode::PreconditionViolation, "generate_objectives needs at least one chunk");
    std::set<std::string> used;
    auto context = concatenate_chunks(chunks, options.context_budget, &used);
    auto exchange = session.complete(build_objective_prompt(signal, context, options.generation));
    auto parsed = parse_objective_response(exchange.response_text);

    std::vector<VerificationObjective> out;
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        VerificationObjective obj;
        obj.objective_id = signal.canonical + ":" + std::to_string(i + 1);
        obj.target_signal = signal;
        obj.statement = std::move(parsed[i].statement);
        obj.involved_signals = std::move(parsed[i].signals);
        if (std::find(obj.involved_signals.begin(), obj.involved_signals.end(), signal) ==
            obj.involved_signals.end())
            obj.involved_signals.push_back(signal);
        obj.provenance_chunk_ids = used;
        out.push_back(std::move(obj));
    }
    return out;
}

std::set<LayerTag> classify_layers(const VerificationObjective& objective, const rtl::RtlDesign& design) {
    std::set<LayerTag> tags;
    bool any = false;
    for (const auto& s : objective.involved_signals) {
        rtl::SignalLocation loc;
        try {
            loc = rtl::locate_signal(design, s.canonical);
        }
        catch (const Error& e) {
            if (e.code() != ErrorCode::SignalNotFound)
                throw;
            continue;
        }
        any = true;
        bool in_root = std::any_of(loc.refs.begin(), loc.refs.end(),
                                   [](const rtl::SignalRef& r) { return r.module_path.empty(); });
        tags.insert(in_root ? LayerTag::TopLevel : LayerTag::SubLevel);
    }
    if (!any)
        fail(ErrorCode::UnresolvedSignals,
             "no signal of objective " + objective.objective_id + " is declared in the design");
    return tags;
}

Json to_json(const VerificationObjective& o) {
    Json involved = Json::array();
    for (const auto& s : o.involved_signals)
        involved.push_back(entity::to_json(s));
    Json tags = Json::array();
    for (auto t : o.layer_tags)
        tags.push_back(to_string(t));
    return Json{{"objective_id", o.objective_id},
                {"target_signal", entity::to_json(o.target_signal)},
                {"statement", o.statement},
                {"involved_signals", involved},
                {"layer_tags", tags},
                {"provenance_chunk_ids", o.provenance_chunk_ids},
                {"resolved", o.resolved}};
}

VerificationObjective objective_from_json(const Json& j) {
    try {
        VerificationObjective o;
        o.objective_id = j.at("objective_id").get<std::string>();
        o.target_signal = entity::entity_name_from_json(j.at("target_signal"));
        o.statement = j.at("statement").get<std::string>();
        for (const auto& s : j.at("involved_signals"))
            o.involved_signals.push_back(entity::entity_name_from_json(s));
        for (const auto& t : j.at("layer_tags"))
            o.layer_tags.insert(layer_tag_from_string(t.get<std::string>()));
        o.provenance_chunk_ids = j.at("provenance_chunk_ids").get<std::set<std::string>>();
        o.resolved = j.value("resolved", true);
        return o;
    }
    catch (const Json::exception& e) {
        fail(ErrorCode::SchemaMismatch, std::string("objective record: ") + e.what());
    }
}

} // namespace assertgen::objective
