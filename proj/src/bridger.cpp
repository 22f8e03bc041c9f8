#include "assertgen/bridger.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "assertgen/error.hpp"

namespace assertgen::bridge {

namespace {

constexpr std::string_view kSystemText =
    "You are a hardware verification engineer locating the Verilog code that defines signals.";

EntityName name_of(const rtl::SignalRef& ref) {
    auto n = entity::normalize_entity(ref.signal);
    n.surface = ref.signal;
    return n;
}

std::string span_text(const rtl::LineSpan& s) {
    return s.file + ":" + std::to_string(s.first) + "-" + std::to_string(s.last);
}

} // namespace

std::string_view to_string(SegmentKind kind) {
    switch (kind) {
        case SegmentKind::Declaration: return "declaration";
        case SegmentKind::Assignment: return "assignment";
        case SegmentKind::Instantiation: return "instantiation";
        case SegmentKind::Port: return "port";
    }
    return "?";
}

SegmentKind segment_kind_from_string(std::string_view text) {
    for (auto k : {SegmentKind::Declaration, SegmentKind::Assignment, SegmentKind::Instantiation, SegmentKind::Port})
        if (to_string(k) == text)
            return k;
    fail(ErrorCode::SchemaMismatch, "unknown segment kind '" + std::string(text) + "'");
}

std::vector<CodeSegment> match_segments(const rtl::SignalRef& signal, const rtl::RtlDesign& design) {
    if (!design.has_module(signal.module))
        fail(ErrorCode::SignalNotFound, "module '" + signal.module + "' is not in the design");
    const auto& def = design.module(signal.module);
    if (!def.declares(signal.signal))
        fail(ErrorCode::SignalNotFound, "'" + signal.signal + "' is not declared in module " + def.name);
    const auto name = name_of(signal);
    std::vector<CodeSegment> out;
    auto add = [&](const rtl::LineSpan& span, SegmentKind kind) {
        out.push_back({span, def.name, {name}, kind});
    };
    if (const auto* p = def.find_port(signal.signal))
        add(p->span, SegmentKind::Port);
    else
        add(def.find_net(signal.signal)->span, SegmentKind::Declaration);
    for (const auto& a : def.assigns)
        if (a.lhs == signal.signal)
            add(a.kind == rtl::EdgeKind::Procedural ? a.block_span : a.span, SegmentKind::Assignment);
    for (const auto& inst : def.instances) {
        bool bound = std::any_of(inst.connections.begin(), inst.connections.end(), [&](const rtl::Connection& c) {
            return c.actual_signals.contains(signal.signal);
        });
        if (bound)
            add(inst.span, SegmentKind::Instantiation);
    }
    return normalize_segments(std::move(out));
}

std::vector<CodeSegment> normalize_segments(std::vector<CodeSegment> segments) {
    using Key = std::tuple<std::string, int, int, SegmentKind>;
    std::map<Key, CodeSegment> merged;
    for (auto& s : segments) {
        Key key{s.line_span.file, s.line_span.first, s.line_span.last, s.kind};
        auto it = merged.find(key);
        if (it == merged.end())
            merged.emplace(key, std::move(s));
        else
            it->second.matched_signals.insert(s.matched_signals.begin(), s.matched_signals.end());
    }
    std::vector<CodeSegment> out;
    for (auto& [k, s] : merged)
        out.push_back(std::move(s));
    return out;
}

std::vector<BridgeResult> bridge(const std::vector<objective::VerificationObjective>& objectives,
                                 const std::vector<chain::SignalChain>& chains, const rtl::RtlDesign& design) {
    std::vector<BridgeResult> out;
    for (const auto& obj : objectives) {
        BridgeResult r;
        r.objective_id = obj.objective_id;
        std::set<std::string> involved;
        for (const auto& s : obj.involved_signals)
            involved.insert(s.canonical);
        std::set<rtl::SignalRef> signals;
        for (const auto& c : chains) {
            if (!involved.contains(name_of(c.origin).canonical))
                continue;
            r.chains_used.push_back(c.chain_id);
            for (const auto& n : c.nodes())
                signals.insert(n);
        }
        std::vector<CodeSegment> all;
        for (const auto& s : signals) {
            auto segs = match_segments(s, design);
            all.insert(all.end(), segs.begin(), segs.end());
        }
        r.segments = normalize_segments(std::move(all));
        std::set<std::string> matched;
        for (const auto& seg : r.segments)
            for (const auto& m : seg.matched_signals)
                matched.insert(m.canonical);
        for (const auto& s : obj.involved_signals)
            if (!matched.contains(s.canonical))
                r.unresolved_signals.insert(s);
        out.push_back(std::move(r));
    }
    return out;
}

llm::PromptRequest build_bridge_prompt(const objective::VerificationObjective& objective,
                                       const std::vector<chain::SignalChain>& chains,
                                       const rtl::RtlDesign& design, const llm::GenerationParams& params) {
    std::string user;
    user += "Verification objective " + objective.objective_id + ": " + objective.statement + "\n\n";
    user += "Signal chains:\n";
    std::set<std::string> modules;
    for (const auto& c : chains) {
        user += "-";
        for (const auto& n : c.nodes()) {
            user += " " + n.hierarchical_name(design.root_module());
            modules.insert(n.module);
        }
        user += "\n";
    }
    user += "\n";
    for (const auto& m : modules) {
        const auto& def = design.module(m);
        user += "File " + def.source_span.file + ", module " + m + " (lines " + std::to_string(def.source_span.first) +
                "-" + std::to_string(def.source_span.last) + "):\n" + design.slice(def.source_span) + "\n";
    }
    user += "List every code segment that declares, assigns or binds a signal of the chains, one per line:\n";
    user += "SEGMENT: <file>:<first line>-<last line>\n";
    user += "or the single line (none).\n";
    return llm::make_request(llm::StageTag::Bridge, std::string(kSystemText), std::move(user), params);
}

std::vector<rtl::LineSpan> parse_bridge_response(std::string_view text) {
    std::vector<rtl::LineSpan> out;
    bool none = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        std::string line = trim(std::string(text.substr(pos, nl == text.npos ? text.npos : nl - pos)));
        pos = nl == text.npos ? text.size() : nl + 1;
        if (line.empty())
            continue;
        if (line == "(none)") {
            none = true;
            continue;
        }
        if (line.rfind("SEGMENT:", 0) != 0)
            fail(ErrorCode::UnparseableResponse, "expected 'SEGMENT: <file>:<a>-<b>', got: " + line);
        std::string spec = trim(line.substr(8));
        auto colon = spec.rfind(':');
        auto dash = spec.rfind('-');
        if (colon == std::string::npos || dash == std::string::npos || dash < colon)
            fail(ErrorCode::UnparseableResponse, "malformed segment: " + spec);
        try {
            std::size_t used = 0;
            std::string a = spec.substr(colon + 1, dash - colon - 1), b = spec.substr(dash + 1);
            int first = std::stoi(a, &used);
            if (used != a.size())
                throw std::invalid_argument(a);
            int last = std::stoi(b, &used);
            if (used != b.size() || first < 1 || last < first)
                throw std::invalid_argument(b);
            out.push_back({spec.substr(0, colon), first, last});
        }
        catch (const std::logic_error&) {
            fail(ErrorCode::UnparseableResponse, "malformed line range in segment: " + spec);
        }
    }
    if (none && !out.empty())
        fail(ErrorCode::UnparseableResponse, "'(none)' mixed with segment lines");
    if (!none && out.empty())
        fail(ErrorCode::UnparseableResponse, "the response lists no segments");
    return out;
}

void cross_check(BridgeResult& result, const objective::VerificationObjective& objective,
                 const std::vector<chain::SignalChain>& chains, const rtl::RtlDesign& design,
                 const llm::Session& session, const llm::GenerationParams& params) {
    std::vector<chain::SignalChain> used;
    for (const auto& c : chains)
        if (std::find(result.chains_used.begin(), result.chains_used.end(), c.chain_id) != result.chains_used.end())
            used.push_back(c);
    auto answer = parse_bridge_response(
        session.complete(build_bridge_prompt(objective, used, design, params)).response_text);
    std::set<rtl::LineSpan> model(answer.begin(), answer.end());
    std::set<rtl::LineSpan> structural;
    for (const auto& s : result.segments)
        structural.insert(s.line_span);
    result.disagreements.clear();
    for (const auto& s : structural)
        if (!model.contains(s))
            result.disagreements.push_back("missing from model answer: " + span_text(s));
    for (const auto& s : model)
        if (!structural.contains(s))
            result.disagreements.push_back("not a structural segment: " + span_text(s));
}

Json to_json(const CodeSegment& s) {
    Json matched = Json::array();
    for (const auto& m : s.matched_signals)
        matched.push_back(entity::to_json(m));
    return Json{{"file", s.line_span.file},
                {"first_line", s.line_span.first},
                {"last_line", s.line_span.last},
                {"module", s.module},
                {"matched_signals", matched},
                {"segment_kind", to_string(s.kind)}};
}

CodeSegment segment_from_json(const Json& j) {
    CodeSegment s;
    s.line_span = {j.at("file").get<std::string>(), j.at("first_line").get<int>(), j.at("last_line").get<int>()};
    s.module = j.at("module").get<std::string>();
    for (const auto& m : j.at("matched_signals"))
        s.matched_signals.insert(entity::entity_name_from_json(m));
    s.kind = segment_kind_from_string(j.at("segment_kind").get<std::string>());
    return s;
}

Json to_json(const BridgeResult& r) {
    Json segs = Json::array();
    for (const auto& s : r.segments)
        segs.push_back(to_json(s));
    Json unresolved = Json::array();
    for (const auto& u : r.unresolved_signals)
        unresolved.push_back(entity::to_json(u));
    Json j{{"objective_id", r.objective_id},
           {"chains_used", r.chains_used},
           {"segments", segs},
           {"unresolved_signals", unresolved}};
    if (!r.disagreements.empty())
        j["disagreements"] = r.disagreements;
    return j;
}

BridgeResult bridge_result_from_json(const Json& j) {
    try {
        BridgeResult r;
        r.objective_id = j.at("objective_id").get<std::string>();
        r.chains_used = j.at("chains_used").get<std::vector<std::string>>();
        for (const auto& s : j.at("segments"))
            r.segments.push_back(segment_from_json(s));
        for (const auto& u : j.at("unresolved_signals"))
            r.unresolved_signals.insert(entity::entity_name_from_json(u));
        if (j.contains("disagreements"))
            r.disagreements = j.at("disagreements").get<std::vector<std::string>>();
        return r;
    }
    catch (const Json::exception& e) {
        fail(ErrorCode::SchemaMismatch, std::string("bridge record: ") + e.what());
    }
}

} // namespace assertgen::bridge
