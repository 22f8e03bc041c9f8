// Maps verification objectives, through their signal chains, to the Verilog
// code that defines each chain signal.
#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "assertgen/chain_extractor.hpp"
#include "assertgen/entity_engine.hpp"
#include "assertgen/llm_gateway.hpp"
#include "assertgen/objective_engine.hpp"
#include "assertgen/rtl/design.hpp"

namespace assertgen::bridge {

using entity::EntityName;

enum class SegmentKind { Declaration, Assignment, Instantiation, Port };
std::string_view to_string(SegmentKind kind);
SegmentKind segment_kind_from_string(std::string_view text);

struct CodeSegment {
    rtl::LineSpan line_span; // carries the file path
    std::string module;
    std::set<EntityName> matched_signals; // surface = declared spelling
    SegmentKind kind = SegmentKind::Declaration;

    const std::string& file() const { return line_span.file; }
};

struct BridgeResult {
    std::string objective_id;
    std::vector<std::string> chains_used;
    std::vector<CodeSegment> segments; // ordered by (file, first line, last line, kind)
    std::set<EntityName> unresolved_signals;
    /// Filled only by cross_check.
    std::vector<std::string> disagreements;
};

/// Declaration (or port) span, every span assigning the signal (procedural
/// writes widened to the enclosing block) and every instantiation in the
/// signal's own module that binds it as an actual. Throws SignalNotFound.
std::vector<CodeSegment> match_segments(const rtl::SignalRef& signal, const rtl::RtlDesign& design);

/// Merges segments with the same (file, span, kind) and sorts them.
std::vector<CodeSegment> normalize_segments(std::vector<CodeSegment> segments);

std::vector<BridgeResult> bridge(const std::vector<objective::VerificationObjective>& objectives,
                                 const std::vector<chain::SignalChain>& chains, const rtl::RtlDesign& design);

llm::PromptRequest build_bridge_prompt(const objective::VerificationObjective& objective,
                                       const std::vector<chain::SignalChain>& chains,
                                       const rtl::RtlDesign& design, const llm::GenerationParams& params);

/// Lines "SEGMENT: <file>:<first>-<last>", or a single "(none)".
/// Throws UnparseableResponse.
std::vector<rtl::LineSpan> parse_bridge_response(std::string_view text);

/// Asks the model for the defining segments and records every span that only
/// one side reports in result.disagreements.
void cross_check(BridgeResult& result, const objective::VerificationObjective& objective,
                 const std::vector<chain::SignalChain>& chains, const rtl::RtlDesign& design,
                 const llm::Session& session, const llm::GenerationParams& params = {});

Json to_json(const CodeSegment& segment);
CodeSegment segment_from_json(const Json& j);
Json to_json(const BridgeResult& result);
BridgeResult bridge_result_from_json(const Json& j);

} // namespace assertgen::bridge
