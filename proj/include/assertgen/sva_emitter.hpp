// SVA prompt construction, response parsing, validation and .sva emission.
#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "assertgen/bridger.hpp"
#include "assertgen/chain_extractor.hpp"
#include "assertgen/llm_gateway.hpp"
#include "assertgen/objective_engine.hpp"
#include "assertgen/rtl/design.hpp"

namespace assertgen::sva {

/// Binding format and statement prefix every assertion must follow.
inline constexpr std::string_view kBindingFormat = "{source_module_name}.{signal_name}";
inline constexpr std::string_view kTemplate = "assert property @(posedge {source_module_name}.{signal_name})";
inline constexpr std::string_view kNoSegmentsNotice = "NO CODE SEGMENTS RESOLVED";

struct SvaAssertion {
    std::string assertion_id; // "<objective_id>:<ordinal>", ordinals from 0
    std::string objective_id;
    std::string clock_binding; // empty when the clocking event is missing or malformed
    std::string property_body;
    std::set<std::string> bound_signals;
    std::string raw_text; // "assert property ... ;"

    friend bool operator==(const SvaAssertion&, const SvaAssertion&) = default;
};

enum class Severity { Error, Warning };
std::string_view to_string(Severity s);

enum class Rule {
    TemplateViolation,
    UnqualifiedSignal,
    UnknownBinding,
    EmptyBody,
    UnbalancedParens,
    BodySyntax,
    UnknownConstruct, // warning only
};
std::string_view to_string(Rule r);

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string assertion_id;
    Rule rule = Rule::BodySyntax;
    std::string message;
    std::size_t span_begin = 0; // character offsets into raw_text
    std::size_t span_end = 0;
};

/// Chains are listed in order until their lines would exceed chain_chars;
/// the rest are summarized by count.
llm::PromptRequest build_sva_prompt(const objective::VerificationObjective& objective,
                                    const std::vector<bridge::CodeSegment>& segments,
                                    const std::vector<chain::SignalChain>& chains, const rtl::RtlDesign& design,
                                    const llm::GenerationParams& params = {}, std::size_t chain_chars = 6000);

/// Every "assert property ... ;" statement in `text`. Throws NoAssertionsFound.
std::vector<SvaAssertion> parse_sva_response(std::string_view text, const std::string& objective_id);

/// Qualified names (a.b, a.b.c, ...) appearing in `text`, selects stripped.
std::set<std::string> scan_qualified_names(std::string_view text);

std::vector<Diagnostic> validate_sva(const SvaAssertion& assertion, const rtl::RtlDesign& design);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// Writes the assertions sorted by id. Throws ValidationGate if any still has
/// error-level diagnostics against `design`.
void emit_file(const std::vector<SvaAssertion>& assertions, const rtl::RtlDesign& design,
               const std::filesystem::path& out_path, const std::string& run_id);

/// Text emit_file would write.
std::string render_file(std::vector<SvaAssertion> assertions, const std::string& run_id);

struct SvaFile {
    std::string run_id;
    std::vector<SvaAssertion> assertions;
};

/// Reads a file produced by emit_file, taking ids from its metadata comments.
SvaFile parse_sva_file(std::string_view text);

Json to_json(const SvaAssertion& a);
SvaAssertion assertion_from_json(const Json& j);
Json to_json(const Diagnostic& d);

} // namespace assertgen::sva
