#include "assertgen/sva_emitter.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "assertgen/error.hpp"
#include "assertgen/rtl/lexer.hpp"
#include "assertgen/rtl/parser.hpp"

namespace assertgen::sva {

namespace {

constexpr std::string_view kSystemText =
    "You are a formal verification engineer writing SystemVerilog assertions for an RTL design.";

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

const std::set<std::string, std::less<>>& unsupported_words() {
    static const std::set<std::string, std::less<>> words{
        "throughout", "within", "intersect", "first_match", "until", "s_until", "until_with", "s_until_with",
        "implies", "eventually", "s_eventually", "always", "s_always", "nexttime", "s_nexttime", "strong", "weak",
        "accept_on", "reject_on", "sync_accept_on", "sync_reject_on", "if", "else", "case", "iff",
    };
    return words;
}

const std::set<std::string, std::less<>>& supported_system_functions() {
    static const std::set<std::string, std::less<>> names{"$rose", "$fell", "$stable", "$past"};
    return names;
}

const std::set<std::string, std::less<>>& body_keywords() {
    static const std::set<std::string, std::less<>> words{"and", "or", "not", "disable", "iff"};
    return words;
}

struct BodyChecker {
    rtl::Parser& p;

    bool at_follow() const {
        const auto& t = p.peek();
        if (t.kind == rtl::TokenKind::EndOfFile)
            return true;
        return p.at(")") || p.at("|->") || p.at("|=>") || p.at("##") || p.at("and") || p.at("or");
    }

    void property() {
        if (p.accept("disable")) {
            p.expect("iff");
            p.expect("(");
            p.parse_expr();
            p.expect(")");
        }
        implication();
    }

    void implication() {
        disjunction();
        if (p.accept("|->") || p.accept("|=>"))
            implication();
    }

    void disjunction() {
        conjunction();
        while (p.accept("or"))
            conjunction();
    }

    void conjunction() {
        negation();
        while (p.accept("and"))
            negation();
    }

    void negation() {
        if (p.accept("not")) {
            negation();
            return;
        }
        sequence();
    }

    void delay() {
        p.expect("##");
        const auto& t = p.peek();
        if (t.kind != rtl::TokenKind::Number ||
            !std::all_of(t.text.begin(), t.text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            p.error("a cycle count after '##'");
        p.next();
    }

    void sequence() {
        if (p.at("##"))
            delay();
        atom();
        while (p.at("##")) {
            delay();
            atom();
        }
    }

    void atom() {
        if (p.at("(")) {
            auto pos = p.position();
            try {
                p.parse_expr();
                if (at_follow())
                    return;
            }
            catch (const Error&) {
            }
            p.rewind(pos);
            p.expect("(");
            property();
            p.expect(")");
            return;
        }
        if (p.at("not") || p.at("and") || p.at("or") || p.at("disable"))
            p.error("expression");
        p.parse_expr();
    }
};

// Appends an UnbalancedParens diagnostic when brackets do not nest.
bool check_brackets(std::string_view body, std::size_t offset, const std::string& id,
                    std::vector<Diagnostic>& out) {
    std::vector<std::pair<char, std::size_t>> stack;
    bool in_string = false;
    for (std::size_t i = 0; i < body.size(); ++i) {
        char c = body[i];
        if (in_string) {
            if (c == '\\')
                ++i;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"') {
            in_string = true;
        }
        else if (c == '(' || c == '[' || c == '{') {
            stack.emplace_back(c, i);
        }
        else if (c == ')' || c == ']' || c == '}') {
            char want = c == ')' ? '(' : c == ']' ? '[' : '{';
            if (stack.empty() || stack.back().first != want) {
                out.push_back({Severity::Error, id, Rule::UnbalancedParens,
                               std::string("unmatched '") + c + "' in property body", offset + i, offset + i + 1});
                return false;
            }
            stack.pop_back();
        }
    }
    if (!stack.empty()) {
        auto pos = stack.back().second;
        out.push_back({Severity::Error, id, Rule::UnbalancedParens,
                       std::string("unclosed '") + stack.back().first + "' in property body", offset + pos,
                       offset + pos + 1});
        return false;
    }
    return true;
}

std::size_t statement_end(std::string_view text, std::size_t from) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = from; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (c == '\\')
                ++i;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"')
            in_string = true;
        else if (c == '(' || c == '[' || c == '{')
            ++depth;
        else if (c == ')' || c == ']' || c == '}')
            depth = std::max(0, depth - 1);
        else if (c == ';' && depth == 0)
            return i + 1;
    }
    return std::string_view::npos;
}

const std::regex& statement_start() {
    static const std::regex re(R"(\bassert\s+property\b)");
    return re;
}

const std::regex& clock_prefix() {
    static const std::regex re(
        R"(^assert\s+property\s*@\s*\(\s*posedge\s+([A-Za-z_][A-Za-z0-9_$]*(?:\.[A-Za-z_][A-Za-z0-9_$]*)*)\s*\))");
    return re;
}

bool is_module_signal(const std::string& q) {
    static const std::regex re(R"(^[A-Za-z_][A-Za-z0-9_]*\.[A-Za-z_][A-Za-z0-9_]*$)");
    return std::regex_match(q, re);
}

} // namespace

std::string_view to_string(Severity s) {
    return s == Severity::Error ? "error" : "warning";
}

std::string_view to_string(Rule r) {
    switch (r) {
        case Rule::TemplateViolation: return "TemplateViolation";
        case Rule::UnqualifiedSignal: return "UnqualifiedSignal";
        case Rule::UnknownBinding: return "UnknownBinding";
        case Rule::EmptyBody: return "EmptyBody";
        case Rule::UnbalancedParens: return "UnbalancedParens";
        case Rule::BodySyntax: return "BodySyntax";
        case Rule::UnknownConstruct: return "UnknownConstruct";
    }
    return "?";
}

llm::PromptRequest build_sva_prompt(const objective::VerificationObjective& objective,
                                    const std::vector<bridge::CodeSegment>& segments,
                                    const std::vector<chain::SignalChain>& chains, const rtl::RtlDesign& design,
                                    const llm::GenerationParams& params, std::size_t chain_chars) {
    std::string user;
    user += "Verification objective " + objective.objective_id + ": " + objective.statement + "\n";
    user += "Involved signals:";
    for (const auto& s : objective.involved_signals)
        user += " " + s.canonical;
    user += "\n\nSignal chains:\n";
    if (chains.empty())
        user += "(none)\n";
    std::size_t listed = 0, used = 0;
    for (const auto& c : chains) {
        std::string line = "-";
        bool first = true;
        for (const auto& n : c.nodes()) {
            line += std::string(first ? " " : " -> ") + n.module + "." + n.signal;
            first = false;
        }
        line += c.truncated ? " (truncated)\n" : "\n";
        if (used + line.size() > chain_chars)
            break;
        used += line.size();
        user += line;
        ++listed;
    }
    if (listed < chains.size())
        user += "(" + std::to_string(chains.size() - listed) + " more chains not shown)\n";
    user += "\nCode segments:\n";
    if (segments.empty())
        user += std::string(kNoSegmentsNotice) + "\n";
    for (const auto& s : segments) {
        user += "// " + s.file() + ":" + std::to_string(s.line_span.first) + "-" + std::to_string(s.line_span.last) +
                " (" + std::string(bridge::to_string(s.kind)) + " in module " + s.module + ")\n";
        user += design.slice(s.line_span);
        user += "\n";
    }
    user += "\nConstraints:\n";
    user += "1. Signal binding: reference every signal explicitly as " + std::string(kBindingFormat) +
            ", where source_module_name is the module that declares the signal.\n";
    user += "2. Unified template: every assertion starts with " + std::string(kTemplate) + ".\n";
    user += "Write each assertion as one statement: assert property @(posedge <module>.<clock>) (<property>);\n";
    user += "Properties may use Verilog boolean expressions, |->, |=>, ##N, $rose, $fell, $stable, $past, "
            "and, or, not.\n";
    user += "Answer with the assertions only.\n";
    return llm::make_request(llm::StageTag::Sva, std::string(kSystemText), std::move(user), params);
}

std::set<std::string> scan_qualified_names(std::string_view text) {
    std::set<std::string> out;
    std::size_t i = 0;
    bool in_string = false;
    while (i < text.size()) {
        char c = text[i];
        if (in_string) {
            if (c == '\\')
                ++i;
            else if (c == '"')
                in_string = false;
            ++i;
            continue;
        }
        if (c == '"') {
            in_string = true;
            ++i;
            continue;
        }
        if (!ident_char(c)) {
            ++i;
            continue;
        }
        // a run of identifier characters; only those starting a name and not
        // glued to a number base or system-task marker count
        char prev = i == 0 ? ' ' : text[i - 1];
        bool starts_name = ident_start(c) && prev != '\'' && prev != '.';
        std::size_t j = i;
        while (j < text.size() && ident_char(text[j]))
            ++j;
        if (!starts_name) {
            i = j;
            continue;
        }
        std::string name(text.substr(i, j - i));
        while (j + 1 < text.size() && text[j] == '.' && ident_start(text[j + 1])) {
            std::size_t k = j + 1;
            while (k < text.size() && ident_char(text[k]))
                ++k;
            name += "." + std::string(text.substr(j + 1, k - j - 1));
            j = k;
        }
        if (name.find('.') != std::string::npos)
            out.insert(name);
        i = j;
    }
    return out;
}

std::vector<SvaAssertion> parse_sva_response(std::string_view text, const std::string& objective_id) {
    std::vector<SvaAssertion> out;
    std::string s(text);
    auto begin = std::sregex_iterator(s.begin(), s.end(), statement_start());
    std::vector<std::size_t> starts;
    for (auto it = begin; it != std::sregex_iterator(); ++it)
        starts.push_back(static_cast<std::size_t>(it->position()));
    std::size_t consumed = 0;
    for (std::size_t n = 0; n < starts.size(); ++n) {
        auto start = starts[n];
        if (start < consumed)
            continue;
        auto end = statement_end(s, start);
        if (end == std::string::npos)
            end = n + 1 < starts.size() ? starts[n + 1] : s.size();
        consumed = end;
        SvaAssertion a;
        a.objective_id = objective_id;
        a.assertion_id = objective_id + ":" + std::to_string(out.size());
        a.raw_text = trim(s.substr(start, end - start));
        std::smatch m;
        std::string body;
        if (std::regex_search(a.raw_text, m, clock_prefix())) {
            a.clock_binding = m[1].str();
            body = a.raw_text.substr(static_cast<std::size_t>(m.length(0)));
        }
        else {
            std::smatch kw;
            std::regex_search(a.raw_text, kw, statement_start());
            body = a.raw_text.substr(static_cast<std::size_t>(kw.length(0)));
        }
        if (!body.empty() && body.back() == ';')
            body.pop_back();
        a.property_body = trim(body);
        a.bound_signals = scan_qualified_names(a.raw_text);
        out.push_back(std::move(a));
    }
    if (out.empty())
        fail(ErrorCode::NoAssertionsFound, "no 'assert property' statement in the response");
    return out;
}

std::vector<Diagnostic> validate_sva(const SvaAssertion& a, const rtl::RtlDesign& design) {
    std::vector<Diagnostic> out;
    const auto& raw = a.raw_text;
    const auto& id = a.assertion_id;

    // (a) unified template
    std::string prefix = "assert property @(posedge " + a.clock_binding + ")";
    if (a.clock_binding.empty() || raw.rfind(prefix, 0) != 0) {
        out.push_back({Severity::Error, id, Rule::TemplateViolation,
                       "statement must start with '" + std::string(kTemplate) + "'", 0,
                       std::min(raw.size(), prefix.size())});
    }
    else if (!is_module_signal(a.clock_binding)) {
        out.push_back({Severity::Error, id, Rule::TemplateViolation,
                       "clock '" + a.clock_binding + "' is not of the form " + std::string(kBindingFormat), 0,
                       prefix.size()});
    }
    if (raw.empty() || raw.back() != ';')
        out.push_back({Severity::Error, id, Rule::TemplateViolation, "statement must end with ';'", raw.size(),
                       raw.size()});

    // (b) bindings
    for (const auto& q : a.bound_signals) {
        auto pos = raw.find(q);
        Diagnostic d{Severity::Error, id, Rule::UnknownBinding, "", pos, pos + q.size()};
        if (!is_module_signal(q)) {
            d.message = "'" + q + "' is not of the form " + std::string(kBindingFormat);
            out.push_back(d);
            continue;
        }
        auto dot = q.find('.');
        auto module = q.substr(0, dot), signal = q.substr(dot + 1);
        if (!design.has_module(module)) {
            d.message = "module '" + module + "' is not in the design";
            out.push_back(d);
        }
        else if (!design.module(module).declares(signal) && !design.module(module).parameters.contains(signal)) {
            d.message = "'" + signal + "' is not declared in module " + module;
            out.push_back(d);
        }
    }

    // (c) property body
    const auto& body = a.property_body;
    std::size_t offset = raw.find(body);
    if (offset == std::string::npos)
        offset = 0;
    if (body.empty()) {
        out.push_back({Severity::Error, id, Rule::EmptyBody, "property body is empty", offset, offset});
        return out;
    }
    if (!check_brackets(body, offset, id, out))
        return out;

    std::vector<rtl::Token> tokens;
    try {
        tokens = rtl::lex(body, id).tokens;
    }
    catch (const Error& e) {
        out.push_back({Severity::Error, id, Rule::BodySyntax, e.what(), offset, offset + body.size()});
        return out;
    }
    bool unknown = false;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        auto span_b = offset + t.begin, span_e = offset + t.end;
        bool qualified_part = (i > 0 && tokens[i - 1].text == ".") ||
                              (i + 1 < tokens.size() && tokens[i + 1].text == ".");
        if (t.kind == rtl::TokenKind::SystemIdentifier && !supported_system_functions().contains(t.text)) {
            out.push_back({Severity::Warning, id, Rule::UnknownConstruct,
                           "'" + t.text + "' is outside the checked subset", span_b, span_e});
            unknown = true;
        }
        else if (t.kind == rtl::TokenKind::Identifier && !qualified_part) {
            bool after_disable = t.text == "iff" && i > 0 && tokens[i - 1].text == "disable";
            if (unsupported_words().contains(t.text) && !after_disable) {
                out.push_back({Severity::Warning, id, Rule::UnknownConstruct,
                               "'" + t.text + "' is outside the checked subset", span_b, span_e});
                unknown = true;
            }
            else if (!body_keywords().contains(t.text)) {
                bool is_call = i + 1 < tokens.size() && tokens[i + 1].text == "(";
                if (is_call) {
                    out.push_back({Severity::Warning, id, Rule::UnknownConstruct,
                                   "call to '" + t.text + "' is outside the checked subset", span_b, span_e});
                    unknown = true;
                }
                else {
                    out.push_back({Severity::Error, id, Rule::UnqualifiedSignal,
                                   "'" + t.text + "' must be written as " + std::string(kBindingFormat), span_b,
                                   span_e});
                }
            }
        }
        else if (t.text == "[" && i + 1 < tokens.size() &&
                 (tokens[i + 1].text == "*" || tokens[i + 1].text == "=" || tokens[i + 1].text == "->" ||
                  tokens[i + 1].text == "-")) {
            out.push_back({Severity::Warning, id, Rule::UnknownConstruct, "repetition operator is outside the "
                                                                          "checked subset", span_b, span_e});
            unknown = true;
        }
        else if (t.text == "##" && i + 1 < tokens.size() && tokens[i + 1].text == "[") {
            out.push_back({Severity::Warning, id, Rule::UnknownConstruct, "ranged delay is outside the checked subset",
                           span_b, span_e});
            unknown = true;
        }
    }
    if (unknown)
        return out;

    try {
        rtl::Parser p(std::move(tokens), body, id);
        BodyChecker checker{p};
        checker.property();
        if (!p.at_end())
            p.error("end of property");
    }
    catch (const Error& e) {
        out.push_back({Severity::Error, id, Rule::BodySyntax, e.what(), offset, offset + body.size()});
    }
    return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string render_file(std::vector<SvaAssertion> assertions, const std::string& run_id) {
    std::sort(assertions.begin(), assertions.end(),
              [](const SvaAssertion& a, const SvaAssertion& b) { return a.assertion_id < b.assertion_id; });
    std::string out = "// assertgen run: " + run_id + "\n";
    for (const auto& a : assertions) {
        out += "\n// assertion: " + a.assertion_id + " objective: " + a.objective_id + "\n";
        out += a.raw_text + "\n";
    }
    return out;
}

void emit_file(const std::vector<SvaAssertion>& assertions, const rtl::RtlDesign& design,
               const std::filesystem::path& out_path, const std::string& run_id) {
    for (const auto& a : assertions)
        if (has_errors(validate_sva(a, design)))
            fail(ErrorCode::ValidationGate, "assertion " + a.assertion_id + " has error diagnostics");
    write_text_file(out_path, render_file(assertions, run_id));
}

SvaFile parse_sva_file(std::string_view text) {
    static const std::string kHeader = "// assertgen run: ";
    static const std::regex meta(R"(^// assertion: (\S+) objective: (\S+)$)");
    SvaFile file;
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        lines.emplace_back(text.substr(pos, nl == text.npos ? text.npos : nl - pos));
        pos = nl == text.npos ? text.size() : nl + 1;
    }
    if (lines.empty() || lines[0].rfind(kHeader, 0) != 0)
        fail(ErrorCode::SchemaMismatch, "missing '" + kHeader + "' header line");
    file.run_id = lines[0].substr(kHeader.size());
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::smatch m;
        if (!std::regex_match(lines[i], m, meta))
            continue;
        std::string body;
        std::size_t j = i + 1;
        for (; j < lines.size() && !std::regex_match(lines[j], meta); ++j)
            body += lines[j] + "\n";
        auto parsed = parse_sva_response(body, m[2].str());
        if (parsed.size() != 1)
            fail(ErrorCode::SchemaMismatch, "assertion " + m[1].str() + " holds " + std::to_string(parsed.size()) +
                                                " statements");
        parsed[0].assertion_id = m[1].str();
        file.assertions.push_back(std::move(parsed[0]));
        i = j - 1;
    }
    return file;
}

Json to_json(const SvaAssertion& a) {
    return Json{{"assertion_id", a.assertion_id}, {"objective_id", a.objective_id},
                {"clock_binding", a.clock_binding}, {"property_body", a.property_body},
                {"bound_signals", a.bound_signals}, {"raw_text", a.raw_text}};
}

SvaAssertion assertion_from_json(const Json& j) {
    try {
        SvaAssertion a;
        a.assertion_id = j.at("assertion_id").get<std::string>();
        a.objective_id = j.at("objective_id").get<std::string>();
        a.clock_binding = j.at("clock_binding").get<std::string>();
        a.property_body = j.at("property_body").get<std::string>();
        a.bound_signals = j.at("bound_signals").get<std::set<std::string>>();
        a.raw_text = j.at("raw_text").get<std::string>();
        return a;
    }
    catch (const Json::exception& e) {
        fail(ErrorCode::SchemaMismatch, std::string("assertion record: ") + e.what());
    }
}

Json to_json(const Diagnostic& d) {
    return Json{{"severity", to_string(d.severity)}, {"assertion_id", d.assertion_id},
                {"rule", to_string(d.rule)},         {"message", d.message},
                {"span", {{"begin", d.span_begin}, {"end", d.span_end}}}};
}

} // namespace assertgen::sva
