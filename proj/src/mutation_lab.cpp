#include "assertgen/mutation_lab.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <future>
#include <random>
#include <sys/wait.h>

#include "assertgen/error.hpp"
#include "assertgen/rtl/parser.hpp"

namespace assertgen::mutation {

namespace {

std::string_view source(const std::string& text, const rtl::SourceLoc& loc) {
    return std::string_view(text).substr(loc.begin, loc.end - loc.begin);
}

bool compound(const rtl::Expr& e) {
    return e.kind == rtl::ExprKind::Binary || e.kind == rtl::ExprKind::Ternary;
}

std::string wrapped(const std::string& text, const rtl::Expr& e) {
    std::string s(source(text, e.loc));
    return compound(e) ? "(" + s + ")" : s;
}

int lhs_width(const rtl::Expr& lhs, const rtl::ModuleDef& def) {
    switch (lhs.kind) {
        case rtl::ExprKind::Identifier:
            return def.width_of(lhs.text);
        case rtl::ExprKind::Index:
            return 1;
        case rtl::ExprKind::Range: {
            if (lhs.text != ":")
                return -1;
            const auto& a = lhs.operands[1];
            const auto& b = lhs.operands[2];
            auto digits = [](const std::string& s) {
                return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
            };
            if (a.kind != rtl::ExprKind::Number || b.kind != rtl::ExprKind::Number || !digits(a.text) || !digits(b.text))
                return -1;
            long x = std::stol(a.text), y = std::stol(b.text);
            return static_cast<int>((x > y ? x - y : y - x) + 1);
        }
        case rtl::ExprKind::Concat: {
            int total = 0;
            for (const auto& op : lhs.operands) {
                int w = lhs_width(op, def);
                if (w < 0)
                    return -1;
                total += w;
            }
            return total;
        }
        default:
            return -1;
    }
}

std::string stuck_constant(int width, bool one) {
    if (width == 1)
        return one ? "1'b1" : "1'b0";
    if (width > 1)
        return one ? "{" + std::to_string(width) + "{1'b1}}" : std::to_string(width) + "'b0";
    return one ? "~0" : "0";
}

class SiteCollector {
public:
    SiteCollector(const std::string& text, std::size_t file_index, const rtl::ModuleDef& def,
                  const std::set<Operator>& ops)
        : text_(text), fi_(file_index), def_(def), ops_(ops) {}

    std::map<Operator, std::vector<Site>> sites;

    void module(const rtl::Module& m) {
        for (const auto& item : m.items) {
            if (auto* ca = std::get_if<rtl::ContinuousAssign>(&item)) {
                for (const auto& [lhs, rhs] : ca->assignments)
                    assignment(lhs, rhs);
            }
            else if (auto* d = std::get_if<rtl::Declaration>(&item)) {
                for (const auto& dn : d->names)
                    if (dn.init && !is_param(d->kind))
                        expr(*dn.init);
            }
            else if (auto* pb = std::get_if<rtl::ProceduralBlock>(&item)) {
                stmt(pb->body);
            }
        }
    }

private:
    static bool is_param(rtl::DeclKind k) {
        return k == rtl::DeclKind::Parameter || k == rtl::DeclKind::Localparam;
    }

    void add(Operator op, std::size_t begin, std::size_t end, std::string replacement,
             decltype(Site::fallback) fallback = std::nullopt) {
        if (!ops_.contains(op))
            return;
        sites[op].push_back({op, fi_, begin, end, std::move(replacement), std::move(fallback)});
    }

    void negate(const rtl::Expr& cond) {
        add(Operator::NegateCondition, cond.loc.begin, cond.loc.end, "!(" + std::string(source(text_, cond.loc)) + ")");
    }

    void expr(const rtl::Expr& e) {
        switch (e.kind) {
            case rtl::ExprKind::Ternary:
                negate(e.operands[0]);
                break;
            case rtl::ExprKind::Binary: {
                auto it = binary_op_replacements().find(e.text);
                if (it != binary_op_replacements().end()) {
                    std::string whole =
                        "(" + wrapped(text_, e.operands[0]) + " " + it->second + " " + wrapped(text_, e.operands[1]) + ")";
                    add(Operator::ReplaceBinaryOp, e.loc.op_begin, e.loc.op_begin + e.text.size(), it->second,
                        std::make_pair(std::make_pair(e.loc.begin, e.loc.end), whole));
                }
                break;
            }
            case rtl::ExprKind::Number:
                if (auto flipped = flip_lsb(e.text))
                    add(Operator::FlipConstantBit, e.loc.begin, e.loc.end, *flipped);
                break;
            default:
                break;
        }
        for (const auto& op : e.operands)
            expr(op);
    }

    void assignment(const rtl::Expr& lhs, const rtl::Expr& rhs) {
        expr(rhs);
        if (rhs.kind == rtl::ExprKind::Binary && non_commutative_ops().contains(rhs.text)) {
            auto a = wrapped(text_, rhs.operands[0]);
            auto b = wrapped(text_, rhs.operands[1]);
            if (a != b)
                add(Operator::SwapAssignRhsOperands, rhs.loc.begin, rhs.loc.end, b + " " + rhs.text + " " + a);
        }
        int width = lhs_width(lhs, def_);
        std::string rhs_text(source(text_, rhs.loc));
        for (bool one : {false, true}) {
            auto c = stuck_constant(width, one);
            if (c != rhs_text)
                add(one ? Operator::StuckAtOne : Operator::StuckAtZero, rhs.loc.begin, rhs.loc.end, c);
        }
    }

    void stmt(const rtl::Stmt& s) {
        switch (s.kind) {
            case rtl::StmtKind::If:
                negate(s.exprs[0]);
                expr(s.exprs[0]);
                for (const auto& b : s.body)
                    stmt(b);
                break;
            case rtl::StmtKind::Case:
                expr(s.exprs[0]);
                for (const auto& item : s.items) {
                    for (const auto& l : item.labels)
                        expr(l);
                    for (const auto& b : item.body)
                        stmt(b);
                }
                break;
            case rtl::StmtKind::Blocking:
            case rtl::StmtKind::NonBlocking:
                assignment(s.exprs[0], s.exprs[1]);
                break;
            case rtl::StmtKind::For:
                stmt(s.body[2]);
                break;
            case rtl::StmtKind::Block:
            case rtl::StmtKind::While:
            case rtl::StmtKind::Repeat:
            case rtl::StmtKind::Forever:
            case rtl::StmtKind::EventControl:
            case rtl::StmtKind::Delay:
                for (const auto& b : s.body)
                    stmt(b);
                break;
            default:
                break;
        }
    }

    const std::string& text_;
    std::size_t fi_;
    const rtl::ModuleDef& def_;
    const std::set<Operator>& ops_;
};

// Trimmed text of the whole lines overlapping [begin, end).
std::string lines_around(const std::string& text, std::size_t begin, std::size_t end) {
    std::size_t first = begin;
    while (first > 0 && text[first - 1] != '\n')
        --first;
    std::size_t last = std::max(begin, end);
    while (last < text.size() && text[last] != '\n')
        ++last;
    return trim(text.substr(first, last - first));
}

int line_of(const std::string& text, std::size_t offset) {
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t bound) {
    // rejection sampling keeps the draw uniform and independent of the standard library
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
        std::uint64_t r = gen();
        if (r >= threshold)
            return r % bound;
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
        if (comma == std::string::npos)
            break;
        pos = comma + 1;
    }
    return out;
}

std::vector<std::string> csv_lines(std::string_view csv) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        auto nl = csv.find('\n', pos);
        std::string line(csv.substr(pos, nl == csv.npos ? csv.npos : nl - pos));
        pos = nl == csv.npos ? csv.size() : nl + 1;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!trim(line).empty())
            out.push_back(line);
    }
    return out;
}

std::optional<double> parse_percent(const std::string& cell, std::size_t row) {
    if (cell.empty())
        return std::nullopt;
    try {
        std::size_t used = 0;
        double v = std::stod(cell, &used);
        if (used != cell.size() || v < 0.0 || v > 100.0)
            throw std::invalid_argument(cell);
        return v;
    }
    catch (const std::logic_error&) {
        fail(ErrorCode::SchemaMismatch, "row " + std::to_string(row) + ": '" + cell + "' is not a percentage");
    }
}

double round_2dp(double v) {
    return std::floor(v * 100.0 + 0.5) / 100.0;
}

} // namespace

std::string_view to_string(Operator op) {
    switch (op) {
        case Operator::NegateCondition: return "negate_condition";
        case Operator::ReplaceBinaryOp: return "replace_binary_op";
        case Operator::FlipConstantBit: return "flip_constant_bit";
        case Operator::SwapAssignRhsOperands: return "swap_assign_rhs_operands";
        case Operator::StuckAtZero: return "stuck_at_zero";
        case Operator::StuckAtOne: return "stuck_at_one";
    }
    return "?";
}

const std::vector<Operator>& all_operators() {
    static const std::vector<Operator> ops{Operator::NegateCondition,       Operator::ReplaceBinaryOp,
                                           Operator::FlipConstantBit,       Operator::SwapAssignRhsOperands,
                                           Operator::StuckAtZero,           Operator::StuckAtOne};
    return ops;
}

Operator operator_from_string(std::string_view text) {
    for (auto op : all_operators())
        if (to_string(op) == text)
            return op;
    fail(ErrorCode::ConfigError, "unknown mutation operator '" + std::string(text) + "'");
}

const std::map<std::string, std::string, std::less<>>& binary_op_replacements() {
    static const std::map<std::string, std::string, std::less<>> table{
        {"&", "|"},   {"|", "&"},   {"^", "&"},   {"&&", "||"}, {"||", "&&"}, {"+", "-"},  {"-", "+"},
        {"==", "!="}, {"!=", "=="}, {"<", ">="},  {">=", "<"},  {">", "<="},  {"<=", ">"}, {"<<", ">>"},
        {">>", "<<"},
    };
    return table;
}

const std::set<std::string, std::less<>>& non_commutative_ops() {
    static const std::set<std::string, std::less<>> ops{"-", "/", "%", "<<", ">>", "<<<", ">>>",
                                                        "<", ">", "<=", ">=", "**"};
    return ops;
}

std::optional<std::string> flip_lsb(std::string_view literal) {
    std::string s(literal);
    auto tick = s.find('\'');
    int base = 10;
    if (tick != std::string::npos) {
        std::size_t p = tick + 1;
        if (p < s.size() && (s[p] == 's' || s[p] == 'S'))
            ++p;
        if (p >= s.size())
            return std::nullopt;
        switch (std::tolower(static_cast<unsigned char>(s[p]))) {
            case 'b': base = 2; break;
            case 'o': base = 8; break;
            case 'd': base = 10; break;
            case 'h': base = 16; break;
            default: return std::nullopt; // '0, '1, 'x, 'z
        }
    }
    else if (s.find_first_of(".eE") != std::string::npos) {
        return std::nullopt;
    }
    auto last = s.find_last_not_of('_');
    if (last == std::string::npos || (tick != std::string::npos && last <= tick + 1))
        return std::nullopt;
    char c = static_cast<char>(std::tolower(static_cast<unsigned char>(s[last])));
    int digit;
    if (std::isdigit(static_cast<unsigned char>(c)))
        digit = c - '0';
    else if (c >= 'a' && c <= 'f')
        digit = 10 + (c - 'a');
    else
        return std::nullopt;
    if (digit >= base)
        return std::nullopt;
    int flipped = digit ^ 1;
    const char letter_base = std::isupper(static_cast<unsigned char>(s[last])) ? 'A' : 'a';
    s[last] = static_cast<char>(flipped < 10 ? '0' + flipped : letter_base + (flipped - 10));
    return s;
}

std::vector<Site> enumerate_sites(const rtl::RtlDesign& design, const std::set<Operator>& operators) {
    std::vector<Site> out;
    for (std::size_t fi = 0; fi < design.units().size(); ++fi) {
        std::map<Operator, std::vector<Site>> per_op;
        for (const auto& m : design.units()[fi].modules) {
            SiteCollector c(design.files()[fi].text, fi, design.module(m.name), operators);
            c.module(m);
            for (auto& [op, sites] : c.sites)
                per_op[op].insert(per_op[op].end(), sites.begin(), sites.end());
        }
        for (auto op : all_operators()) {
            auto& sites = per_op[op];
            std::stable_sort(sites.begin(), sites.end(),
                             [](const Site& a, const Site& b) { return a.begin < b.begin; });
            out.insert(out.end(), sites.begin(), sites.end());
        }
    }
    return out;
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i)
        idx[i] = i;
    if (k >= n)
        return idx;
    std::mt19937_64 gen(seed);
    for (std::size_t i = 0; i < k; ++i) {
        auto j = i + static_cast<std::size_t>(bounded(gen, n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

MutationResult generate_mutants(const rtl::RtlDesign& design, const std::set<Operator>& operators,
                                std::uint64_t seed, std::size_t max_mutants) {
    if (max_mutants == 0)
        fail(ErrorCode::PreconditionViolation, "max_mutants must be at least 1");
    auto sites = enumerate_sites(design, operators);
    if (sites.empty())
        fail(ErrorCode::NoApplicableSites, "no mutation site for the selected operators");
    MutationResult result;
    result.site_count = sites.size();

    std::vector<rtl::GenericNode> originals;
    for (const auto& unit : design.units())
        originals.push_back(rtl::to_generic(unit));

    for (auto i : sample_indices(sites.size(), max_mutants, seed)) {
        const auto& site = sites[i];
        const auto& file = design.files()[site.file_index];
        auto attempt = [&](std::size_t begin, std::size_t end, const std::string& repl) -> std::optional<Mutant> {
            std::string text = file.text.substr(0, begin) + repl + file.text.substr(end);
            rtl::ParseResult parsed;
            try {
                parsed = rtl::parse_source(text, file.path);
            }
            catch (const Error&) {
                return std::nullopt;
            }
            auto diff = rtl::diff_nodes(originals[site.file_index], rtl::to_generic(parsed.unit));
            if (diff.size() != 1)
                return std::nullopt;
            Mutant m;
            m.file_index = site.file_index;
            m.spec.op = site.op;
            m.spec.location = {file.path, line_of(file.text, begin), diff[0]};
            m.spec.original_text = lines_around(file.text, begin, end);
            m.spec.mutated_text = lines_around(text, begin, begin + repl.size());
            m.mutated_source = std::move(text);
            return m;
        };
        auto m = attempt(site.begin, site.end, site.replacement);
        if (!m && site.fallback)
            m = attempt(site.fallback->first.first, site.fallback->first.second, site.fallback->second);
        if (!m || m->spec.original_text == m->spec.mutated_text) {
            result.warnings.push_back(std::string(to_string(site.op)) + " at " + file.path + ":" +
                                      std::to_string(line_of(file.text, site.begin)) +
                                      " does not yield a single-node edit; skipped");
            continue;
        }
        char id[16];
        std::snprintf(id, sizeof id, "m%04zu", result.mutants.size() + 1);
        m->spec.mutant_id = id;
        result.mutants.push_back(std::move(*m));
    }
    return result;
}

Json to_json(const MutantSpec& s) {
    return Json{{"mutant_id", s.mutant_id},
                {"operator", to_string(s.op)},
                {"location", {{"file", s.location.file}, {"line", s.location.line}, {"node_index", s.location.node_index}}},
                {"original_text", s.original_text},
                {"mutated_text", s.mutated_text}};
}

void write_mutants(const MutationResult& result, const rtl::RtlDesign& design, const std::filesystem::path& dir) {
    const auto& files = design.files();
    std::vector<std::string> names;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < files.size(); ++i) {
        auto base = std::filesystem::path(files[i].path).filename().string();
        names.push_back(seen.insert(base).second ? base : std::to_string(i) + "_" + base);
    }
    for (const auto& m : result.mutants) {
        auto mdir = dir / m.spec.mutant_id;
        for (std::size_t i = 0; i < files.size(); ++i)
            write_text_file(mdir / names[i], i == m.file_index ? m.mutated_source : files[i].text);
        write_json_file(mdir / "mutant.json", to_json(m.spec));
    }
}

double percent_2dp(std::size_t num, std::size_t den) {
    if (den == 0)
        fail(ErrorCode::PreconditionViolation, "percentage of an empty set");
    // integer half-up rounding avoids binary floating point ties
    std::uint64_t hundredths = (static_cast<std::uint64_t>(num) * 20000 + den) / (2 * static_cast<std::uint64_t>(den));
    return static_cast<double>(hundredths) / 100.0;
}

MetricsRecord compute_bdr(const std::vector<std::pair<std::string, bool>>& verdicts) {
    if (verdicts.empty())
        fail(ErrorCode::EmptyVerdicts, "no mutant verdicts");
    std::set<std::string> ids;
    std::size_t detected = 0;
    for (const auto& [id, hit] : verdicts) {
        if (!ids.insert(id).second)
            fail(ErrorCode::DuplicateMutant, "mutant '" + id + "' has more than one verdict");
        detected += hit ? 1 : 0;
    }
    MetricsRecord r;
    r.detected_mutants = detected;
    r.total_mutants = verdicts.size();
    r.bdr_percent = percent_2dp(detected, verdicts.size());
    return r;
}

std::vector<std::pair<std::string, bool>> read_verdicts(std::string_view csv) {
    auto lines = csv_lines(csv);
    if (lines.empty() || split_csv_line(lines[0]) != std::vector<std::string>{"mutant_id", "verdict"})
        fail(ErrorCode::SchemaMismatch, "verdict file must start with 'mutant_id,verdict'");
    std::vector<std::pair<std::string, bool>> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto cells = split_csv_line(lines[i]);
        if (cells.size() != 2 || cells[0].empty() || (cells[1] != "DETECTED" && cells[1] != "SURVIVED"))
            fail(ErrorCode::SchemaMismatch, "verdict row " + std::to_string(i) + " is malformed: " + lines[i]);
        out.emplace_back(cells[0], cells[1] == "DETECTED");
    }
    return out;
}

MetricsRecord ingest_fpv_text(std::string_view csv) {
    auto lines = csv_lines(csv);
    const std::vector<std::string> header{"property_id", "status", "coi_percent", "pc_percent"};
    if (lines.empty() || split_csv_line(lines[0]) != header)
        fail(ErrorCode::SchemaMismatch, "report must start with 'property_id,status,coi_percent,pc_percent'");
    std::size_t proven = 0, timeout = 0, total = 0;
    std::vector<double> coi, pc;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto cells = split_csv_line(lines[i]);
        if (cells.size() != 4 || cells[0].empty())
            fail(ErrorCode::SchemaMismatch, "row " + std::to_string(i) + " does not have 4 cells: " + lines[i]);
        const auto& status = cells[1];
        if (status == "proven")
            ++proven;
        else if (status == "timeout")
            ++timeout;
        else if (status != "cex" && status != "error")
            fail(ErrorCode::SchemaMismatch, "row " + std::to_string(i) + ": unknown status '" + status + "'");
        ++total;
        if (auto v = parse_percent(cells[2], i))
            coi.push_back(*v);
        if (auto v = parse_percent(cells[3], i))
            pc.push_back(*v);
    }
    if (total == 0)
        fail(ErrorCode::SchemaMismatch, "report lists no properties");
    MetricsRecord r;
    r.sva_total = total;
    r.timeout_passes = timeout;
    r.fpr_percent = percent_2dp(proven + timeout, total);
    auto mean = [](const std::vector<double>& v) -> std::optional<double> {
        if (v.empty())
            return std::nullopt;
        double s = 0;
        for (double x : v)
            s += x;
        return round_2dp(s / static_cast<double>(v.size()));
    };
    r.coi_percent = mean(coi);
    r.pc_percent = mean(pc);
    return r;
}

MetricsRecord ingest_fpv_report(const std::filesystem::path& report) {
    auto r = ingest_fpv_text(read_text_file(report));
    r.design_id = report.stem().string();
    return r;
}

Json to_json(const MetricsRecord& r) {
    auto opt = [](const auto& v) -> Json { return v ? Json(*v) : Json(nullptr); };
    return Json{{"design_id", r.design_id},           {"fpr_percent", opt(r.fpr_percent)},
                {"coi_percent", opt(r.coi_percent)},   {"pc_percent", opt(r.pc_percent)},
                {"bdr_percent", opt(r.bdr_percent)},   {"sva_total", r.sva_total},
                {"timeout_passes", r.timeout_passes},  {"detected_mutants", opt(r.detected_mutants)},
                {"total_mutants", opt(r.total_mutants)}};
}

std::vector<std::pair<std::string, bool>> collect_verdicts(const std::vector<std::string>& mutant_ids,
                                                           const std::filesystem::path& mutants_dir,
                                                           const VerifierOptions& options) {
    if (options.command_template.empty())
        fail(ErrorCode::ConfigError, "no verifier command configured");
    auto run_one = [&](const std::string& id) -> bool {
        std::string cmd = options.command_template;
        const std::string key = "{mutant_dir}";
        auto dir = (mutants_dir / id).string();
        for (auto p = cmd.find(key); p != std::string::npos; p = cmd.find(key, p + dir.size()))
            cmd.replace(p, key.size(), dir);
        FILE* pipe = ::popen(cmd.c_str(), "r");
        if (!pipe)
            fail(ErrorCode::BackendUnavailable, "cannot start verifier for " + id);
        std::string output;
        char buf[4096];
        while (auto n = std::fread(buf, 1, sizeof buf, pipe))
            output.append(buf, n);
        int status = ::pclose(pipe);
        if (status != 0)
            fail(ErrorCode::BackendUnavailable, "verifier exited with status " + std::to_string(status) + " for " + id);
        std::optional<bool> verdict;
        for (const auto& line : csv_lines(output)) {
            auto t = trim(line);
            if (t == "DETECTED")
                verdict = true;
            else if (t == "SURVIVED")
                verdict = false;
        }
        if (!verdict)
            fail(ErrorCode::BackendUnavailable, "verifier printed no DETECTED/SURVIVED line for " + id);
        return *verdict;
    };
    std::vector<std::pair<std::string, bool>> out;
    std::size_t workers = std::max<std::size_t>(1, options.workers);
    for (std::size_t start = 0; start < mutant_ids.size(); start += workers) {
        std::vector<std::future<bool>> batch;
        for (std::size_t i = start; i < std::min(mutant_ids.size(), start + workers); ++i)
            batch.push_back(std::async(std::launch::async, run_one, mutant_ids[i]));
        for (std::size_t i = 0; i < batch.size(); ++i)
            out.emplace_back(mutant_ids[start + i], batch[i].get());
    }
    return out;
}

} // namespace assertgen::mutation
