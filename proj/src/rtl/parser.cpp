#include "assertgen/rtl/parser.hpp"

#include <set>

#include "assertgen/error.hpp"

namespace assertgen::rtl {

namespace {

const std::set<std::string_view>& keywords() {
    static const std::set<std::string_view> kw = {
        "module", "endmodule", "macromodule", "input", "output", "inout", "wire", "reg", "logic",
        "tri", "integer", "genvar", "supply0", "supply1", "parameter", "localparam", "assign",
        "always", "always_ff", "always_comb", "always_latch", "initial", "begin", "end", "if",
        "else", "case", "casez", "casex", "endcase", "default", "for", "while", "repeat",
        "forever", "posedge", "negedge", "or", "and", "not", "generate", "endgenerate",
        "function", "endfunction", "task", "endtask", "specify", "endspecify", "signed",
        "unsigned", "defparam", "disable", "wait", "fork", "join", "buf", "nand", "nor", "xor",
        "xnor", "bufif0", "bufif1", "notif0", "notif1", "real", "time", "event", "property",
        "endproperty", "assert", "iff"};
    return kw;
}

const std::set<std::string_view>& gate_primitives() {
    static const std::set<std::string_view> g = {"and", "or", "not", "buf", "nand", "nor", "xor",
                                                 "xnor", "bufif0", "bufif1", "notif0", "notif1"};
    return g;
}

const std::set<std::string_view>& unary_ops() {
    static const std::set<std::string_view> u = {"+", "-", "!", "~", "&", "~&", "|", "~|", "^", "~^", "^~"};
    return u;
}

std::optional<DeclKind> decl_kind(std::string_view w) {
    static const std::pair<std::string_view, DeclKind> table[] = {
        {"input", DeclKind::Input},       {"output", DeclKind::Output},
        {"inout", DeclKind::Inout},       {"wire", DeclKind::Wire},
        {"reg", DeclKind::Reg},           {"logic", DeclKind::Logic},
        {"tri", DeclKind::Tri},           {"integer", DeclKind::Integer},
        {"genvar", DeclKind::Genvar},     {"supply0", DeclKind::Supply0},
        {"supply1", DeclKind::Supply1},   {"parameter", DeclKind::Parameter},
        {"localparam", DeclKind::Localparam},
    };
    for (auto& [name, k] : table)
        if (name == w)
            return k;
    return std::nullopt;
}

Expr make_expr(ExprKind kind, std::string text, std::vector<Expr> operands, SourceLoc loc) {
    Expr e;
    e.kind = kind;
    e.text = std::move(text);
    e.operands = std::move(operands);
    e.loc = loc;
    return e;
}

SourceLoc span(const SourceLoc& a, const SourceLoc& b) {
    SourceLoc l;
    l.begin = a.begin;
    l.end = b.end;
    l.first_line = a.first_line;
    l.last_line = b.last_line;
    return l;
}

} // namespace

int binary_precedence(std::string_view op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "|") return 3;
    if (op == "^" || op == "~^" || op == "^~") return 4;
    if (op == "&") return 5;
    if (op == "==" || op == "!=" || op == "===" || op == "!==") return 6;
    if (op == "<" || op == "<=" || op == ">" || op == ">=") return 7;
    if (op == "<<" || op == ">>" || op == "<<<" || op == ">>>") return 8;
    if (op == "+" || op == "-") return 9;
    if (op == "*" || op == "/" || op == "%") return 10;
    if (op == "**") return 11;
    return 0;
}

bool Parser::is_keyword(std::string_view word) {
    return keywords().contains(word);
}

Parser::Parser(std::string_view text, std::string_view file_name) : text_(text), file_(file_name) {
    auto lexed = lex(text, file_name);
    tokens_ = std::move(lexed.tokens);
    warnings_ = std::move(lexed.warnings);
}

Parser::Parser(std::vector<Token> tokens, std::string_view text, std::string_view file_name)
    : text_(text), file_(file_name), tokens_(std::move(tokens)) {
    if (tokens_.empty() || tokens_.back().kind != TokenKind::EndOfFile) {
        Token eof;
        eof.begin = eof.end = text.size();
        tokens_.push_back(eof);
    }
}

const Token& Parser::peek(std::size_t ahead) const {
    std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
}

const Token& Parser::next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size())
        ++pos_;
    return t;
}

bool Parser::at_end() const {
    return peek().kind == TokenKind::EndOfFile;
}

bool Parser::at(std::string_view s) const {
    const auto& t = peek();
    return (t.kind == TokenKind::Symbol || t.kind == TokenKind::Identifier) && t.text == s;
}

bool Parser::accept(std::string_view s) {
    if (!at(s))
        return false;
    next();
    return true;
}

void Parser::error(const std::string& expected) const {
    const auto& t = peek();
    std::string found = t.kind == TokenKind::EndOfFile ? "end of input" : "'" + t.text + "'";
    fail(ErrorCode::SyntaxError,
         file_ + ":" + std::to_string(t.line) + ": expected " + expected + ", found " + found);
}

const Token& Parser::expect(std::string_view s) {
    if (!at(s))
        error("'" + std::string(s) + "'");
    return next();
}

std::string Parser::expect_identifier() {
    const auto& t = peek();
    if (t.kind != TokenKind::Identifier || is_keyword(t.text))
        error("identifier");
    return next().text;
}

SourceLoc Parser::loc_from(const Token& first) const {
    const Token& last = tokens_[pos_ == 0 ? 0 : pos_ - 1];
    SourceLoc l;
    l.begin = first.begin;
    l.end = last.end;
    l.first_line = first.line;
    l.last_line = last.end_line;
    return l;
}

// ---------------------------------------------------------------------------
// Expressions

Expr Parser::parse_expr() {
    return parse_expr_prec(0);
}

Expr Parser::parse_expr_prec(int min_prec) {
    Expr lhs = parse_unary();
    while (true) {
        const Token& t = peek();
        if (t.kind != TokenKind::Symbol)
            break;
        if (t.text == "?") {
            if (min_prec > 0)
                break;
            next();
            Expr then_e = parse_expr_prec(0);
            expect(":");
            Expr else_e = parse_expr_prec(0);
            auto loc = span(lhs.loc, else_e.loc);
            std::vector<Expr> ops;
            ops.push_back(std::move(lhs));
            ops.push_back(std::move(then_e));
            ops.push_back(std::move(else_e));
            lhs = make_expr(ExprKind::Ternary, "", std::move(ops), loc);
            continue;
        }
        int prec = binary_precedence(t.text);
        if (prec == 0 || prec < min_prec)
            break;
        const Token& op = next();
        std::size_t op_begin = op.begin;
        std::string op_text = op.text;
        Expr rhs = parse_expr_prec(prec + 1);
        auto loc = span(lhs.loc, rhs.loc);
        loc.op_begin = op_begin;
        std::vector<Expr> ops;
        ops.push_back(std::move(lhs));
        ops.push_back(std::move(rhs));
        lhs = make_expr(ExprKind::Binary, std::move(op_text), std::move(ops), loc);
    }
    return lhs;
}

Expr Parser::parse_unary() {
    const Token& t = peek();
    if (t.kind == TokenKind::Symbol && unary_ops().contains(t.text)) {
        const Token& op = next();
        SourceLoc start{op.begin, op.end, op.line, op.end_line, op.begin};
        std::string op_text = op.text;
        Expr operand = parse_unary();
        auto loc = span(start, operand.loc);
        loc.op_begin = start.begin;
        std::vector<Expr> ops;
        ops.push_back(std::move(operand));
        return make_expr(ExprKind::Unary, std::move(op_text), std::move(ops), loc);
    }
    return parse_postfix(parse_primary());
}

Expr Parser::parse_primary() {
    const Token& first = peek();
    switch (first.kind) {
        case TokenKind::Number:
            next();
            return make_expr(ExprKind::Number, first.text, {}, loc_from(first));
        case TokenKind::String:
            next();
            return make_expr(ExprKind::String, first.text, {}, loc_from(first));
        case TokenKind::Macro:
            next();
            return make_expr(ExprKind::Macro, first.text, {}, loc_from(first));
        case TokenKind::SystemIdentifier: {
            std::string name = next().text;
            std::vector<Expr> args;
            if (accept("(")) {
                if (!at(")")) {
                    do {
                        args.push_back(parse_expr());
                    } while (accept(","));
                }
                expect(")");
            }
            return make_expr(ExprKind::Call, std::move(name), std::move(args), loc_from(first));
        }
        case TokenKind::Identifier: {
            if (is_keyword(first.text))
                error("expression");
            std::string name = next().text;
            while (at(".") && peek(1).kind == TokenKind::Identifier && !is_keyword(peek(1).text)) {
                next();
                name += "." + next().text;
            }
            if (at("(")) {
                next();
                std::vector<Expr> args;
                if (!at(")")) {
                    do {
                        args.push_back(parse_expr());
                    } while (accept(","));
                }
                expect(")");
                return make_expr(ExprKind::Call, std::move(name), std::move(args), loc_from(first));
            }
            return make_expr(ExprKind::Identifier, std::move(name), {}, loc_from(first));
        }
        case TokenKind::Symbol:
            if (first.text == "(") {
                next();
                Expr e = parse_expr();
                expect(")");
                // the span covers the parentheses so that text splices stay balanced
                auto op_begin = e.loc.op_begin;
                e.loc = loc_from(first);
                e.loc.op_begin = op_begin;
                return e;
            }
            if (first.text == "{") {
                next();
                Expr head = parse_expr();
                if (at("{")) {
                    next();
                    const Token& inner_first = tokens_[pos_ - 1];
                    std::vector<Expr> elems;
                    do {
                        elems.push_back(parse_expr());
                    } while (accept(","));
                    expect("}");
                    Expr inner = make_expr(ExprKind::Concat, "", std::move(elems), loc_from(inner_first));
                    expect("}");
                    std::vector<Expr> ops;
                    ops.push_back(std::move(head));
                    ops.push_back(std::move(inner));
                    return make_expr(ExprKind::Replicate, "", std::move(ops), loc_from(first));
                }
                std::vector<Expr> elems;
                elems.push_back(std::move(head));
                while (accept(","))
                    elems.push_back(parse_expr());
                expect("}");
                return make_expr(ExprKind::Concat, "", std::move(elems), loc_from(first));
            }
            break;
        case TokenKind::EndOfFile:
            break;
    }
    error("expression");
}

Expr Parser::parse_postfix(Expr base) {
    while (at("[")) {
        next();
        Expr a = parse_expr();
        std::string range_op;
        if (at(":") || at("+:") || at("-:"))
            range_op = next().text;
        std::vector<Expr> ops;
        const SourceLoc base_loc = base.loc;
        ops.push_back(std::move(base));
        ops.push_back(std::move(a));
        if (!range_op.empty())
            ops.push_back(parse_expr());
        expect("]");
        const Token& close = tokens_[pos_ - 1];
        SourceLoc loc = base_loc;
        loc.end = close.end;
        loc.last_line = close.end_line;
        base = make_expr(range_op.empty() ? ExprKind::Index : ExprKind::Range, range_op, std::move(ops), loc);
    }
    return base;
}

Expr Parser::parse_lvalue() {
    const Token& t = peek();
    if (t.kind == TokenKind::Symbol && t.text == "{")
        return parse_primary();
    if (t.kind != TokenKind::Identifier || is_keyword(t.text))
        error("assignment target");
    std::string name = next().text;
    while (at(".") && peek(1).kind == TokenKind::Identifier && !is_keyword(peek(1).text)) {
        next();
        name += "." + next().text;
    }
    return parse_postfix(make_expr(ExprKind::Identifier, std::move(name), {}, loc_from(t)));
}

// ---------------------------------------------------------------------------
// Statements

Stmt Parser::parse_assignment_stmt(bool allow_nonblocking, bool expect_semicolon) {
    const Token& first = peek();
    Stmt s;
    Expr lhs = parse_lvalue();
    if (accept("="))
        s.kind = StmtKind::Blocking;
    else if (allow_nonblocking && accept("<="))
        s.kind = StmtKind::NonBlocking;
    else
        error(allow_nonblocking ? "'=' or '<='" : "'='");
    std::optional<Expr> delay;
    if (accept("#"))
        delay = parse_primary();
    Expr rhs = parse_expr();
    s.exprs.push_back(std::move(lhs));
    s.exprs.push_back(std::move(rhs));
    if (delay)
        s.exprs.push_back(std::move(*delay));
    if (expect_semicolon)
        expect(";");
    s.loc = loc_from(first);
    return s;
}

void Parser::parse_event_control(Stmt& s) {
    if (accept("*")) {
        s.star = true;
        return;
    }
    if (peek().kind == TokenKind::Identifier && !is_keyword(peek().text)) {
        Event ev;
        ev.expr = parse_primary();
        s.events.push_back(std::move(ev));
        return;
    }
    expect("(");
    if (accept("*")) {
        s.star = true;
        expect(")");
        return;
    }
    do {
        Event ev;
        if (at("posedge") || at("negedge"))
            ev.edge = next().text;
        ev.expr = parse_expr();
        s.events.push_back(std::move(ev));
    } while (accept("or") || accept(","));
    expect(")");
}

Stmt Parser::parse_stmt() {
    const Token& first = peek();
    Stmt s;
    if (accept("begin")) {
        s.kind = StmtKind::Block;
        if (accept(":"))
            s.text = expect_identifier();
        while (!at("end")) {
            if (at_end())
                error("'end'");
            s.body.push_back(parse_stmt());
        }
        expect("end");
        if (accept(":"))
            expect_identifier();
    }
    else if (accept("if")) {
        s.kind = StmtKind::If;
        expect("(");
        s.exprs.push_back(parse_expr());
        expect(")");
        s.body.push_back(parse_stmt());
        if (accept("else"))
            s.body.push_back(parse_stmt());
    }
    else if (at("case") || at("casez") || at("casex")) {
        s.kind = StmtKind::Case;
        s.text = next().text;
        expect("(");
        s.exprs.push_back(parse_expr());
        expect(")");
        while (!at("endcase")) {
            if (at_end())
                error("'endcase'");
            CaseItem item;
            if (accept("default")) {
                item.is_default = true;
                accept(":");
            }
            else {
                do {
                    item.labels.push_back(parse_expr());
                } while (accept(","));
                expect(":");
            }
            item.body.push_back(parse_stmt());
            s.items.push_back(std::move(item));
        }
        expect("endcase");
    }
    else if (accept("for")) {
        s.kind = StmtKind::For;
        expect("(");
        Stmt init = parse_assignment_stmt(false, false);
        expect(";");
        s.exprs.push_back(parse_expr());
        expect(";");
        Stmt step = parse_assignment_stmt(false, false);
        expect(")");
        s.body.push_back(std::move(init));
        s.body.push_back(std::move(step));
        s.body.push_back(parse_stmt());
    }
    else if (at("while") || at("repeat")) {
        s.kind = next().text == "while" ? StmtKind::While : StmtKind::Repeat;
        expect("(");
        s.exprs.push_back(parse_expr());
        expect(")");
        s.body.push_back(parse_stmt());
    }
    else if (accept("forever")) {
        s.kind = StmtKind::Forever;
        s.body.push_back(parse_stmt());
    }
    else if (accept("@")) {
        s.kind = StmtKind::EventControl;
        parse_event_control(s);
        s.body.push_back(parse_stmt());
    }
    else if (accept("#")) {
        s.kind = StmtKind::Delay;
        s.exprs.push_back(parse_primary());
        s.body.push_back(parse_stmt());
    }
    else if (first.kind == TokenKind::SystemIdentifier) {
        s.kind = StmtKind::TaskCall;
        s.text = next().text;
        if (accept("(")) {
            if (!at(")")) {
                do {
                    s.exprs.push_back(parse_expr());
                } while (accept(","));
            }
            expect(")");
        }
        expect(";");
    }
    else if (accept("disable")) {
        s.kind = StmtKind::Disable;
        s.text = expect_identifier();
        expect(";");
    }
    else if (accept(";")) {
        s.kind = StmtKind::Null;
    }
    else if (first.kind == TokenKind::Identifier && !is_keyword(first.text) && peek(1).kind == TokenKind::Symbol &&
             peek(1).text == "(") {
        s.kind = StmtKind::TaskCall;
        s.text = next().text;
        next();
        if (!at(")")) {
            do {
                s.exprs.push_back(parse_expr());
            } while (accept(","));
        }
        expect(")");
        expect(";");
    }
    else {
        return parse_assignment_stmt(true, true);
    }
    s.loc = loc_from(first);
    return s;
}

// ---------------------------------------------------------------------------
// Module items

std::optional<RangeDecl> Parser::parse_optional_range() {
    if (!accept("["))
        return std::nullopt;
    RangeDecl r;
    r.left = parse_expr();
    expect(":");
    r.right = parse_expr();
    expect("]");
    return r;
}

Declaration Parser::parse_declaration(DeclKind kind, bool in_port_list) {
    const Token& first = peek();
    Declaration d;
    d.kind = kind;
    next(); // keyword
    if (is_direction(kind) && (at("wire") || at("reg") || at("logic") || at("tri")))
        d.net_type = next().text;
    if ((kind == DeclKind::Parameter || kind == DeclKind::Localparam) && at("integer"))
        d.net_type = next().text;
    if (accept("signed"))
        d.is_signed = true;
    else
        accept("unsigned");
    d.range = parse_optional_range();
    while (true) {
        const Token& nt = peek();
        Declarator dn;
        dn.name = expect_identifier();
        while (auto r = parse_optional_range())
            dn.unpacked.push_back(std::move(*r));
        if (accept("="))
            dn.init = parse_expr();
        dn.loc = loc_from(nt);
        d.names.push_back(std::move(dn));
        if (in_port_list) {
            if (at(",") && peek(1).kind == TokenKind::Identifier && !decl_kind(peek(1).text)) {
                next();
                continue;
            }
            break;
        }
        if (!accept(","))
            break;
    }
    if (!in_port_list)
        expect(";");
    d.loc = loc_from(first);
    return d;
}

Opaque Parser::parse_opaque(std::string_view begin_kw, std::string_view end_kw) {
    const Token& first = peek();
    int depth = 0;
    while (true) {
        if (at_end())
            error("'" + std::string(end_kw) + "'");
        if (at(begin_kw))
            ++depth;
        if (at(end_kw) && --depth == 0) {
            next();
            break;
        }
        next();
    }
    Opaque o;
    o.keyword = std::string(begin_kw);
    o.loc = loc_from(first);
    o.text = std::string(text_.substr(o.loc.begin, o.loc.end - o.loc.begin));
    warnings_.push_back(file_ + ":" + std::to_string(first.line) + ": unsupported construct '" +
                        std::string(begin_kw) + "' kept as an opaque region");
    return o;
}

Opaque Parser::parse_opaque_statement() {
    const Token& first = peek();
    int depth = 0;
    while (true) {
        if (at_end())
            error("';'");
        if (at("(") || at("[") || at("{"))
            ++depth;
        else if (at(")") || at("]") || at("}"))
            --depth;
        else if (at(";") && depth == 0) {
            next();
            break;
        }
        next();
    }
    Opaque o;
    o.keyword = first.text;
    o.loc = loc_from(first);
    o.text = std::string(text_.substr(o.loc.begin, o.loc.end - o.loc.begin));
    warnings_.push_back(file_ + ":" + std::to_string(first.line) + ": unsupported statement '" + first.text +
                        "' kept as an opaque region");
    return o;
}

Instantiation Parser::parse_instantiation() {
    const Token& first = peek();
    Instantiation inst;
    inst.module_name = expect_identifier();
    if (accept("#")) {
        inst.has_param_list = true;
        expect("(");
        if (!at(")")) {
            do {
                ParamOverride p;
                if (accept(".")) {
                    p.name = expect_identifier();
                    expect("(");
                    if (!at(")"))
                        p.value = parse_expr();
                    expect(")");
                }
                else {
                    p.value = parse_expr();
                }
                inst.params.push_back(std::move(p));
            } while (accept(","));
        }
        expect(")");
    }
    do {
        const Token& it = peek();
        InstanceDecl d;
        d.name = expect_identifier();
        expect("(");
        if (!at(")")) {
            do {
                const Token& ct = peek();
                PortConnection c;
                if (accept(".")) {
                    c.formal = expect_identifier();
                    expect("(");
                    if (!at(")"))
                        c.actual = parse_expr();
                    expect(")");
                }
                else {
                    c.actual = parse_expr();
                }
                c.loc = loc_from(ct);
                d.connections.push_back(std::move(c));
            } while (accept(","));
        }
        expect(")");
        d.loc = loc_from(it);
        inst.instances.push_back(std::move(d));
    } while (accept(","));
    expect(";");
    inst.loc = loc_from(first);
    return inst;
}

void Parser::parse_module_item(std::vector<ModuleItem>& items) {
    const Token& t = peek();
    if (accept(";"))
        return;
    if (t.kind == TokenKind::Identifier) {
        if (auto k = decl_kind(t.text)) {
            items.emplace_back(parse_declaration(*k, false));
            return;
        }
        if (t.text == "assign") {
            const Token& first = t;
            next();
            if (accept("#")) {
                parse_primary();
                warnings_.push_back(file_ + ":" + std::to_string(first.line) + ": assignment delay ignored");
            }
            ContinuousAssign ca;
            do {
                Expr lhs = parse_lvalue();
                expect("=");
                Expr rhs = parse_expr();
                ca.assignments.emplace_back(std::move(lhs), std::move(rhs));
            } while (accept(","));
            expect(";");
            ca.loc = loc_from(first);
            items.emplace_back(std::move(ca));
            return;
        }
        if (t.text == "always" || t.text == "always_ff" || t.text == "always_comb" ||
            t.text == "always_latch" || t.text == "initial") {
            const Token& first = t;
            ProceduralBlock pb;
            pb.keyword = next().text;
            pb.body = parse_stmt();
            pb.loc = loc_from(first);
            items.emplace_back(std::move(pb));
            return;
        }
        if (t.text == "generate") {
            items.emplace_back(parse_opaque("generate", "endgenerate"));
            return;
        }
        if (t.text == "function") {
            items.emplace_back(parse_opaque("function", "endfunction"));
            return;
        }
        if (t.text == "task") {
            items.emplace_back(parse_opaque("task", "endtask"));
            return;
        }
        if (t.text == "specify") {
            items.emplace_back(parse_opaque("specify", "endspecify"));
            return;
        }
        if (t.text == "defparam" || gate_primitives().contains(t.text)) {
            items.emplace_back(parse_opaque_statement());
            return;
        }
        if (!is_keyword(t.text) && (peek(1).kind == TokenKind::Identifier || (peek(1).kind == TokenKind::Symbol && peek(1).text == "#"))) {
            items.emplace_back(parse_instantiation());
            return;
        }
    }
    error("module item");
}

Module Parser::parse_module() {
    const Token& first = peek();
    if (!accept("module") && !accept("macromodule"))
        error("'module'");
    Module m;
    m.name = expect_identifier();
    if (accept("#")) {
        m.has_header_params = true;
        expect("(");
        if (!at(")")) {
            while (true) {
                const Token& gt = peek();
                Declaration d;
                d.kind = DeclKind::Parameter;
                if (at("parameter") || at("localparam"))
                    d.kind = next().text == "parameter" ? DeclKind::Parameter : DeclKind::Localparam;
                if (at("integer"))
                    d.net_type = next().text;
                if (accept("signed"))
                    d.is_signed = true;
                d.range = parse_optional_range();
                while (true) {
                    const Token& nt = peek();
                    Declarator dn;
                    dn.name = expect_identifier();
                    if (accept("="))
                        dn.init = parse_expr();
                    dn.loc = loc_from(nt);
                    d.names.push_back(std::move(dn));
                    if (at(",") && peek(1).kind == TokenKind::Identifier && peek(1).text != "parameter" &&
                        peek(1).text != "localparam") {
                        next();
                        continue;
                    }
                    break;
                }
                d.loc = loc_from(gt);
                m.header_params.push_back(std::move(d));
                if (!accept(","))
                    break;
            }
        }
        expect(")");
    }
    if (accept("(")) {
        m.has_port_list = true;
        if (!at(")")) {
            if (at("input") || at("output") || at("inout")) {
                m.ansi = true;
                while (true) {
                    auto k = decl_kind(peek().text);
                    if (!k || !is_direction(*k))
                        error("port direction");
                    m.ansi_ports.push_back(parse_declaration(*k, true));
                    if (!accept(","))
                        break;
                }
            }
            else {
                do {
                    m.port_names.push_back(expect_identifier());
                } while (accept(","));
            }
        }
        expect(")");
    }
    expect(";");
    while (!at("endmodule")) {
        if (at_end())
            error("'endmodule'");
        parse_module_item(m.items);
    }
    expect("endmodule");
    if (accept(":"))
        expect_identifier();
    m.loc = loc_from(first);
    return m;
}

SourceUnit Parser::parse_unit() {
    SourceUnit unit;
    while (!at_end()) {
        if (accept(";"))
            continue;
        unit.modules.push_back(parse_module());
    }
    return unit;
}

// ---------------------------------------------------------------------------

ParseResult parse_source(std::string_view text, std::string_view file_name) {
    Parser p(text, file_name);
    ParseResult r;
    r.unit = p.parse_unit();
    r.warnings = std::move(p.warnings());
    return r;
}

std::vector<ModuleItem> parse_module_items(std::string_view text, std::string_view file_name) {
    Parser p(text, file_name);
    std::vector<ModuleItem> items;
    while (!p.at_end())
        p.parse_module_item(items);
    return items;
}

Stmt parse_statement(std::string_view text, std::string_view file_name) {
    Parser p(text, file_name);
    Stmt s = p.parse_stmt();
    if (!p.at_end())
        p.error("end of input");
    return s;
}

Expr parse_expression(std::string_view text, std::string_view file_name) {
    Parser p(text, file_name);
    Expr e = p.parse_expr();
    if (!p.at_end())
        p.error("end of input");
    return e;
}

} // namespace assertgen::rtl
