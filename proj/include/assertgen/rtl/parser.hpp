// Recursive-descent parser for the supported Verilog subset.
//
// Supported: module/endmodule with ANSI and non-ANSI port lists, parameter
// ports, input/output/inout/wire/reg/logic/integer declarations with ranges,
// parameters, continuous assigns, always/initial blocks with the usual
// procedural statements, and module instantiation with named or positional
// connections. generate regions, functions, tasks, specify blocks and gate
// primitives are kept as opaque text with a warning.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "assertgen/rtl/ast.hpp"
#include "assertgen/rtl/lexer.hpp"

namespace assertgen::rtl {

struct ParseResult {
    SourceUnit unit;
    std::vector<std::string> warnings;
};

/// Throws SyntaxError with "file:line: expected ..." messages.
ParseResult parse_source(std::string_view text, std::string_view file_name = "<input>");

/// Parses a sequence of module items (no module header).
std::vector<ModuleItem> parse_module_items(std::string_view text, std::string_view file_name = "<input>");
Stmt parse_statement(std::string_view text, std::string_view file_name = "<input>");
Expr parse_expression(std::string_view text, std::string_view file_name = "<input>");

/// Token-level parser. Public so that other grammars that embed Verilog
/// expressions (the SVA body checker) can drive it.
class Parser {
public:
    Parser(std::string_view text, std::string_view file_name);
    Parser(std::vector<Token> tokens, std::string_view text, std::string_view file_name);

    SourceUnit parse_unit();
    Module parse_module();
    void parse_module_item(std::vector<ModuleItem>& items);
    Stmt parse_stmt();
    Expr parse_expr();
    /// An expression that stops before binary operators of precedence lower
    /// than `min_prec` (0 accepts everything including ?:).
    Expr parse_expr_prec(int min_prec);

    const Token& peek(std::size_t ahead = 0) const;
    const Token& next();
    bool at(std::string_view symbol_or_keyword) const;
    bool accept(std::string_view symbol_or_keyword);
    const Token& expect(std::string_view symbol_or_keyword);
    std::string expect_identifier();
    bool at_end() const;
    std::size_t position() const { return pos_; }
    void rewind(std::size_t pos) { pos_ = pos; }
    [[noreturn]] void error(const std::string& expected) const;

    std::vector<std::string>& warnings() { return warnings_; }

    static bool is_keyword(std::string_view word);

private:
    Expr parse_unary();
    Expr parse_primary();
    Expr parse_postfix(Expr base);
    Expr parse_lvalue();
    Stmt parse_assignment_stmt(bool allow_nonblocking, bool expect_semicolon);
    void parse_event_control(Stmt& s);
    Declaration parse_declaration(DeclKind kind, bool in_port_list);
    std::optional<RangeDecl> parse_optional_range();
    Instantiation parse_instantiation();
    Opaque parse_opaque(std::string_view begin_kw, std::string_view end_kw);
    Opaque parse_opaque_statement();
    SourceLoc loc_from(const Token& first) const;

    std::string_view text_;
    std::string file_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::vector<std::string> warnings_;
};

int binary_precedence(std::string_view op);

} // namespace assertgen::rtl
