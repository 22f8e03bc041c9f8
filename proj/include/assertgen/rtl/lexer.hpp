// Tokenizer shared by the Verilog parser and the SVA body checker.
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace assertgen::rtl {

enum class TokenKind { Identifier, SystemIdentifier, Macro, Number, String, Symbol, EndOfFile };

struct Token {
    TokenKind kind = TokenKind::EndOfFile;
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;
    int line = 1;
    int end_line = 1;
};

struct LexResult {
    std::vector<Token> tokens; // always terminated by EndOfFile
    std::vector<std::string> warnings;
};

/// Skips comments, attributes and line directives (`timescale, `define, ...).
/// Throws SyntaxError on unterminated comments or strings and on stray characters.
LexResult lex(std::string_view text, std::string_view file_name = "<input>");

} // namespace assertgen::rtl
