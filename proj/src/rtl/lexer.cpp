#include "assertgen/rtl/lexer.hpp"

#include <array>
#include <cctype>

#include "assertgen/error.hpp"

namespace assertgen::rtl {

namespace {

constexpr std::array<std::string_view, 13> kLineDirectives = {
    "timescale", "define", "undef", "include", "ifdef", "ifndef", "else", "elsif", "endif",
    "default_nettype", "resetall", "celldefine", "endcelldefine"};

// Longest first.
constexpr std::array<std::string_view, 33> kSymbols = {
    "<<<=", ">>>=", "===", "!==", "<<<", ">>>", "|->", "|=>", "##", "->", "<=", ">=", "==", "!=",
    "&&", "||", "**", "<<", ">>", "~&", "~|", "~^", "^~", "+:", "-:", "::",
    "(", ")", "[", "]", "{", "}", ","};

constexpr std::string_view kSingle = ";:.#@?=+-*/%&|^~!<>";

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool based_digit(char c) {
    return std::isxdigit(static_cast<unsigned char>(c)) || c == '_' || c == 'x' || c == 'X' || c == 'z' ||
           c == 'Z' || c == '?';
}

class Lexer {
public:
    Lexer(std::string_view text, std::string_view file) : s_(text), file_(file) {}

    LexResult run() {
        LexResult out;
        while (true) {
            skip_space_and_comments();
            if (pos_ >= s_.size())
                break;
            Token t;
            t.begin = pos_;
            t.line = line_;
            char c = s_[pos_];
            if (c == '`') {
                ++pos_;
                std::size_t b = pos_;
                while (pos_ < s_.size() && ident_char(s_[pos_]))
                    ++pos_;
                std::string_view name = s_.substr(b, pos_ - b);
                bool directive = false;
                for (auto d : kLineDirectives)
                    if (d == name)
                        directive = true;
                if (directive) {
                    if (name == "ifdef" || name == "ifndef" || name == "else" || name == "elsif")
                        out.warnings.push_back(std::string(file_) + ":" + std::to_string(line_) +
                                               ": conditional compilation `" + std::string(name) +
                                               " ignored; all branches are parsed");
                    skip_directive_line();
                    continue;
                }
                t.kind = TokenKind::Macro;
                t.text = "`" + std::string(name);
            }
            else if (ident_start(c)) {
                while (pos_ < s_.size() && ident_char(s_[pos_]))
                    ++pos_;
                t.kind = TokenKind::Identifier;
                t.text = std::string(s_.substr(t.begin, pos_ - t.begin));
            }
            else if (c == '\\') {
                while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])))
                    ++pos_;
                t.kind = TokenKind::Identifier;
                t.text = std::string(s_.substr(t.begin, pos_ - t.begin));
            }
            else if (c == '$' && pos_ + 1 < s_.size() && ident_start(s_[pos_ + 1])) {
                ++pos_;
                while (pos_ < s_.size() && ident_char(s_[pos_]))
                    ++pos_;
                t.kind = TokenKind::SystemIdentifier;
                t.text = std::string(s_.substr(t.begin, pos_ - t.begin));
            }
            else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '\'' && pos_ + 1 < s_.size())) {
                t.kind = TokenKind::Number;
                t.text = lex_number();
            }
            else if (c == '"') {
                ++pos_;
                while (pos_ < s_.size() && s_[pos_] != '"') {
                    if (s_[pos_] == '\\')
                        ++pos_;
                    if (pos_ < s_.size() && s_[pos_] == '\n')
                        error("newline in string literal");
                    ++pos_;
                }
                if (pos_ >= s_.size())
                    error("unterminated string literal");
                ++pos_;
                t.kind = TokenKind::String;
                t.text = std::string(s_.substr(t.begin, pos_ - t.begin));
            }
            else {
                t.kind = TokenKind::Symbol;
                t.text = lex_symbol();
            }
            t.end = pos_;
            t.end_line = line_;
            out.tokens.push_back(std::move(t));
        }
        Token eof;
        eof.kind = TokenKind::EndOfFile;
        eof.begin = eof.end = s_.size();
        eof.line = eof.end_line = line_;
        out.tokens.push_back(eof);
        return out;
    }

private:
    [[noreturn]] void error(const std::string& msg) {
        fail(ErrorCode::SyntaxError, std::string(file_) + ":" + std::to_string(line_) + ": " + msg);
    }

    void advance() {
        if (s_[pos_] == '\n')
            ++line_;
        ++pos_;
    }

    void skip_directive_line() {
        while (pos_ < s_.size() && s_[pos_] != '\n') {
            if (s_[pos_] == '\\' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '\n')
                advance();
            advance();
        }
    }

    void skip_space_and_comments() {
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            }
            else if (c == '/' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '/') {
                while (pos_ < s_.size() && s_[pos_] != '\n')
                    ++pos_;
            }
            else if (c == '/' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '*') {
                pos_ += 2;
                while (pos_ + 1 < s_.size() && !(s_[pos_] == '*' && s_[pos_ + 1] == '/'))
                    advance();
                if (pos_ + 1 >= s_.size())
                    error("unterminated block comment");
                pos_ += 2;
            }
            else if (c == '(' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '*' && !is_star_event()) {
                // attribute instance (* ... *)
                pos_ += 2;
                while (pos_ + 1 < s_.size() && !(s_[pos_] == '*' && s_[pos_ + 1] == ')'))
                    advance();
                if (pos_ + 1 >= s_.size())
                    error("unterminated attribute");
                pos_ += 2;
            }
            else {
                break;
            }
        }
    }

    // "(*)" as used in "@(*)", possibly with blanks before ')'.
    bool is_star_event() const {
        std::size_t p = pos_ + 2;
        while (p < s_.size() && (s_[p] == ' ' || s_[p] == '\t'))
            ++p;
        return p < s_.size() && s_[p] == ')';
    }

    std::string lex_number() {
        std::string text;
        auto take_digits = [&](auto pred) {
            while (pos_ < s_.size() && pred(s_[pos_]))
                text.push_back(s_[pos_++]);
        };
        if (std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            take_digits([](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '_'; });
            // real literal
            if (pos_ + 1 < s_.size() && s_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
                text.push_back(s_[pos_++]);
                take_digits([](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '_'; });
            }
            if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
                std::size_t p = pos_ + 1;
                if (p < s_.size() && (s_[p] == '+' || s_[p] == '-'))
                    ++p;
                if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
                    while (pos_ < p)
                        text.push_back(s_[pos_++]);
                    take_digits([](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '_'; });
                }
            }
            // optional base after size, possibly separated by blanks
            std::size_t p = pos_;
            while (p < s_.size() && (s_[p] == ' ' || s_[p] == '\t'))
                ++p;
            if (p < s_.size() && s_[p] == '\'' && is_base_at(p + 1))
                pos_ = p;
            else
                return text;
        }
        // s_[pos_] == '\''
        text.push_back(s_[pos_++]);
        if (pos_ < s_.size() && (s_[pos_] == 's' || s_[pos_] == 'S'))
            text.push_back(s_[pos_++]);
        if (pos_ >= s_.size())
            error("truncated number literal");
        char base = s_[pos_];
        if (std::string_view("bBoOdDhH").find(base) == std::string_view::npos) {
            // unbased unsized literal: '0 '1 'x 'z
            if (std::string_view("01xXzZ").find(base) == std::string_view::npos)
                error("malformed number literal");
            text.push_back(s_[pos_++]);
            return text;
        }
        text.push_back(s_[pos_++]);
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t'))
            ++pos_;
        std::size_t before = text.size();
        take_digits(based_digit);
        if (text.size() == before)
            error("number literal without digits");
        return text;
    }

    bool is_base_at(std::size_t p) const {
        if (p < s_.size() && (s_[p] == 's' || s_[p] == 'S'))
            ++p;
        return p < s_.size() && std::string_view("bBoOdDhH").find(s_[p]) != std::string_view::npos;
    }

    std::string lex_symbol() {
        for (auto sym : kSymbols) {
            if (s_.substr(pos_, sym.size()) == sym) {
                pos_ += sym.size();
                return std::string(sym);
            }
        }
        char c = s_[pos_];
        if (kSingle.find(c) != std::string_view::npos) {
            ++pos_;
            return std::string(1, c);
        }
        error(std::string("unexpected character '") + c + "'");
    }

    std::string_view s_;
    std::string_view file_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

} // namespace

LexResult lex(std::string_view text, std::string_view file_name) {
    return Lexer(text, file_name).run();
}

} // namespace assertgen::rtl
