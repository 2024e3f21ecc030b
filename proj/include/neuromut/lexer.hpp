#pragma once

#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "neuromut/errors.hpp"

namespace neuromut {

enum class TokenKind { Keyword, Separator, Operator, Identifier, Literal };
enum class LiteralKind { String, Char, Int, Float };
enum class Role { Var, Type, Method };

struct Token {
    std::string text;
    TokenKind kind = TokenKind::Identifier;
    std::optional<LiteralKind> literal_kind;
    std::optional<Role> role;
    // position within the lexed buffer
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t offset = 0;

    bool operator==(const Token& o) const {
        return text == o.text && kind == o.kind && literal_kind == o.literal_kind &&
               role == o.role;
    }
};

inline constexpr std::array kKeywords = {
    "abstract", "boolean", "break",   "byte",       "case",    "catch",   "char",
    "class",    "continue", "default", "do",         "double",  "else",    "extends",
    "final",    "finally", "float",   "for",        "if",      "implements", "import",
    "instanceof", "int",   "interface", "long",     "new",     "null",    "package",
    "private",  "protected", "public", "return",    "short",   "static",  "super",
    "switch",   "synchronized", "this", "throw",    "throws",  "true",    "false",
    "try",      "void",    "while",
};

inline constexpr std::array kSeparators = {
    "(", ")", "{", "}", "[", "]", ";", ",", ".", "@",
};

// Longest-match order matters: multi-character operators first.
inline constexpr std::array kOperators = {
    ">>>=", "<<=", ">>=", ">>>", "==", "!=", "<=", ">=", "&&", "||", "++", "--",
    "+=",  "-=",  "*=",  "/=",  "%=", "&=", "|=", "^=", "<<", ">>", "=",  "+",
    "-",   "*",   "/",   "%",   "<",  ">",  "!",  "~",  "&",  "|",  "^",  "?",
    ":",
};

inline bool is_keyword(std::string_view s) {
    for (auto k : kKeywords)
        if (s == k) return true;
    return false;
}

inline bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

inline bool is_ident_part(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

namespace detail {

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (skip_trivia(), pos_ < src_.size()) {
            out.push_back(next_token());
        }
        return out;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;

    [[noreturn]] void fail(const std::string& msg) { throw LexError(line_, col_, msg); }

    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_trivia() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                std::size_t sl = line_, sc = col_;
                advance();
                advance();
                while (true) {
                    if (pos_ >= src_.size()) throw LexError(sl, sc, "unterminated block comment");
                    if (src_[pos_] == '*' && peek(1) == '/') {
                        advance();
                        advance();
                        break;
                    }
                    advance();
                }
            } else {
                break;
            }
        }
    }

    Token make(std::size_t start, TokenKind kind, std::size_t line, std::size_t col,
               std::optional<LiteralKind> lk = std::nullopt) {
        Token t;
        t.text = std::string(src_.substr(start, pos_ - start));
        t.kind = kind;
        t.literal_kind = lk;
        t.line = line;
        t.column = col;
        t.offset = start;
        return t;
    }

    Token next_token() {
        std::size_t start = pos_, line = line_, col = col_;
        char c = src_[pos_];

        if (is_ident_start(c)) {
            while (pos_ < src_.size() && is_ident_part(src_[pos_])) advance();
            auto text = src_.substr(start, pos_ - start);
            return make(start, is_keyword(text) ? TokenKind::Keyword : TokenKind::Identifier,
                        line, col);
        }

        if (std::isdigit(static_cast<unsigned char>(c))) return lex_number(start, line, col);
        if (c == '"') return lex_string(start, line, col);
        if (c == '\'') return lex_char(start, line, col);

        for (auto sep : kSeparators) {
            if (c == sep[0]) {
                advance();
                return make(start, TokenKind::Separator, line, col);
            }
        }
        for (auto op : kOperators) {
            std::string_view o(op);
            if (src_.substr(pos_, o.size()) == o) {
                for (std::size_t i = 0; i < o.size(); ++i) advance();
                return make(start, TokenKind::Operator, line, col);
            }
        }
        fail(std::string("illegal character '") + c + "'");
    }

    Token lex_number(std::size_t start, std::size_t line, std::size_t col) {
        bool is_float = false;
        if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
            advance();
            advance();
            if (!std::isxdigit(static_cast<unsigned char>(peek()))) fail("malformed hex literal");
            while (std::isxdigit(static_cast<unsigned char>(peek()))) advance();
            if (peek() == 'l' || peek() == 'L') advance();
            return make(start, TokenKind::Literal, line, col, LiteralKind::Int);
        }
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
        if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            is_float = true;
            advance();
            while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
        }
        if (peek() == 'e' || peek() == 'E') {
            std::size_t save = pos_;
            advance();
            if (peek() == '+' || peek() == '-') advance();
            if (std::isdigit(static_cast<unsigned char>(peek()))) {
                is_float = true;
                while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
            } else {
                pos_ = save;  // 'e' belongs to a following identifier, not this number
            }
        }
        if (peek() == 'f' || peek() == 'F' || peek() == 'd' || peek() == 'D') {
            is_float = true;
            advance();
        } else if (peek() == 'l' || peek() == 'L') {
            if (is_float) fail("long suffix on floating literal");
            advance();
        }
        return make(start, TokenKind::Literal, line, col,
                    is_float ? LiteralKind::Float : LiteralKind::Int);
    }

    void lex_escape() {
        advance();  // backslash
        if (pos_ >= src_.size()) fail("unterminated escape");
        advance();  // escaped character; unicode digits are consumed as ordinary chars
    }

    Token lex_string(std::size_t start, std::size_t line, std::size_t col) {
        advance();
        while (true) {
            if (pos_ >= src_.size() || src_[pos_] == '\n')
                throw LexError(line, col, "unterminated string literal");
            if (src_[pos_] == '\\') {
                lex_escape();
            } else if (src_[pos_] == '"') {
                advance();
                break;
            } else {
                advance();
            }
        }
        return make(start, TokenKind::Literal, line, col, LiteralKind::String);
    }

    Token lex_char(std::size_t start, std::size_t line, std::size_t col) {
        advance();
        if (pos_ >= src_.size()) throw LexError(line, col, "unterminated char literal");
        if (src_[pos_] == '\\')
            lex_escape();
        else if (src_[pos_] == '\'')
            throw LexError(line, col, "empty char literal");
        else
            advance();
        if (pos_ >= src_.size() || src_[pos_] != '\'')
            throw LexError(line, col, "unterminated char literal");
        advance();
        return make(start, TokenKind::Literal, line, col, LiteralKind::Char);
    }
};

}  // namespace detail

// Tokenizes source text under the subset grammar. Comments are dropped here;
// annotations survive as '@' + identifier tokens and are removed during
// canonicalization.
inline std::vector<Token> lex(std::string_view source) {
    return detail::Lexer(source).run();
}

}  // namespace neuromut
