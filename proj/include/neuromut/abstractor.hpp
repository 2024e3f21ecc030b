#pragma once

#include <array>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "neuromut/default_idioms.hpp"
#include "neuromut/errors.hpp"
#include "neuromut/extractor.hpp"
#include "neuromut/lexer.hpp"

namespace neuromut {

// Typified-ID categories, in the fixed order used by map files.
enum class Category : int { Var = 0, Type, Method, String, Char, Int, Float };

inline constexpr std::array<const char*, 7> kCategoryNames = {
    "VAR", "TYPE", "METHOD", "STRING", "CHAR", "INT", "FLOAT"};

inline const char* category_name(Category c) { return kCategoryNames[static_cast<int>(c)]; }

inline Category category_of_role(Role r) {
    switch (r) {
        case Role::Var: return Category::Var;
        case Role::Type: return Category::Type;
        case Role::Method: return Category::Method;
    }
    return Category::Var;
}

inline Category category_of_literal(LiteralKind k) {
    switch (k) {
        case LiteralKind::String: return Category::String;
        case LiteralKind::Char: return Category::Char;
        case LiteralKind::Int: return Category::Int;
        case LiteralKind::Float: return Category::Float;
    }
    return Category::Int;
}

inline std::string make_typified_id(Category cat, std::size_t index) {
    return std::string(category_name(cat)) + "_" + std::to_string(index);
}

// Parses "CATEGORY_n" into its parts; returns nullopt for anything else.
inline std::optional<std::pair<Category, std::size_t>> parse_typified_id(std::string_view token) {
    auto us = token.rfind('_');
    if (us == std::string_view::npos || us + 1 >= token.size()) return std::nullopt;
    std::string_view prefix = token.substr(0, us);
    std::string_view digits = token.substr(us + 1);
    for (char c : digits)
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    for (int i = 0; i < 7; ++i) {
        if (prefix == kCategoryNames[i]) {
            std::size_t n = 0;
            for (char c : digits) n = n * 10 + static_cast<std::size_t>(c - '0');
            return std::make_pair(static_cast<Category>(i), n);
        }
    }
    return std::nullopt;
}

// Bidirectional ID <-> original-text mapping. Per category, index n holds the
// original text of CATEGORY_n; IDs are dense and in first-occurrence order.
struct AbstractionMap {
    std::array<std::vector<std::string>, 7> originals;
    std::set<std::string> idiom_set;

    const std::vector<std::string>& category(Category c) const {
        return originals[static_cast<int>(c)];
    }

    std::optional<std::string> original_of(Category c, std::size_t index) const {
        const auto& v = category(c);
        if (index >= v.size()) return std::nullopt;
        return v[index];
    }

    std::optional<std::size_t> index_of(Category c, std::string_view text) const {
        const auto& v = category(c);
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] == text) return i;
        return std::nullopt;
    }

    // Returns the existing index for text or assigns the next one.
    std::size_t intern(Category c, const std::string& text) {
        auto& v = originals[static_cast<int>(c)];
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] == text) return i;
        v.push_back(text);
        return v.size() - 1;
    }

    std::size_t entry_count() const {
        std::size_t n = 0;
        for (const auto& v : originals) n += v.size();
        return n;
    }

    bool operator==(const AbstractionMap& o) const {
        return originals == o.originals && idiom_set == o.idiom_set;
    }
};

struct AbstractedMethod {
    std::vector<std::string> tokens;
    AbstractionMap map;
    MethodRecord origin;
};

// Canonical form: the method's token stream with comments (dropped by the
// lexer) and annotations removed.
inline std::vector<Token> canonicalize(const MethodRecord& m) {
    std::vector<Token> raw = lex(m.body_source);
    std::vector<Token> out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size();) {
        if (raw[i].kind == TokenKind::Separator && raw[i].text == "@") {
            if (i + 1 >= raw.size() || raw[i + 1].kind != TokenKind::Identifier)
                throw LexError(raw[i].line, raw[i].column, "malformed annotation");
            i += 2;
            if (i < raw.size() && raw[i].kind == TokenKind::Separator && raw[i].text == "(") {
                int depth = 0;
                while (i < raw.size()) {
                    if (raw[i].kind == TokenKind::Separator) {
                        if (raw[i].text == "(") ++depth;
                        if (raw[i].text == ")") {
                            --depth;
                            if (depth == 0) {
                                ++i;
                                break;
                            }
                        }
                    }
                    ++i;
                }
            }
            continue;
        }
        out.push_back(raw[i]);
        ++i;
    }
    return out;
}

// Assigns a role to every identifier. Positional heuristics over the
// canonical stream:
//   after `new`                            -> TYPE
//   immediately followed by `(`            -> METHOD
//   immediately followed by an identifier  -> TYPE (declaration type)
//   followed by `[]`                       -> TYPE (array declaration type)
//   Capitalized, before `.name(`           -> TYPE (static-style receiver)
//   otherwise                              -> VAR
inline std::vector<Token> infer_roles(std::vector<Token> toks) {
    auto sep_at = [&](std::size_t i, std::string_view s) {
        return i < toks.size() && toks[i].kind == TokenKind::Separator && toks[i].text == s;
    };
    auto ident_at = [&](std::size_t i) {
        return i < toks.size() && toks[i].kind == TokenKind::Identifier;
    };
    for (std::size_t i = 0; i < toks.size(); ++i) {
        Token& t = toks[i];
        if (t.kind != TokenKind::Identifier) continue;
        bool after_new = i > 0 && toks[i - 1].kind == TokenKind::Keyword && toks[i - 1].text == "new";
        if (after_new) {
            t.role = Role::Type;
        } else if (sep_at(i + 1, "(")) {
            t.role = Role::Method;
        } else if (ident_at(i + 1)) {
            t.role = Role::Type;
        } else if (sep_at(i + 1, "[") && sep_at(i + 2, "]")) {
            t.role = Role::Type;
        } else if (!t.text.empty() && std::isupper(static_cast<unsigned char>(t.text[0])) &&
                   sep_at(i + 1, ".") && ident_at(i + 2) && sep_at(i + 3, "(")) {
            t.role = Role::Type;
        } else {
            t.role = Role::Var;
        }
    }
    return toks;
}

// Replaces every non-idiom identifier/literal with its typified ID, assigning
// per-category indices 0,1,... in first-occurrence order. Repeated text within
// a category always reuses its ID.
inline AbstractedMethod abstract_method(const MethodRecord& m, const std::set<std::string>& idioms) {
    AbstractedMethod out;
    out.origin = m;
    out.map.idiom_set = idioms;
    std::vector<Token> toks = infer_roles(canonicalize(m));
    out.tokens.reserve(toks.size());
    for (const Token& t : toks) {
        if (t.kind == TokenKind::Keyword || t.kind == TokenKind::Separator ||
            t.kind == TokenKind::Operator) {
            out.tokens.push_back(t.text);
            continue;
        }
        if (idioms.count(t.text)) {
            out.tokens.push_back(t.text);
            continue;
        }
        Category cat = t.kind == TokenKind::Identifier ? category_of_role(*t.role)
                                                       : category_of_literal(*t.literal_kind);
        std::size_t idx = out.map.intern(cat, t.text);
        out.tokens.push_back(make_typified_id(cat, idx));
    }
    return out;
}

// Idiom file: one token per line. Without a path, the bundled default list.
inline std::set<std::string> load_idioms(const std::optional<std::filesystem::path>& path) {
    std::set<std::string> out;
    if (!path) {
        for (const char* idiom : kDefaultIdioms) out.insert(idiom);
        return out;
    }
    std::ifstream in(*path);
    if (!in) throw IoError("cannot open idiom file: " + path->string());
    std::string line;
    while (std::getline(in, line)) {
        line = detail::trim(line);
        if (!line.empty()) out.insert(line);
    }
    return out;
}

// --- Map file format: "ID<TAB>original" lines, categories in fixed order ---

inline std::string write_map_text(const AbstractionMap& map) {
    std::ostringstream out;
    for (int c = 0; c < 7; ++c) {
        const auto& v = map.originals[c];
        for (std::size_t i = 0; i < v.size(); ++i)
            out << make_typified_id(static_cast<Category>(c), i) << '\t' << v[i] << '\n';
    }
    return out.str();
}

inline AbstractionMap parse_map_text(const std::string& text) {
    AbstractionMap map;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw FormatError("map line " + std::to_string(lineno) + ": missing tab");
        auto id = parse_typified_id(line.substr(0, tab));
        if (!id) throw FormatError("map line " + std::to_string(lineno) + ": bad ID");
        auto& v = map.originals[static_cast<int>(id->first)];
        if (id->second != v.size())
            throw FormatError("map line " + std::to_string(lineno) + ": IDs out of order");
        v.push_back(line.substr(tab + 1));
    }
    return map;
}

// Abstract stream file: all tokens on one line, single spaces between.
inline std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

inline std::vector<std::string> split_tokens(std::string_view line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        std::size_t b = i;
        while (i < line.size() && line[i] != ' ') ++i;
        if (i > b) out.emplace_back(line.substr(b, i - b));
    }
    return out;
}

}  // namespace neuromut
