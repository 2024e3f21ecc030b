#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "neuromut/abstractor.hpp"
#include "neuromut/errors.hpp"
#include "neuromut/extractor.hpp"
#include "neuromut/fsutil.hpp"
#include "neuromut/lexer.hpp"
#include "neuromut/mutant.hpp"

namespace neuromut {

struct ConcreteMutant {
    std::string source_text;
    MethodRecord origin;
    MutantCandidate candidate;
    std::vector<std::pair<std::string, std::string>> synthesized_literals;  // (ID, text)
};

enum class TranslationStatus { Translated, DiscardedMissingIdentifier };

struct TranslationOutcome {
    TranslationStatus status = TranslationStatus::Translated;
    std::optional<ConcreteMutant> mutant;
    std::vector<std::string> missing_ids;
};

namespace detail {

inline bool is_literal_category(Category c) {
    return c == Category::String || c == Category::Char || c == Category::Int ||
           c == Category::Float;
}

// Literal texts of one category appearing in the origin method.
inline std::set<std::string> origin_literals(Category cat, const MethodRecord& origin) {
    std::set<std::string> out;
    for (const Token& t : canonicalize(origin)) {
        if (t.kind == TokenKind::Literal && category_of_literal(*t.literal_kind) == cat)
            out.insert(t.text);
    }
    return out;
}

// Token-stream renderer: one statement per line, 4-space indent per brace
// depth, single spaces except none before `; , ) .` and none after `( .`.
// Tolerates unbalanced streams by clamping the depth; output always re-lexes
// to the input tokens.
inline std::string render_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    std::string cur;
    int depth = 0;
    int paren = 0;

    auto indent = [](int d) { return std::string(static_cast<std::size_t>(d) * 4, ' '); };
    auto flush = [&]() {
        out += cur;
        out += '\n';
        cur.clear();
    };
    auto no_space_before = [](const std::string& t) {
        return t == ";" || t == "," || t == ")" || t == ".";
    };
    std::string prev;
    auto append = [&](const std::string& t) {
        if (cur.empty())
            cur = indent(depth) + t;
        else if (no_space_before(t) || prev == "(" || prev == ".")
            cur += t;
        else
            cur += ' ' + t;
        prev = t;
    };

    for (const std::string& t : tokens) {
        if (t == "{") {
            append(t);
            flush();
            prev.clear();
            ++depth;
        } else if (t == "}") {
            if (!cur.empty()) flush();
            if (depth > 0) --depth;
            cur = indent(depth) + "}";
            flush();
            prev.clear();
        } else if (t == ";") {
            append(t);
            if (paren == 0) {
                flush();
                prev.clear();
            }
        } else {
            if (t == "(") ++paren;
            if (t == ")" && paren > 0) --paren;
            append(t);
        }
    }
    if (!cur.empty()) flush();
    return out;
}

inline bool braces_balanced(const std::vector<std::string>& tokens) {
    int depth = 0;
    for (const std::string& t : tokens) {
        if (t == "{") ++depth;
        if (t == "}") {
            if (depth == 0) return false;
            --depth;
        }
    }
    return depth == 0;
}

}  // namespace detail

// Deterministic generation of a fresh literal of the given category: the
// first element of the category's generator sequence that collides neither
// with the origin method's literals, the mapped literals, nor extra_taken.
inline std::string synthesize_literal(Category category, const AbstractionMap& map,
                                      const MethodRecord& origin,
                                      const std::set<std::string>& extra_taken = {}) {
    std::set<std::string> taken = detail::origin_literals(category, origin);
    for (const std::string& s : map.category(category)) taken.insert(s);
    for (const std::string& s : extra_taken) taken.insert(s);

    auto candidate = [&](std::size_t i) -> std::string {
        switch (category) {
            case Category::Int: return std::to_string(i);
            case Category::Float: return std::to_string(i) + ".0";
            case Category::String: return "\"s" + std::to_string(i) + "\"";
            case Category::Char: {
                static const std::string alphabet =
                    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
                if (i < alphabet.size()) return std::string("'") + alphabet[i] + "'";
                // past the single-character alphabet: unicode escapes
                char buf[8];
                std::snprintf(buf, sizeof buf, "%04zx", i - alphabet.size() + 0x100);
                return std::string("'\\u") + buf + "'";
            }
            default: return std::to_string(i);
        }
    };
    for (std::size_t i = 0;; ++i) {
        std::string c = candidate(i);
        if (!taken.count(c)) return c;
    }
}

// Public formatter: rejects unbalanced brace streams, otherwise renders.
inline std::string format_method(const std::vector<std::string>& tokens) {
    if (!detail::braces_balanced(tokens)) throw UnbalancedBraces("unbalanced braces in stream");
    return detail::render_tokens(tokens);
}

// Maps abstract tokens back to concrete source. Missing literal IDs are
// replaced by synthesized literals; missing identifier IDs discard the
// mutant. Total: never throws on vocabulary-alphabet streams.
inline TranslationOutcome concretize(const std::vector<std::string>& tokens,
                                     const AbstractionMap& map, const MethodRecord& origin,
                                     MutantCandidate candidate = {}) {
    TranslationOutcome out;
    std::vector<std::string> concrete;
    concrete.reserve(tokens.size());
    std::map<std::string, std::string> synthesized;  // ID -> generated text
    std::set<std::string> synthesized_texts;

    for (const std::string& tok : tokens) {
        auto id = parse_typified_id(tok);
        if (!id) {
            concrete.push_back(tok);  // keyword, separator/operator, or idiom
            continue;
        }
        auto [cat, index] = *id;
        if (auto original = map.original_of(cat, index)) {
            concrete.push_back(*original);
            continue;
        }
        if (!detail::is_literal_category(cat)) {
            out.missing_ids.push_back(tok);
            continue;
        }
        auto it = synthesized.find(tok);
        if (it == synthesized.end()) {
            std::string text = synthesize_literal(cat, map, origin, synthesized_texts);
            it = synthesized.emplace(tok, text).first;
            synthesized_texts.insert(text);
        }
        concrete.push_back(it->second);
    }

    if (!out.missing_ids.empty()) {
        out.status = TranslationStatus::DiscardedMissingIdentifier;
        return out;
    }

    ConcreteMutant m;
    m.origin = origin;
    m.candidate = std::move(candidate);
    m.synthesized_literals.assign(synthesized.begin(), synthesized.end());
    m.source_text = detail::render_tokens(concrete);
    out.status = TranslationStatus::Translated;
    out.mutant = std::move(m);
    return out;
}

// Creates a full copy of the project under dest_dir with the method's byte
// range replaced by the mutant text. The origin file must be unchanged since
// extraction. Returns dest_dir.
inline std::filesystem::path inject_mutant(
    const std::filesystem::path& project_root, const MethodRecord& m, const ConcreteMutant& mutant,
    const std::filesystem::path& dest_dir,
    const std::optional<std::filesystem::path>& exclude_dir = std::nullopt) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (fs::exists(dest_dir) && !fs::is_empty(dest_dir, ec))
        throw IoError("destination directory not empty: " + dest_dir.string());

    std::string original = read_file(m.file_path);
    if (fnv1a64(original) != m.source_file_hash)
        throw StaleSource("file changed since extraction: " + m.file_path.string());
    if (m.end_offset > original.size() || m.start_offset > m.end_offset)
        throw StaleSource("method byte range out of bounds: " + m.file_path.string());

    fs::path exclude_abs;
    if (exclude_dir) exclude_abs = fs::weakly_canonical(*exclude_dir, ec);

    fs::create_directories(dest_dir);
    fs::path root_abs = fs::weakly_canonical(project_root, ec);
    fs::path dest_abs = fs::weakly_canonical(dest_dir, ec);
    for (auto it = fs::recursive_directory_iterator(project_root,
                                                    fs::directory_options::skip_permission_denied);
         it != fs::recursive_directory_iterator(); ++it) {
        fs::path cur_abs = fs::weakly_canonical(it->path(), ec);
        if (it->is_directory()) {
            if (cur_abs == dest_abs || (!exclude_abs.empty() && cur_abs == exclude_abs)) {
                it.disable_recursion_pending();
                continue;
            }
            fs::create_directories(dest_dir / fs::relative(it->path(), project_root));
        } else if (it->is_regular_file()) {
            fs::path rel = fs::relative(it->path(), project_root);
            fs::create_directories((dest_dir / rel).parent_path());
            fs::copy_file(it->path(), dest_dir / rel, fs::copy_options::overwrite_existing);
        }
    }

    fs::path rel = fs::relative(m.file_path, project_root);
    std::string mutated = original.substr(0, m.start_offset) + mutant.source_text +
                          original.substr(m.end_offset);
    write_file(dest_dir / rel, mutated);
    return dest_dir;
}

}  // namespace neuromut
