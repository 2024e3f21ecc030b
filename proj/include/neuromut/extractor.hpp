#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "neuromut/config.hpp"
#include "neuromut/errors.hpp"
#include "neuromut/fsutil.hpp"
#include "neuromut/lexer.hpp"

namespace neuromut {

// One concrete method found in the subject project. body_source is the
// verbatim text from the first declaration token through the matching
// closing brace; the byte range locates it for later injection.
struct MethodRecord {
    std::filesystem::path file_path;
    std::string signature;  // name(ParamType,ParamType)
    std::string body_source;
    std::size_t start_line = 0;
    std::size_t end_line = 0;
    std::string enclosing_type_name;
    std::size_t start_offset = 0;
    std::size_t end_offset = 0;  // one past the closing brace
    std::uint64_t source_file_hash = 0;
};

struct ExtractionReport {
    std::size_t total_found = 0;
    std::size_t discarded_abstract_or_interface = 0;
    std::size_t discarded_accessors = 0;
    std::size_t discarded_not_in_allowlist = 0;
    std::size_t discarded_oversize = 0;
    std::vector<MethodRecord> retained;
    std::vector<std::string> diagnostics;  // "SKIP <path> <reason>" lines
};

namespace detail {

// Field access chain: identifier ('.' identifier)*, e.g. x, this.x, a.b.c.
inline bool is_field_access_chain(const std::vector<Token>& toks, std::size_t begin,
                                  std::size_t end) {
    if (begin >= end) return false;
    bool expect_name = true;
    for (std::size_t i = begin; i < end; ++i) {
        const Token& t = toks[i];
        if (expect_name) {
            if (t.kind != TokenKind::Identifier && !(t.kind == TokenKind::Keyword && t.text == "this"))
                return false;
        } else {
            if (!(t.kind == TokenKind::Separator && t.text == ".")) return false;
        }
        expect_name = !expect_name;
    }
    return !expect_name;  // must end on a name
}

struct MethodScan {
    MethodRecord record;
    bool has_body = false;
    bool in_interface = false;
    std::size_t param_count = 0;
    std::vector<Token> body_tokens;  // tokens of the whole declaration, incl. braces
};

// Token-stream scanner for the subset grammar. Finds type declarations and
// their directly contained methods; nested types are skipped wholesale.
class FileScanner {
public:
    FileScanner(const std::filesystem::path& path, const std::string& source)
        : path_(path), source_(source), tokens_(lex(source)) {}

    std::vector<MethodScan> scan() {
        std::vector<MethodScan> methods;
        while (pos_ < tokens_.size()) {
            skip_annotations();
            std::size_t mods_begin = pos_;
            skip_modifiers();
            if (at_keyword("class") || at_keyword("interface")) {
                bool is_interface = tokens_[pos_].text == "interface";
                ++pos_;
                std::string type_name = at_kind(TokenKind::Identifier) ? tokens_[pos_].text : "";
                if (!type_name.empty()) ++pos_;
                while (pos_ < tokens_.size() && !at_sep("{")) ++pos_;  // extends/implements
                if (pos_ >= tokens_.size()) break;
                ++pos_;  // '{'
                scan_type_body(type_name, is_interface, methods);
            } else if (at_keyword("package") || at_keyword("import")) {
                while (pos_ < tokens_.size() && !at_sep(";")) ++pos_;
                if (pos_ < tokens_.size()) ++pos_;
            } else {
                pos_ = std::max(pos_, mods_begin) + 1;
            }
        }
        return methods;
    }

private:
    const std::filesystem::path& path_;
    const std::string& source_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;

    bool at_kind(TokenKind k) const { return pos_ < tokens_.size() && tokens_[pos_].kind == k; }
    bool at_sep(std::string_view s) const {
        return pos_ < tokens_.size() && tokens_[pos_].kind == TokenKind::Separator &&
               tokens_[pos_].text == s;
    }
    bool at_keyword(std::string_view s) const {
        return pos_ < tokens_.size() && tokens_[pos_].kind == TokenKind::Keyword &&
               tokens_[pos_].text == s;
    }

    void skip_annotations() {
        while (at_sep("@")) {
            ++pos_;
            if (at_kind(TokenKind::Identifier)) ++pos_;
            if (at_sep("(")) skip_balanced("(", ")");
        }
    }

    void skip_modifiers() {
        static const std::set<std::string> mods = {"public",   "private", "protected",
                                                   "static",   "final",   "abstract",
                                                   "synchronized"};
        while (at_kind(TokenKind::Keyword) && mods.count(tokens_[pos_].text)) ++pos_;
    }

    void skip_balanced(std::string_view open, std::string_view close) {
        // pos_ is at the opening token
        int depth = 0;
        while (pos_ < tokens_.size()) {
            if (tokens_[pos_].kind == TokenKind::Separator) {
                if (tokens_[pos_].text == open) ++depth;
                if (tokens_[pos_].text == close) {
                    --depth;
                    if (depth == 0) {
                        ++pos_;
                        return;
                    }
                }
            }
            ++pos_;
        }
    }

    void skip_to_semicolon() {
        while (pos_ < tokens_.size()) {
            if (at_sep(";")) {
                ++pos_;
                return;
            }
            if (at_sep("(")) {
                skip_balanced("(", ")");
                continue;
            }
            if (at_sep("{")) {
                skip_balanced("{", "}");
                continue;
            }
            ++pos_;
        }
    }

    // Parses a type reference: primitive keyword or identifier, optional [].
    // Returns the normalized type text or nullopt.
    std::optional<std::string> parse_type() {
        static const std::set<std::string> prim = {"void",  "int",  "long",   "short", "byte",
                                                   "float", "double", "boolean", "char"};
        std::string text;
        if (at_kind(TokenKind::Identifier)) {
            text = tokens_[pos_].text;
            ++pos_;
        } else if (at_kind(TokenKind::Keyword) && prim.count(tokens_[pos_].text)) {
            text = tokens_[pos_].text;
            ++pos_;
        } else {
            return std::nullopt;
        }
        while (at_sep("[")) {
            if (pos_ + 1 < tokens_.size() && tokens_[pos_ + 1].kind == TokenKind::Separator &&
                tokens_[pos_ + 1].text == "]") {
                text += "[]";
                pos_ += 2;
            } else {
                break;
            }
        }
        return text;
    }

    void scan_type_body(const std::string& type_name, bool is_interface,
                        std::vector<MethodScan>& out) {
        while (pos_ < tokens_.size()) {
            if (at_sep("}")) {
                ++pos_;
                return;
            }
            skip_annotations();
            if (at_sep("}")) {
                ++pos_;
                return;
            }
            if (at_sep(";")) {
                ++pos_;
                continue;
            }
            std::size_t decl_begin = pos_;
            skip_modifiers();
            if (at_keyword("class") || at_keyword("interface")) {
                // nested type: out of scope, skip its whole body
                while (pos_ < tokens_.size() && !at_sep("{")) ++pos_;
                if (at_sep("{")) skip_balanced("{", "}");
                continue;
            }
            if (at_sep("{")) {  // static/instance initializer block
                skip_balanced("{", "}");
                continue;
            }
            auto ret_type = parse_type();
            if (!ret_type) {
                skip_to_semicolon();
                continue;
            }
            if (at_sep("(")) {
                // constructor (no return type); not a method, skip it
                skip_balanced("(", ")");
                while (pos_ < tokens_.size() && !at_sep("{") && !at_sep(";")) ++pos_;
                if (at_sep("{"))
                    skip_balanced("{", "}");
                else if (at_sep(";"))
                    ++pos_;
                continue;
            }
            if (!at_kind(TokenKind::Identifier)) {
                skip_to_semicolon();
                continue;
            }
            std::string name = tokens_[pos_].text;
            ++pos_;
            if (!at_sep("(")) {
                // field declaration
                pos_ = decl_begin;
                skip_modifiers();
                skip_to_semicolon();
                continue;
            }
            parse_method(decl_begin, type_name, is_interface, name, out);
        }
    }

    void parse_method(std::size_t decl_begin, const std::string& type_name, bool is_interface,
                      const std::string& name, std::vector<MethodScan>& out) {
        // pos_ at '('
        ++pos_;
        std::vector<std::string> param_types;
        if (!at_sep(")")) {
            while (pos_ < tokens_.size()) {
                auto pt = parse_type();
                if (!pt) {
                    skip_to_semicolon();
                    return;
                }
                if (at_kind(TokenKind::Identifier)) ++pos_;  // parameter name
                while (at_sep("[")) {  // trailing array brackets on the name
                    if (pos_ + 1 < tokens_.size() && tokens_[pos_ + 1].text == "]") {
                        *pt += "[]";
                        pos_ += 2;
                    } else
                        break;
                }
                param_types.push_back(*pt);
                if (at_sep(",")) {
                    ++pos_;
                    continue;
                }
                break;
            }
        }
        if (!at_sep(")")) {
            skip_to_semicolon();
            return;
        }
        ++pos_;
        if (at_keyword("throws")) {
            ++pos_;
            while (at_kind(TokenKind::Identifier)) {
                ++pos_;
                if (at_sep(","))
                    ++pos_;
                else
                    break;
            }
        }

        MethodScan m;
        m.in_interface = is_interface;
        m.param_count = param_types.size();
        std::string sig = name + "(";
        for (std::size_t i = 0; i < param_types.size(); ++i) {
            if (i) sig += ",";
            sig += param_types[i];
        }
        sig += ")";
        m.record.signature = sig;
        m.record.enclosing_type_name = type_name;
        m.record.file_path = path_;

        if (at_sep(";")) {
            m.has_body = false;
            ++pos_;
            out.push_back(std::move(m));
            return;
        }
        if (!at_sep("{")) {
            skip_to_semicolon();
            return;
        }
        std::size_t body_open = pos_;
        skip_balanced("{", "}");
        std::size_t body_close = pos_ - 1;  // index of '}'

        m.has_body = true;
        const Token& first = tokens_[decl_begin];
        const Token& last = tokens_[body_close];
        m.record.start_offset = first.offset;
        m.record.end_offset = last.offset + last.text.size();
        m.record.start_line = first.line;
        m.record.end_line = last.line;
        m.record.body_source =
            source_.substr(m.record.start_offset, m.record.end_offset - m.record.start_offset);
        m.body_tokens.assign(tokens_.begin() + static_cast<std::ptrdiff_t>(decl_begin),
                             tokens_.begin() + static_cast<std::ptrdiff_t>(body_close) + 1);
        (void)body_open;
        out.push_back(std::move(m));
    }
};

}  // namespace detail

// Trivial getter/setter detection on the token stream: get/is prefix with a
// body that is exactly `return <field-access>;`, or set prefix with one
// parameter and a body that is exactly `<field-access> = <identifier>;`.
inline bool is_accessor(const MethodRecord& m) {
    std::vector<Token> toks = lex(m.body_source);
    // locate the method name: the identifier right before the first '('
    std::size_t open = 0;
    while (open < toks.size() && !(toks[open].kind == TokenKind::Separator && toks[open].text == "("))
        ++open;
    if (open == 0 || open >= toks.size()) return false;
    const std::string& name = toks[open - 1].text;

    std::size_t body_begin = open;
    while (body_begin < toks.size() &&
           !(toks[body_begin].kind == TokenKind::Separator && toks[body_begin].text == "{"))
        ++body_begin;
    if (body_begin >= toks.size()) return false;
    ++body_begin;
    if (toks.empty() || toks.back().text != "}") return false;
    std::size_t body_end = toks.size() - 1;  // exclusive of closing '}'

    auto starts_with = [&](const char* prefix) { return name.rfind(prefix, 0) == 0; };

    if (starts_with("get") || starts_with("is")) {
        // return <field-access-or-identifier> ;
        if (body_end - body_begin < 3) return false;
        if (!(toks[body_begin].kind == TokenKind::Keyword && toks[body_begin].text == "return"))
            return false;
        if (!(toks[body_end - 1].kind == TokenKind::Separator && toks[body_end - 1].text == ";"))
            return false;
        return detail::is_field_access_chain(toks, body_begin + 1, body_end - 1);
    }
    if (starts_with("set")) {
        // count parameters between the name's '(' and its ')'
        std::size_t close = open;
        int depth = 0;
        std::size_t params = 0;
        bool any = false;
        for (std::size_t i = open; i < body_begin; ++i) {
            if (toks[i].text == "(" && toks[i].kind == TokenKind::Separator) ++depth;
            else if (toks[i].text == ")" && toks[i].kind == TokenKind::Separator) {
                --depth;
                if (depth == 0) {
                    close = i;
                    break;
                }
            } else if (depth == 1) {
                any = true;
                if (toks[i].text == "," ) ++params;
            }
        }
        if (any) ++params;
        (void)close;
        if (params != 1) return false;
        // <field-access-or-identifier> = <identifier> ;
        if (body_end < body_begin + 4) return false;
        if (!(toks[body_end - 1].kind == TokenKind::Separator && toks[body_end - 1].text == ";"))
            return false;
        if (!(toks[body_end - 2].kind == TokenKind::Identifier)) return false;
        if (!(toks[body_end - 3].kind == TokenKind::Operator && toks[body_end - 3].text == "="))
            return false;
        return detail::is_field_access_chain(toks, body_begin, body_end - 3);
    }
    return false;
}

// Allowlist file: one normalized signature per line, '#' comments.
inline std::set<std::string> load_allowlist(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open allowlist: " + path.string());
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (!line.empty()) out.insert(line);
    }
    return out;
}

// Walks the project tree, extracts every concrete method, and applies the
// configured filters. Files that fail to lex are skipped with a diagnostic,
// never fatally.
inline ExtractionReport extract_methods(const std::filesystem::path& project_root,
                                        const PipelineConfig& config) {
    std::error_code ec;
    if (!std::filesystem::is_directory(project_root, ec))
        throw IoError("project root is not a directory: " + project_root.string());

    std::optional<std::set<std::string>> allowlist;
    if (config.method_allowlist_path) allowlist = load_allowlist(*config.method_allowlist_path);

    std::vector<std::filesystem::path> files;
    auto out_abs = std::filesystem::weakly_canonical(config.output_dir, ec);
    for (auto it = std::filesystem::recursive_directory_iterator(
             project_root, std::filesystem::directory_options::skip_permission_denied);
         it != std::filesystem::recursive_directory_iterator(); ++it) {
        if (it->is_directory()) {
            auto name = it->path().filename().string();
            bool under_output =
                !ec && !out_abs.empty() &&
                std::filesystem::weakly_canonical(it->path(), ec) == out_abs;
            if ((!name.empty() && name[0] == '.') || under_output) it.disable_recursion_pending();
            continue;
        }
        if (it->path().extension() == ".java") files.push_back(it->path());
    }
    std::sort(files.begin(), files.end());

    ExtractionReport report;
    for (const auto& file : files) {
        std::string source;
        try {
            source = read_file(file);
        } catch (const IoError&) {
            report.diagnostics.push_back("SKIP " + file.string() + " unreadable");
            continue;
        }
        std::vector<detail::MethodScan> scans;
        try {
            detail::FileScanner scanner(file, source);
            scans = scanner.scan();
        } catch (const LexError& e) {
            report.diagnostics.push_back("SKIP " + file.string() + " lex-error: " + e.what());
            continue;
        }
        std::uint64_t hash = fnv1a64(source);
        for (auto& scan : scans) {
            ++report.total_found;
            if (!scan.has_body || scan.in_interface) {
                ++report.discarded_abstract_or_interface;
                continue;
            }
            scan.record.source_file_hash = hash;
            if (config.discard_accessors && is_accessor(scan.record)) {
                ++report.discarded_accessors;
                continue;
            }
            if (allowlist && !allowlist->count(scan.record.signature)) {
                ++report.discarded_not_in_allowlist;
                continue;
            }
            if (scan.body_tokens.size() > static_cast<std::size_t>(config.max_method_tokens)) {
                ++report.discarded_oversize;
                continue;
            }
            report.retained.push_back(std::move(scan.record));
        }
    }
    std::sort(report.retained.begin(), report.retained.end(),
              [](const MethodRecord& a, const MethodRecord& b) {
                  if (a.file_path != b.file_path) return a.file_path < b.file_path;
                  return a.start_line < b.start_line;
              });
    return report;
}

}  // namespace neuromut
