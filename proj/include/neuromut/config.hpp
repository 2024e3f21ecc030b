#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "neuromut/errors.hpp"

namespace neuromut {

// All settings that drive the pipeline. Loaded once, immutable afterwards,
// safe to share across worker threads.
struct PipelineConfig {
    std::filesystem::path project_root;
    std::filesystem::path output_dir;
    int beam_width_k = 1;
    int max_method_tokens = 50;
    bool discard_accessors = true;
    std::optional<std::filesystem::path> method_allowlist_path;
    std::optional<std::filesystem::path> idioms_path;
    std::string compile_command;
    std::string test_command;
    int worker_count = 1;
    std::filesystem::path model_path;
    int max_decode_length = 100;
    int command_timeout_seconds = 300;
};

namespace detail {

inline int parse_positive_int(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(value, &used);
    } catch (const std::exception&) {
        throw ConfigError(ConfigError::Kind::InvalidValue, key + ": not an integer: " + value);
    }
    if (used != value.size())
        throw ConfigError(ConfigError::Kind::InvalidValue, key + ": not an integer: " + value);
    if (v < 1)
        throw ConfigError(ConfigError::Kind::InvalidValue, key + " must be >= 1, got " + value);
    return v;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ConfigError(ConfigError::Kind::InvalidValue, key + ": expected true/false, got " + value);
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

// Re-checks every invariant on a config, independent of how it was built.
inline void validate_config(const PipelineConfig& c) {
    using K = ConfigError::Kind;
    if (c.beam_width_k < 1) throw ConfigError(K::InvalidValue, "beam_width_k must be >= 1");
    if (c.max_method_tokens < 1) throw ConfigError(K::InvalidValue, "max_method_tokens must be >= 1");
    if (c.worker_count < 1) throw ConfigError(K::InvalidValue, "worker_count must be >= 1");
    if (c.max_decode_length < 1) throw ConfigError(K::InvalidValue, "max_decode_length must be >= 1");
    if (c.command_timeout_seconds < 1)
        throw ConfigError(K::InvalidValue, "command_timeout_seconds must be >= 1");
    std::error_code ec;
    if (!std::filesystem::is_directory(c.project_root, ec))
        throw ConfigError(K::InvalidValue,
                          "project_root is not a directory: " + c.project_root.string());
}

// Parses the flat key=value config format. '#' starts a comment, blank lines
// are ignored, unknown and duplicate keys are rejected.
inline PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path.string());

    static const std::set<std::string> known = {
        "project_root",   "output_dir",        "beam_width_k",
        "max_method_tokens", "discard_accessors", "method_allowlist_path",
        "idioms_path",    "compile_command",   "test_command",
        "worker_count",   "model_path",        "max_decode_length",
        "command_timeout_seconds",
    };

    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(ConfigError::Kind::ParseError,
                              "line " + std::to_string(lineno) + ": expected key=value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(ConfigError::Kind::ParseError,
                              "line " + std::to_string(lineno) + ": empty key");
        if (!known.count(key))
            throw ConfigError(ConfigError::Kind::ParseError,
                              "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (kv.count(key))
            throw ConfigError(ConfigError::Kind::ParseError,
                              "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv[key] = value;
    }

    auto require = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end())
            throw ConfigError(ConfigError::Kind::MissingKey, std::string("missing key: ") + key);
        return it->second;
    };

    PipelineConfig c;
    c.project_root = require("project_root");
    c.output_dir = require("output_dir");
    c.compile_command = require("compile_command");
    c.test_command = require("test_command");
    c.model_path = require("model_path");

    if (kv.count("beam_width_k"))
        c.beam_width_k = detail::parse_positive_int("beam_width_k", kv["beam_width_k"]);
    if (kv.count("max_method_tokens"))
        c.max_method_tokens = detail::parse_positive_int("max_method_tokens", kv["max_method_tokens"]);
    if (kv.count("discard_accessors"))
        c.discard_accessors = detail::parse_bool("discard_accessors", kv["discard_accessors"]);
    if (kv.count("worker_count"))
        c.worker_count = detail::parse_positive_int("worker_count", kv["worker_count"]);
    if (kv.count("max_decode_length"))
        c.max_decode_length = detail::parse_positive_int("max_decode_length", kv["max_decode_length"]);
    if (kv.count("command_timeout_seconds"))
        c.command_timeout_seconds =
            detail::parse_positive_int("command_timeout_seconds", kv["command_timeout_seconds"]);
    if (kv.count("method_allowlist_path")) c.method_allowlist_path = kv["method_allowlist_path"];
    if (kv.count("idioms_path")) c.idioms_path = kv["idioms_path"];

    validate_config(c);
    return c;
}

}  // namespace neuromut
