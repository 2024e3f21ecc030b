#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace neuromut {

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Configuration file problems, split by what went wrong so callers can
// report precisely.
struct ConfigError : std::runtime_error {
    enum class Kind { MissingKey, InvalidValue, ParseError };
    Kind kind;
    ConfigError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

struct LexError : std::runtime_error {
    std::size_t line;
    std::size_t column;
    LexError(std::size_t ln, std::size_t col, const std::string& msg)
        : std::runtime_error(msg + " at " + std::to_string(ln) + ":" + std::to_string(col)),
          line(ln),
          column(col) {}
};

struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonFiniteLoss : std::runtime_error {
    explicit NonFiniteLoss(const std::string& msg) : std::runtime_error(msg) {}
};

struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CorpusMismatch : std::runtime_error {
    explicit CorpusMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnbalancedBraces : std::runtime_error {
    explicit UnbalancedBraces(const std::string& msg) : std::runtime_error(msg) {}
};

struct StaleSource : std::runtime_error {
    explicit StaleSource(const std::string& msg) : std::runtime_error(msg) {}
};

struct SpawnError : std::runtime_error {
    explicit SpawnError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace neuromut
