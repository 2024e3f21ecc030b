#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "neuromut/errors.hpp"
#include "neuromut/model.hpp"

namespace neuromut {

inline constexpr char kModelMagic[4] = {'N', 'M', 'U', 'T'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 4);
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 8);
}

inline void put_f64(std::ostream& out, double d) {
    put_u64(out, std::bit_cast<std::uint64_t>(d));
}

inline std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw FormatError("truncated model file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

inline std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw FormatError("truncated model file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

inline double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace detail

// Binary model format: magic, version, hyperparameters, vocabulary
// (length-prefixed UTF-8 tokens in index order), then every tensor in
// canonical order as (rows, cols, column-major little-endian f64 data).
inline void save_model(const ModelParams& p, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file: " + path.string());
    out.write(kModelMagic, 4);
    detail::put_u32(out, kModelFormatVersion);
    detail::put_u32(out, static_cast<std::uint32_t>(p.hp.embed_dim));
    detail::put_u32(out, static_cast<std::uint32_t>(p.hp.hidden_dim));
    detail::put_f64(out, p.hp.learning_rate);
    detail::put_u32(out, static_cast<std::uint32_t>(p.hp.epochs));
    detail::put_u64(out, p.hp.seed);
    detail::put_u32(out, static_cast<std::uint32_t>(p.vocab.size()));
    for (const std::string& t : p.vocab.token_of) {
        detail::put_u32(out, static_cast<std::uint32_t>(t.size()));
        out.write(t.data(), static_cast<std::streamsize>(t.size()));
    }
    for_each_tensor(const_cast<ModelParams&>(p), [&](const char*, auto& t) {
        detail::put_u32(out, static_cast<std::uint32_t>(t.rows()));
        detail::put_u32(out, static_cast<std::uint32_t>(t.cols()));
        const double* d = t.data();
        for (Eigen::Index i = 0; i < t.size(); ++i) detail::put_f64(out, d[i]);
    });
    if (!out) throw IoError("write failed: " + path.string());
}

inline ModelParams load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path.string());
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kModelMagic, 4) != 0)
        throw FormatError("not a model file (bad magic): " + path.string());
    std::uint32_t version = detail::get_u32(in);
    if (version != kModelFormatVersion)
        throw FormatError("unsupported model format version: expected " +
                          std::to_string(kModelFormatVersion) + ", found " +
                          std::to_string(version));
    ModelParams p;
    p.hp.embed_dim = static_cast<int>(detail::get_u32(in));
    p.hp.hidden_dim = static_cast<int>(detail::get_u32(in));
    p.hp.learning_rate = detail::get_f64(in);
    p.hp.epochs = static_cast<int>(detail::get_u32(in));
    p.hp.seed = detail::get_u64(in);
    std::uint32_t vocab_size = detail::get_u32(in);
    for (std::uint32_t i = 0; i < vocab_size; ++i) {
        std::uint32_t len = detail::get_u32(in);
        std::string t(len, '\0');
        if (len && !in.read(t.data(), len)) throw FormatError("truncated model file");
        p.vocab.add(t);
    }
    if (p.vocab.size() != static_cast<int>(vocab_size))
        throw FormatError("duplicate vocabulary tokens in model file");
    resize_params(p);
    for_each_tensor(p, [&](const char* name, auto& t) {
        auto rows = static_cast<Eigen::Index>(detail::get_u32(in));
        auto cols = static_cast<Eigen::Index>(detail::get_u32(in));
        if (rows != t.rows() || cols != t.cols())
            throw FormatError(std::string("tensor shape mismatch for ") + name);
        double* d = t.data();
        for (Eigen::Index i = 0; i < t.size(); ++i) d[i] = detail::get_f64(in);
    });
    char extra;
    if (in.read(&extra, 1)) throw FormatError("trailing bytes in model file");
    validate_params(p);
    return p;
}

}  // namespace neuromut
