#pragma once

#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "neuromut/abstractor.hpp"
#include "neuromut/errors.hpp"
#include "neuromut/lexer.hpp"

namespace neuromut {

// Token <-> index bijection with the four specials pinned at 0..3.
struct Vocabulary {
    static constexpr int kPad = 0;
    static constexpr int kSos = 1;
    static constexpr int kEos = 2;
    static constexpr int kUnk = 3;

    std::vector<std::string> token_of;
    std::unordered_map<std::string, int> id_map;

    int size() const { return static_cast<int>(token_of.size()); }

    bool contains(std::string_view t) const { return id_map.count(std::string(t)) != 0; }

    int id_or_unk(std::string_view t) const {
        auto it = id_map.find(std::string(t));
        return it == id_map.end() ? kUnk : it->second;
    }

    const std::string& token(int id) const { return token_of[static_cast<std::size_t>(id)]; }

    void add(const std::string& t) {
        if (id_map.count(t)) return;
        id_map.emplace(t, size());
        token_of.push_back(t);
    }

    bool operator==(const Vocabulary& o) const { return token_of == o.token_of; }
};

inline Vocabulary make_vocabulary_base() {
    Vocabulary v;
    v.add("<PAD>");
    v.add("<SOS>");
    v.add("<EOS>");
    v.add("<UNK>");
    return v;
}

// The closed abstract alphabet: specials, keywords, separators/operators,
// idioms (sorted), then typified IDs up to the per-category cap. Abstraction
// guarantees streams stay inside this set for methods under the size filter.
inline Vocabulary build_standard_vocab(const std::set<std::string>& idioms,
                                       int ids_per_category = 30) {
    Vocabulary v = make_vocabulary_base();
    for (const char* k : kKeywords) v.add(k);
    for (const char* s : kSeparators) {
        if (std::string_view(s) == "@") continue;  // stripped during canonicalization
        v.add(s);
    }
    for (const char* op : kOperators) v.add(op);
    for (const std::string& idiom : idioms) v.add(idiom);
    for (int c = 0; c < 7; ++c)
        for (int i = 0; i < ids_per_category; ++i)
            v.add(make_typified_id(static_cast<Category>(c), static_cast<std::size_t>(i)));
    return v;
}

// Encodes a token stream; out-of-vocabulary tokens map to UNK and are counted.
inline std::vector<int> encode_tokens(const Vocabulary& v, const std::vector<std::string>& tokens,
                                      std::size_t* unk_count = nullptr) {
    std::vector<int> ids;
    ids.reserve(tokens.size());
    for (const std::string& t : tokens) {
        int id = v.id_or_unk(t);
        if (id == Vocabulary::kUnk && unk_count) ++*unk_count;
        ids.push_back(id);
    }
    return ids;
}

inline std::vector<std::string> decode_tokens(const Vocabulary& v, const std::vector<int>& ids) {
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (int id : ids) out.push_back(v.token(id));
    return out;
}

}  // namespace neuromut
