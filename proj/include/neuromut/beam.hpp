#pragma once

#include <algorithm>
#include <cassert>
#include <string>
#include <utility>
#include <vector>

#include "neuromut/model.hpp"
#include "neuromut/mutant.hpp"

namespace neuromut {

template <class State>
struct BeamHypothesis {
    std::vector<int> tokens;  // emitted ids, end-of-sequence excluded
    double log_prob = 0.0;
    bool finished = false;
    State state{};
};

namespace detail {

// Candidate during expansion: references its parent, appends one token or
// marks termination. The full sequence is (parent tokens, appended, EOS?).
struct BeamCandidate {
    std::size_t parent = 0;
    int token = -1;  // -1: carried finished hypothesis (no new token)
    double log_prob = 0.0;
    bool finished = false;
};

// token at position i of a candidate's emitted sequence, with the
// end-of-sequence marker made explicit so ties order lexicographically over
// whole token-index sequences; -1 past the end (ranks before everything).
template <class State>
int candidate_token_at(const BeamCandidate& c, const std::vector<BeamHypothesis<State>>& hyps,
                       int eos_id, std::size_t i) {
    const auto& parent_tokens = hyps[c.parent].tokens;
    std::size_t len = parent_tokens.size();
    if (i < len) return parent_tokens[i];
    if (c.token >= 0) {
        if (i == len) return c.token;
        ++len;
    }
    if (c.finished && i == len) return eos_id;
    return -1;
}

template <class State>
bool candidate_less(const BeamCandidate& a, const BeamCandidate& b,
                    const std::vector<BeamHypothesis<State>>& hyps, int eos_id) {
    if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
    for (std::size_t i = 0;; ++i) {
        int ta = candidate_token_at(a, hyps, eos_id, i);
        int tb = candidate_token_at(b, hyps, eos_id, i);
        if (ta != tb) return ta < tb;
        if (ta == -1) return false;
    }
}

}  // namespace detail

// Beam search over any stepping model providing:
//   using State = ...;
//   State start() const;
//   std::pair<Vector, State> step(int prev_token, const State&) const;
//   int vocab_size() const;
// Expansion covers every non-masked token; finished hypotheses are carried
// forward and compete by total log-probability. Ties break lexicographically
// on the token-index sequence. Runs until all hypotheses finish or max_len
// steps elapse.
template <class Stepper>
std::vector<BeamHypothesis<typename Stepper::State>> beam_search(
    const Stepper& model, int k, int max_len, int sos_id, int eos_id,
    const std::vector<int>& masked_ids) {
    using State = typename Stepper::State;
    using Hyp = BeamHypothesis<State>;
    assert(k >= 1);

    std::vector<char> masked(static_cast<std::size_t>(model.vocab_size()), 0);
    for (int id : masked_ids) masked[static_cast<std::size_t>(id)] = 1;

    std::vector<Hyp> hyps(1);
    hyps[0].state = model.start();

    for (int step = 0; step < max_len; ++step) {
        bool all_finished = true;
        for (const Hyp& h : hyps)
            if (!h.finished) all_finished = false;
        if (all_finished) break;

        std::vector<detail::BeamCandidate> candidates;
        std::vector<State> next_states(hyps.size());
        for (std::size_t i = 0; i < hyps.size(); ++i) {
            const Hyp& h = hyps[i];
            if (h.finished) {
                candidates.push_back({i, -1, h.log_prob, true});
                continue;
            }
            int prev = h.tokens.empty() ? sos_id : h.tokens.back();
            auto [logp, next] = model.step(prev, h.state);
            next_states[i] = std::move(next);
            for (int v = 0; v < model.vocab_size(); ++v) {
                if (masked[static_cast<std::size_t>(v)]) continue;
                bool ends = v == eos_id;
                candidates.push_back({i, ends ? -1 : v, h.log_prob + logp[v], ends});
            }
        }
        std::sort(candidates.begin(), candidates.end(),
                  [&](const detail::BeamCandidate& a, const detail::BeamCandidate& b) {
                      return detail::candidate_less(a, b, hyps, eos_id);
                  });
        if (candidates.size() > static_cast<std::size_t>(k)) candidates.resize(static_cast<std::size_t>(k));
        assert(!candidates.empty());

        std::vector<Hyp> next_hyps;
        next_hyps.reserve(candidates.size());
        for (const auto& c : candidates) {
            Hyp h;
            h.tokens = hyps[c.parent].tokens;
            if (c.token >= 0) h.tokens.push_back(c.token);
            h.log_prob = c.log_prob;
            h.finished = c.finished;
            h.state = hyps[c.parent].finished ? hyps[c.parent].state : next_states[c.parent];
            next_hyps.push_back(std::move(h));
        }
        hyps = std::move(next_hyps);
    }

    std::sort(hyps.begin(), hyps.end(), [&](const Hyp& a, const Hyp& b) {
        if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
        auto at = [&](const Hyp& h, std::size_t i) -> int {
            if (i < h.tokens.size()) return h.tokens[i];
            if (h.finished && i == h.tokens.size()) return eos_id;
            return -1;
        };
        for (std::size_t i = 0;; ++i) {
            int ta = at(a, i), tb = at(b, i);
            if (ta != tb) return ta < tb;
            if (ta == -1) return false;
        }
    });
    return hyps;
}

// Adapter exposing the trained model as a beam-search stepper for one
// encoded source method.
struct ModelStepper {
    using State = Vector;
    const ModelParams* params;
    Matrix encoded;

    State start() const { return initial_decoder_state(*params, encoded); }
    std::pair<Vector, State> step(int prev, const State& s) const {
        return decode_step(*params, prev, s, encoded);
    }
    int vocab_size() const { return params->vocab.size(); }
};

// Generates the k most probable mutants of an encoded source stream. PAD,
// SOS and UNK are never emitted. Candidates come back sorted by total
// log-probability, specials stripped, rank starting at 1.
inline std::vector<MutantCandidate> beam_decode(const ModelParams& p,
                                                const std::vector<int>& source, int k,
                                                int max_len) {
    validate_params(p);
    ModelStepper stepper{&p, encode(p, source)};
    auto hyps = beam_search(stepper, k, max_len, Vocabulary::kSos, Vocabulary::kEos,
                            {Vocabulary::kPad, Vocabulary::kSos, Vocabulary::kUnk});
    std::vector<MutantCandidate> out;
    out.reserve(hyps.size());
    for (std::size_t i = 0; i < hyps.size(); ++i) {
        MutantCandidate c;
        c.tokens = decode_tokens(p.vocab, hyps[i].tokens);
        c.log_prob = hyps[i].log_prob;
        c.rank = static_cast<int>(i) + 1;
        c.finished = hyps[i].finished;
        out.push_back(std::move(c));
    }
    return out;
}

inline std::vector<MutantCandidate> beam_decode_tokens(const ModelParams& p,
                                                       const std::vector<std::string>& tokens,
                                                       int k, int max_len) {
    return beam_decode(p, encode_tokens(p.vocab, tokens), k, max_len);
}

}  // namespace neuromut
