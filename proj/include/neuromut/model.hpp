#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "neuromut/errors.hpp"
#include "neuromut/vocab.hpp"

namespace neuromut {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Deterministic uniform source built on mt19937_64 with an explicit
// bits-to-double mapping, so saved models replay identically anywhere.
class UniformRng {
public:
    explicit UniformRng(std::uint64_t seed) : engine_(seed) {}

    double next_unit() {  // [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double next(double lo, double hi) { return lo + next_unit() * (hi - lo); }

    std::uint64_t next_index(std::uint64_t bound) { return engine_() % bound; }

private:
    std::mt19937_64 engine_;
};

// Gated recurrent cell. Gate equations (documented in the README):
//   z = sigmoid(Wz x + Uz h + bz)
//   r = sigmoid(Wr x + Ur h + br)
//   n = tanh(Wh x + Uh (r .* h) + bh)
//   h' = (1 - z) .* h + z .* n
struct GruCell {
    Matrix Wz, Wr, Wh;  // hidden x input
    Matrix Uz, Ur, Uh;  // hidden x hidden
    Vector bz, br, bh;

    void resize(int hidden, int input) {
        Wz.resize(hidden, input);
        Wr.resize(hidden, input);
        Wh.resize(hidden, input);
        Uz.resize(hidden, hidden);
        Ur.resize(hidden, hidden);
        Uh.resize(hidden, hidden);
        bz.resize(hidden);
        br.resize(hidden);
        bh.resize(hidden);
    }
};

struct Hyperparams {
    int embed_dim = 32;
    int hidden_dim = 32;
    double learning_rate = 0.1;
    int epochs = 10;
    std::uint64_t seed = 42;
};

// All learnable tensors plus the vocabulary they are sized against.
struct ModelParams {
    Hyperparams hp;
    Vocabulary vocab;

    Matrix embed;              // V x d_e
    GruCell enc_fwd, enc_bwd;  // input d_e
    GruCell dec;               // input d_e + 2 d_h
    Matrix att_state;          // d_h x d_h     (projects the decoder state)
    Matrix att_enc;            // d_h x 2 d_h   (projects an encoder state)
    Vector att_score;          // d_h           (alignment score vector)
    Matrix init_proj;          // d_h x 2 d_h   (decoder start state projection)
    Vector init_bias;          // d_h
    Matrix out_proj;           // V x 3 d_h
    Vector out_bias;           // V
};

// Visits every tensor in a fixed canonical order; this order defines the
// serialization layout, the initialization fill order, and gradient pairing.
template <class Params, class F>
void for_each_tensor(Params& p, F&& f) {
    auto gru = [&](const char* prefix, auto& c) {
        std::string s(prefix);
        f((s + ".Wz").c_str(), c.Wz);
        f((s + ".Wr").c_str(), c.Wr);
        f((s + ".Wh").c_str(), c.Wh);
        f((s + ".Uz").c_str(), c.Uz);
        f((s + ".Ur").c_str(), c.Ur);
        f((s + ".Uh").c_str(), c.Uh);
        f((s + ".bz").c_str(), c.bz);
        f((s + ".br").c_str(), c.br);
        f((s + ".bh").c_str(), c.bh);
    };
    f("embed", p.embed);
    gru("enc_fwd", p.enc_fwd);
    gru("enc_bwd", p.enc_bwd);
    gru("dec", p.dec);
    f("att_state", p.att_state);
    f("att_enc", p.att_enc);
    f("att_score", p.att_score);
    f("init_proj", p.init_proj);
    f("init_bias", p.init_bias);
    f("out_proj", p.out_proj);
    f("out_bias", p.out_bias);
}

inline void resize_params(ModelParams& p) {
    int V = p.vocab.size();
    int de = p.hp.embed_dim;
    int dh = p.hp.hidden_dim;
    p.embed.resize(V, de);
    p.enc_fwd.resize(dh, de);
    p.enc_bwd.resize(dh, de);
    p.dec.resize(dh, de + 2 * dh);
    p.att_state.resize(dh, dh);
    p.att_enc.resize(dh, 2 * dh);
    p.att_score.resize(dh);
    p.init_proj.resize(dh, 2 * dh);
    p.init_bias.resize(dh);
    p.out_proj.resize(V, 3 * dh);
    p.out_bias.resize(V);
}

inline ModelParams init_params(Vocabulary vocab, const Hyperparams& hp) {
    ModelParams p;
    p.hp = hp;
    p.vocab = std::move(vocab);
    resize_params(p);
    UniformRng rng(hp.seed);
    for_each_tensor(p, [&](const char*, auto& t) {
        double* d = t.data();
        for (Eigen::Index i = 0; i < t.size(); ++i) d[i] = rng.next(-0.08, 0.08);
    });
    return p;
}

inline void validate_params(const ModelParams& p) {
    int V = p.vocab.size();
    int de = p.hp.embed_dim;
    int dh = p.hp.hidden_dim;
    if (V < 4 || de < 1 || dh < 1)
        throw DimensionMismatch("vocabulary or dimensions too small");
    auto expect = [](bool ok, const char* what) {
        if (!ok) throw DimensionMismatch(std::string("bad tensor shape: ") + what);
    };
    expect(p.embed.rows() == V && p.embed.cols() == de, "embed");
    expect(p.enc_fwd.Wz.rows() == dh && p.enc_fwd.Wz.cols() == de, "enc_fwd");
    expect(p.enc_bwd.Wz.rows() == dh && p.enc_bwd.Wz.cols() == de, "enc_bwd");
    expect(p.dec.Wz.rows() == dh && p.dec.Wz.cols() == de + 2 * dh, "dec");
    expect(p.att_state.rows() == dh && p.att_state.cols() == dh, "att_state");
    expect(p.att_enc.rows() == dh && p.att_enc.cols() == 2 * dh, "att_enc");
    expect(p.att_score.size() == dh, "att_score");
    expect(p.init_proj.rows() == dh && p.init_proj.cols() == 2 * dh, "init_proj");
    expect(p.init_bias.size() == dh, "init_bias");
    expect(p.out_proj.rows() == V && p.out_proj.cols() == 3 * dh, "out_proj");
    expect(p.out_bias.size() == V, "out_bias");
}

inline Vector sigmoid(const Vector& x) {
    return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

struct GruStepCache {
    Vector x, hprev, z, r, n, h;
};

inline Vector gru_step(const GruCell& c, const Vector& x, const Vector& hprev,
                       GruStepCache* cache = nullptr) {
    Vector z = sigmoid(c.Wz * x + c.Uz * hprev + c.bz);
    Vector r = sigmoid(c.Wr * x + c.Ur * hprev + c.br);
    Vector n = (c.Wh * x + c.Uh * (r.cwiseProduct(hprev)) + c.bh).array().tanh();
    Vector h = (Vector::Ones(z.size()) - z).cwiseProduct(hprev) + z.cwiseProduct(n);
    if (cache) {
        cache->x = x;
        cache->hprev = hprev;
        cache->z = std::move(z);
        cache->r = std::move(r);
        cache->n = std::move(n);
        cache->h = h;
    }
    return h;
}

// Encoder: column i of the result holds [forward state over x_1..x_i;
// backward state over x_n..x_i].
inline Matrix encode(const ModelParams& p, const std::vector<int>& source) {
    validate_params(p);
    if (source.empty()) throw DimensionMismatch("encode: empty source");
    int n = static_cast<int>(source.size());
    int dh = p.hp.hidden_dim;
    Matrix h(2 * dh, n);
    Vector fwd = Vector::Zero(dh);
    for (int i = 0; i < n; ++i) {
        fwd = gru_step(p.enc_fwd, p.embed.row(source[static_cast<std::size_t>(i)]).transpose(), fwd);
        h.col(i).head(dh) = fwd;
    }
    Vector bwd = Vector::Zero(dh);
    for (int i = n - 1; i >= 0; --i) {
        bwd = gru_step(p.enc_bwd, p.embed.row(source[static_cast<std::size_t>(i)]).transpose(), bwd);
        h.col(i).tail(dh) = bwd;
    }
    return h;
}

// Decoder start state: learned projection of the two final encoder states.
inline Vector initial_decoder_state(const ModelParams& p, const Matrix& h) {
    int dh = p.hp.hidden_dim;
    Vector concat(2 * dh);
    concat.head(dh) = h.col(h.cols() - 1).head(dh);  // forward state at x_n
    concat.tail(dh) = h.col(0).tail(dh);             // backward state at x_1
    return (p.init_proj * concat + p.init_bias).array().tanh();
}

inline Vector softmax(const Vector& x) {
    double m = x.maxCoeff();
    Vector e = (x.array() - m).exp();
    return e / e.sum();
}

inline Vector log_softmax(const Vector& x) {
    double m = x.maxCoeff();
    double lse = m + std::log((x.array() - m).exp().sum());
    return x.array() - lse;
}

// Additive attention: weights are the softmax of
// score_i = v . tanh(att_state * s + att_enc * h_i), context = sum_i a_i h_i.
inline std::pair<Vector, Vector> attention_context(const ModelParams& p, const Vector& state,
                                                   const Matrix& h) {
    if (state.size() != p.hp.hidden_dim || h.rows() != 2 * p.hp.hidden_dim)
        throw DimensionMismatch("attention_context: state/encoder shape mismatch");
    Eigen::Index n = h.cols();
    Matrix pre = ((p.att_enc * h).colwise() + (p.att_state * state).eval()).array().tanh();
    Vector scores = pre.transpose() * p.att_score;  // n
    Vector a = softmax(scores);
    Vector c = h * a;
    return {std::move(c), std::move(a)};
}

// One decoder step: attention context from the incoming state, recurrent
// update on [embedding(prev); context], log-softmax over the vocabulary of
// the output projection applied to [new state; context].
inline std::pair<Vector, Vector> decode_step(const ModelParams& p, int prev_token,
                                             const Vector& state, const Matrix& h) {
    validate_params(p);
    if (prev_token < 0 || prev_token >= p.vocab.size())
        throw DimensionMismatch("decode_step: token id out of range");
    auto [c, a] = attention_context(p, state, h);
    int de = p.hp.embed_dim;
    int dh = p.hp.hidden_dim;
    Vector x(de + 2 * dh);
    x.head(de) = p.embed.row(prev_token).transpose();
    x.tail(2 * dh) = c;
    Vector new_state = gru_step(p.dec, x, state);
    Vector combined(3 * dh);
    combined.head(dh) = new_state;
    combined.tail(2 * dh) = c;
    Vector log_probs = log_softmax(p.out_proj * combined + p.out_bias);
    return {std::move(log_probs), std::move(new_state)};
}

// Greedy decoding; ties go to the lowest token index. PAD/SOS/UNK are never
// emitted.
inline std::vector<int> greedy_decode(const ModelParams& p, const std::vector<int>& source,
                                      int max_len) {
    Matrix h = encode(p, source);
    Vector s = initial_decoder_state(p, h);
    std::vector<int> out;
    int prev = Vocabulary::kSos;
    for (int step = 0; step < max_len; ++step) {
        auto [logp, s2] = decode_step(p, prev, s, h);
        s = std::move(s2);
        int best = -1;
        double best_lp = 0;
        for (int v = 0; v < p.vocab.size(); ++v) {
            if (v == Vocabulary::kPad || v == Vocabulary::kSos || v == Vocabulary::kUnk) continue;
            if (best < 0 || logp[v] > best_lp) {
                best = v;
                best_lp = logp[v];
            }
        }
        if (best == Vocabulary::kEos) break;
        out.push_back(best);
        prev = best;
    }
    return out;
}

// Re-scores a token sequence under the model: sum of per-step log-probs,
// including the end-of-sequence step when `ends` is true.
inline double rescore(const ModelParams& p, const std::vector<int>& source,
                      const std::vector<int>& tokens, bool ends) {
    Matrix h = encode(p, source);
    Vector s = initial_decoder_state(p, h);
    double total = 0.0;
    int prev = Vocabulary::kSos;
    for (std::size_t i = 0; i <= tokens.size(); ++i) {
        if (i == tokens.size() && !ends) break;
        int target = i == tokens.size() ? Vocabulary::kEos : tokens[i];
        auto [logp, s2] = decode_step(p, prev, s, h);
        total += logp[target];
        s = std::move(s2);
        prev = target;
    }
    return total;
}

}  // namespace neuromut
