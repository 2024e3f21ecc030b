#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "neuromut/errors.hpp"
#include "neuromut/model.hpp"

namespace neuromut {

// One aligned training example, already mapped to vocabulary ids.
struct TrainingPair {
    std::vector<int> source;
    std::vector<int> target;
};

// Gradient accumulator shaped like the model tensors.
struct Gradients {
    Matrix embed;
    GruCell enc_fwd, enc_bwd, dec;
    Matrix att_state, att_enc;
    Vector att_score;
    Matrix init_proj;
    Vector init_bias;
    Matrix out_proj;
    Vector out_bias;
};

inline Gradients make_gradients(const ModelParams& p) {
    Gradients g;
    g.embed.resize(p.embed.rows(), p.embed.cols());
    auto size_like = [](GruCell& dst, const GruCell& src) {
        dst.resize(static_cast<int>(src.Wz.rows()), static_cast<int>(src.Wz.cols()));
    };
    size_like(g.enc_fwd, p.enc_fwd);
    size_like(g.enc_bwd, p.enc_bwd);
    size_like(g.dec, p.dec);
    g.att_state.resize(p.att_state.rows(), p.att_state.cols());
    g.att_enc.resize(p.att_enc.rows(), p.att_enc.cols());
    g.att_score.resize(p.att_score.size());
    g.init_proj.resize(p.init_proj.rows(), p.init_proj.cols());
    g.init_bias.resize(p.init_bias.size());
    g.out_proj.resize(p.out_proj.rows(), p.out_proj.cols());
    g.out_bias.resize(p.out_bias.size());
    return g;
}

inline void zero_gradients(Gradients& g) {
    for_each_tensor(g, [](const char*, auto& t) { t.setZero(); });
}

namespace detail {

// Reverse-mode step through one gated-cell application. Accumulates weight
// gradients into g and returns (d input, d previous-hidden).
inline std::pair<Vector, Vector> gru_backward(const GruCell& c, GruCell& g,
                                              const GruStepCache& cache, const Vector& dh) {
    const Vector& z = cache.z;
    const Vector& r = cache.r;
    const Vector& n = cache.n;
    const Vector& hprev = cache.hprev;
    const Vector& x = cache.x;

    Vector dn = dh.cwiseProduct(z);
    Vector dz = dh.cwiseProduct(n - hprev);
    Vector dhprev = dh.cwiseProduct(Vector::Ones(z.size()) - z);

    Vector dpre_n = (Vector::Ones(n.size()) - n.cwiseProduct(n)).cwiseProduct(dn);
    g.Wh.noalias() += dpre_n * x.transpose();
    g.Uh.noalias() += dpre_n * (r.cwiseProduct(hprev)).transpose();
    g.bh += dpre_n;
    Vector through_uh = c.Uh.transpose() * dpre_n;
    Vector dr = through_uh.cwiseProduct(hprev);
    dhprev += through_uh.cwiseProduct(r);

    Vector dpre_z = z.cwiseProduct(Vector::Ones(z.size()) - z).cwiseProduct(dz);
    g.Wz.noalias() += dpre_z * x.transpose();
    g.Uz.noalias() += dpre_z * hprev.transpose();
    g.bz += dpre_z;
    dhprev.noalias() += c.Uz.transpose() * dpre_z;

    Vector dpre_r = r.cwiseProduct(Vector::Ones(r.size()) - r).cwiseProduct(dr);
    g.Wr.noalias() += dpre_r * x.transpose();
    g.Ur.noalias() += dpre_r * hprev.transpose();
    g.br += dpre_r;
    dhprev.noalias() += c.Ur.transpose() * dpre_r;

    Vector dx = c.Wz.transpose() * dpre_z;
    dx.noalias() += c.Wr.transpose() * dpre_r;
    dx.noalias() += c.Wh.transpose() * dpre_n;
    return {std::move(dx), std::move(dhprev)};
}

struct AttentionCache {
    Vector s_prev;  // decoder state the scores were computed from
    Matrix u;       // d_h x n, tanh of the alignment pre-activations
    Vector a;       // n, attention weights
    Vector c;       // 2 d_h, context
};

inline AttentionCache attention_forward(const ModelParams& p, const Vector& s, const Matrix& h) {
    AttentionCache cache;
    cache.s_prev = s;
    cache.u = ((p.att_enc * h).colwise() + (p.att_state * s).eval()).array().tanh();
    Vector scores = cache.u.transpose() * p.att_score;
    cache.a = softmax(scores);
    cache.c = h * cache.a;
    return cache;
}

// Backward through one attention application: dc is the incoming gradient on
// the context; gradients on the encoder states go into dH, on the query
// state into the returned vector.
inline Vector attention_backward(const ModelParams& p, Gradients& g, const AttentionCache& cache,
                                 const Matrix& h, const Vector& dc, Matrix& dH) {
    Vector da = h.transpose() * dc;
    dH.noalias() += dc * cache.a.transpose();
    double mix = cache.a.dot(da);
    Vector de = cache.a.cwiseProduct(da.array() - mix);
    Matrix dq = (1.0 - cache.u.array().square()).matrix().cwiseProduct(
        (p.att_score * de.transpose()).eval());
    g.att_score.noalias() += cache.u * de;
    Vector dq_sum = dq.rowwise().sum();
    g.att_state.noalias() += dq_sum * cache.s_prev.transpose();
    g.att_enc.noalias() += dq * h.transpose();
    dH.noalias() += p.att_enc.transpose() * dq;
    return p.att_state.transpose() * dq_sum;
}

}  // namespace detail

// Teacher-forced negative log likelihood of one pair. When grads is given it
// receives the full backpropagated gradient (grads must be pre-sized; it is
// zeroed here).
inline double pair_loss(const ModelParams& p, const TrainingPair& pair,
                        Gradients* grads = nullptr) {
    if (pair.source.empty()) throw DimensionMismatch("training pair with empty source");
    int n = static_cast<int>(pair.source.size());
    int de = p.hp.embed_dim;
    int dh = p.hp.hidden_dim;

    // --- encoder forward, caching every step
    std::vector<GruStepCache> fcache(static_cast<std::size_t>(n));
    std::vector<GruStepCache> bcache(static_cast<std::size_t>(n));
    Matrix h(2 * dh, n);
    Vector fwd = Vector::Zero(dh);
    for (int i = 0; i < n; ++i) {
        fwd = gru_step(p.enc_fwd, p.embed.row(pair.source[static_cast<std::size_t>(i)]).transpose(),
                       fwd, &fcache[static_cast<std::size_t>(i)]);
        h.col(i).head(dh) = fwd;
    }
    Vector bwd = Vector::Zero(dh);
    for (int i = n - 1; i >= 0; --i) {
        bwd = gru_step(p.enc_bwd, p.embed.row(pair.source[static_cast<std::size_t>(i)]).transpose(),
                       bwd, &bcache[static_cast<std::size_t>(i)]);
        h.col(i).tail(dh) = bwd;
    }

    Vector init_concat(2 * dh);
    init_concat.head(dh) = h.col(n - 1).head(dh);
    init_concat.tail(dh) = h.col(0).tail(dh);
    Vector s0 = (p.init_proj * init_concat + p.init_bias).array().tanh();

    // --- decoder forward with teacher forcing; targets end with EOS
    std::size_t steps = pair.target.size() + 1;
    std::vector<int> prev_ids(steps), target_ids(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        prev_ids[t] = t == 0 ? Vocabulary::kSos : pair.target[t - 1];
        target_ids[t] = t == pair.target.size() ? Vocabulary::kEos : pair.target[t];
    }

    std::vector<detail::AttentionCache> att(steps);
    std::vector<GruStepCache> dcache(steps);
    std::vector<Vector> probs(steps);
    double loss = 0.0;
    Vector s = s0;
    for (std::size_t t = 0; t < steps; ++t) {
        att[t] = detail::attention_forward(p, s, h);
        Vector x(de + 2 * dh);
        x.head(de) = p.embed.row(prev_ids[t]).transpose();
        x.tail(2 * dh) = att[t].c;
        s = gru_step(p.dec, x, s, &dcache[t]);
        Vector combined(3 * dh);
        combined.head(dh) = s;
        combined.tail(2 * dh) = att[t].c;
        Vector logp = log_softmax(p.out_proj * combined + p.out_bias);
        loss -= logp[target_ids[t]];
        probs[t] = logp.array().exp();
    }

    if (!grads) return loss;
    Gradients& g = *grads;
    zero_gradients(g);

    // --- output layer and decoder backward
    Matrix dH = Matrix::Zero(2 * dh, n);
    Vector ds_carry = Vector::Zero(dh);
    for (std::size_t t = steps; t-- > 0;) {
        Vector dlogits = probs[t];
        dlogits[target_ids[t]] -= 1.0;
        Vector combined(3 * dh);
        combined.head(dh) = dcache[t].h;
        combined.tail(2 * dh) = att[t].c;
        g.out_proj.noalias() += dlogits * combined.transpose();
        g.out_bias += dlogits;
        Vector dcombined = p.out_proj.transpose() * dlogits;

        Vector ds = dcombined.head(dh) + ds_carry;
        Vector dc = dcombined.tail(2 * dh);

        auto [dx, ds_prev_gru] = detail::gru_backward(p.dec, g.dec, dcache[t], ds);
        g.embed.row(prev_ids[t]) += dx.head(de).transpose();
        dc += dx.tail(2 * dh);
        Vector ds_prev_att = detail::attention_backward(p, g, att[t], h, dc, dH);
        ds_carry = ds_prev_gru + ds_prev_att;
    }

    // --- initial-state projection backward
    Vector dpre_init = (Vector::Ones(dh) - s0.cwiseProduct(s0)).cwiseProduct(ds_carry);
    g.init_proj.noalias() += dpre_init * init_concat.transpose();
    g.init_bias += dpre_init;
    Vector dconcat = p.init_proj.transpose() * dpre_init;
    dH.col(n - 1).head(dh) += dconcat.head(dh);
    dH.col(0).tail(dh) += dconcat.tail(dh);

    // --- encoder backward, both directions
    Vector carry = Vector::Zero(dh);
    for (int i = n - 1; i >= 0; --i) {
        Vector dhi = dH.col(i).head(dh) + carry;
        auto [dx, dhprev] = detail::gru_backward(p.enc_fwd, g.enc_fwd,
                                                 fcache[static_cast<std::size_t>(i)], dhi);
        g.embed.row(pair.source[static_cast<std::size_t>(i)]) += dx.transpose();
        carry = std::move(dhprev);
    }
    carry = Vector::Zero(dh);
    for (int i = 0; i < n; ++i) {
        Vector dhi = dH.col(i).tail(dh) + carry;
        auto [dx, dhprev] = detail::gru_backward(p.enc_bwd, g.enc_bwd,
                                                 bcache[static_cast<std::size_t>(i)], dhi);
        g.embed.row(pair.source[static_cast<std::size_t>(i)]) += dx.transpose();
        carry = std::move(dhprev);
    }
    return loss;
}

inline void sgd_update(ModelParams& p, const Gradients& g, double lr) {
    std::vector<std::pair<double*, Eigen::Index>> ts;
    std::vector<std::pair<const double*, Eigen::Index>> gs;
    for_each_tensor(p, [&](const char*, auto& t) { ts.emplace_back(t.data(), t.size()); });
    for_each_tensor(const_cast<Gradients&>(g),
                    [&](const char*, auto& t) { gs.emplace_back(t.data(), t.size()); });
    for (std::size_t i = 0; i < ts.size(); ++i) {
        for (Eigen::Index j = 0; j < ts[i].second; ++j) ts[i].first[j] -= lr * gs[i].first[j];
    }
}

// Plain stochastic gradient descent over the corpus: one update per pair,
// seeded shuffle per epoch. Returns the per-epoch mean pair loss.
inline std::vector<double> train(ModelParams& p, const std::vector<TrainingPair>& corpus) {
    validate_params(p);
    if (corpus.empty()) throw CorpusMismatch("training corpus is empty");
    Gradients g = make_gradients(p);
    std::vector<double> losses;
    UniformRng shuffle_rng(p.hp.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < p.hp.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.next_index(i)]);
        double total = 0.0;
        for (std::size_t idx : order) {
            double loss = pair_loss(p, corpus[idx], &g);
            if (!std::isfinite(loss))
                throw NonFiniteLoss("loss became non-finite at epoch " + std::to_string(epoch));
            sgd_update(p, g, p.hp.learning_rate);
            total += loss;
        }
        losses.push_back(total / static_cast<double>(corpus.size()));
    }
    return losses;
}

}  // namespace neuromut
