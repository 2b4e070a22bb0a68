#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tabfact/encoding.hpp"
#include "tabfact/nn/encoder.hpp"
#include "tabfact/nn/grad_check.hpp"
#include "tabfact/table.hpp"

namespace tabfact {

using nn::Matrix;

/// Linear map of the [CLS] hidden state to three verdict logits.
template <typename Scalar>
struct VerdictHead {
    Matrix<Scalar> w;  // d x 3
    Matrix<Scalar> b;  // 1 x 3

    template <typename F>
    void visit(F&& f) {
        f("verdict.w", w);
        f("verdict.b", b);
    }
};

/// Linear map of every token's hidden state to one selection logit.
template <typename Scalar>
struct CellHead {
    Matrix<Scalar> w;  // d x 1
    Matrix<Scalar> b;  // 1 x 1

    template <typename F>
    void visit(F&& f) {
        f("cell.w", w);
        f("cell.b", b);
    }
};

/// Encoder plus both task heads; the visit order is the checkpoint tensor order.
template <typename Scalar>
struct Model {
    nn::EncoderParams<Scalar> encoder;
    VerdictHead<Scalar> verdict;
    CellHead<Scalar> cell;

    template <typename F>
    void visit(F&& f) {
        encoder.visit(f);
        verdict.visit(f);
        cell.visit(f);
    }
};

inline bool is_head_tensor(const std::string& name) { return name.rfind("encoder.", 0) != 0; }

template <typename Scalar>
Model<Scalar> init_model(const nn::EncoderConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    Model<Scalar> m;
    m.encoder = nn::init_encoder<Scalar>(cfg, rng);
    m.verdict.w.resize(cfg.d_model, kNumVerdicts);
    nn::fill_normal(m.verdict.w, rng, cfg.init_std);
    m.verdict.b = Matrix<Scalar>::Zero(1, kNumVerdicts);
    m.cell.w.resize(cfg.d_model, 1);
    nn::fill_normal(m.cell.w, rng, cfg.init_std);
    m.cell.b = Matrix<Scalar>::Zero(1, 1);
    return m;
}

// ---------------------------------------------------------------------------------------------
// Verdict head

using VerdictProbs = std::array<double, kNumVerdicts>;

template <typename Scalar>
Eigen::Matrix<Scalar, 1, kNumVerdicts> verdict_logits(const VerdictHead<Scalar>& head, const Matrix<Scalar>& hidden) {
    return hidden.row(0) * head.w + head.b.row(0);
}

template <typename Derived>
VerdictProbs softmax3(const Eigen::MatrixBase<Derived>& logits) {
    const double mx = static_cast<double>(logits.maxCoeff());
    VerdictProbs p{};
    double sum = 0.0;
    for (int k = 0; k < kNumVerdicts; ++k) {
        p[static_cast<std::size_t>(k)] = std::exp(static_cast<double>(logits(k)) - mx);
        sum += p[static_cast<std::size_t>(k)];
    }
    for (auto& v : p) v /= sum;
    return p;
}

/// Argmax with ties broken toward the earlier label (Entailed < Refuted < Unknown).
inline Verdict argmax_verdict(const VerdictProbs& p) {
    int best = 0;
    for (int k = 1; k < kNumVerdicts; ++k)
        if (p[static_cast<std::size_t>(k)] > p[static_cast<std::size_t>(best)]) best = k;
    return static_cast<Verdict>(best);
}

template <typename Scalar>
VerdictProbs verdict_forward(const nn::Encoder<Scalar>& enc, const Model<Scalar>& m, const EncodedExample& e) {
    nn::ForwardCache<Scalar> cache;
    const Matrix<Scalar> hidden = enc.forward(m.encoder, e, cache);
    return softmax3(verdict_logits(m.verdict, hidden));
}

// ---------------------------------------------------------------------------------------------
// Cell-selection head

/// Cell-level outputs for every body cell of the rows kept in the sequence. `cells` holds the
/// flat cell index (row * n_cols + col); a cell without tokens gets logit 0.
template <typename Scalar>
struct CellOutput {
    std::vector<int> cells;
    std::vector<int> token_counts;
    std::vector<Scalar> logits;
    std::vector<double> probs;
};

/// Body cell indices present in `e`, row-major.
inline std::vector<int> body_cells(const EncodedExample& e) {
    std::vector<int> out;
    for (int r = 1; r <= e.kept_body_rows; ++r)
        for (int c = 0; c < e.n_cols; ++c) out.push_back(r * e.n_cols + c);
    return out;
}

template <typename Scalar>
CellOutput<Scalar> cell_logits(const CellHead<Scalar>& head, const Matrix<Scalar>& hidden, const EncodedExample& e) {
    CellOutput<Scalar> out;
    out.cells = body_cells(e);
    const int first_body = e.n_cols;
    out.token_counts.assign(out.cells.size(), 0);
    out.logits.assign(out.cells.size(), Scalar(0));
    const Matrix<Scalar> token = hidden * head.w;
    for (int i = 0; i < e.attention_len; ++i) {
        const int ci = e.cell_index[static_cast<std::size_t>(i)];
        if (ci < first_body) continue;
        const auto slot = static_cast<std::size_t>(ci - first_body);
        if (slot >= out.cells.size()) continue;
        out.logits[slot] += token(i, 0) + head.b(0, 0);
        ++out.token_counts[slot];
    }
    out.probs.resize(out.cells.size());
    for (std::size_t k = 0; k < out.cells.size(); ++k) {
        if (out.token_counts[k] > 0) out.logits[k] /= static_cast<Scalar>(out.token_counts[k]);
        out.probs[k] = static_cast<double>(nn::sigmoid(out.logits[k]));
    }
    return out;
}

/// Accumulates head gradients for upstream cell-logit gradients and returns dL/dhidden.
template <typename Scalar>
Matrix<Scalar> cell_logits_backward(const CellHead<Scalar>& head, const Matrix<Scalar>& hidden,
                                    const EncodedExample& e, const CellOutput<Scalar>& out,
                                    std::span<const Scalar> dcell, CellHead<Scalar>& grads) {
    const int first_body = e.n_cols;
    Matrix<Scalar> dtoken = Matrix<Scalar>::Zero(hidden.rows(), 1);
    for (int i = 0; i < e.attention_len; ++i) {
        const int ci = e.cell_index[static_cast<std::size_t>(i)];
        if (ci < first_body) continue;
        const auto slot = static_cast<std::size_t>(ci - first_body);
        if (slot >= out.cells.size()) continue;
        dtoken(i, 0) = dcell[slot] / static_cast<Scalar>(out.token_counts[slot]);
    }
    grads.w += hidden.transpose() * dtoken;
    grads.b(0, 0) += dtoken.sum();
    return dtoken * head.w.transpose();
}

template <typename Scalar>
CellOutput<Scalar> cell_select_forward(const nn::Encoder<Scalar>& enc, const Model<Scalar>& m,
                                       const EncodedExample& e) {
    nn::ForwardCache<Scalar> cache;
    const Matrix<Scalar> hidden = enc.forward(m.encoder, e, cache);
    return cell_logits(m.cell, hidden, e);
}

// ---------------------------------------------------------------------------------------------
// Losses

inline constexpr double kLogClamp = 1e-12;

struct LossValue {
    double value = 0.0;
    int clamped = 0;  // log arguments raised to kLogClamp
};

using ClassWeights = std::array<double, kNumVerdicts>;

/// Sum over the batch of -w[gold] * log p[gold].
LossValue weighted_ce_loss(std::span<const VerdictProbs> probs, std::span<const Verdict> gold,
                           const ClassWeights& weights);

/// Gradient of -w[gold] log softmax(z)[gold] with respect to z.
inline std::array<double, kNumVerdicts> weighted_ce_logit_grad(const VerdictProbs& p, Verdict gold,
                                                               const ClassWeights& w) {
    std::array<double, kNumVerdicts> g{};
    const auto gi = static_cast<std::size_t>(gold);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = w[gi] * (p[k] - (k == gi ? 1.0 : 0.0));
    return g;
}

/// Labels of the scored cells, aligned with `cells` (flat indices into `grid`). Throws when a
/// header position is not Excluded or a scored body cell is Excluded.
std::vector<CellLabel> aligned_cell_labels(const CellLabelGrid& grid, std::span<const int> cells, int header_rows = 1);

/// -sum over labelled cells of [w_p y log p + (1 - y) log(1 - p)].
LossValue weighted_bce_loss(std::span<const double> probs, std::span<const CellLabel> labels, double w_p);

/// d/dz of the per-cell weighted BCE term, z the cell logit.
inline double weighted_bce_logit_grad(double p, CellLabel label, double w_p) {
    const double y = label == CellLabel::Relevant ? 1.0 : 0.0;
    return -w_p * y * (1.0 - p) + (1.0 - y) * p;
}

// ---------------------------------------------------------------------------------------------
// Gradient check over both heads

/// Loss and gradient of the joint objective (weighted CE on the verdict head plus weighted BCE on
/// the cell head) for one example.
template <typename Scalar>
double joint_loss_and_grad(const nn::Encoder<Scalar>& enc, const Model<Scalar>& m, const EncodedExample& e,
                           Verdict gold, const ClassWeights& weights, std::span<const CellLabel> cell_labels,
                           double w_p, Model<Scalar>* grads) {
    nn::ForwardCache<Scalar> cache;
    const Matrix<Scalar> hidden = enc.forward(m.encoder, e, cache);
    const auto logits = verdict_logits(m.verdict, hidden);
    const VerdictProbs p = softmax3(logits);
    // Log-softmax keeps the loss smooth for finite differences.
    const double mx = static_cast<double>(logits.maxCoeff());
    double lse = 0.0;
    for (int k = 0; k < kNumVerdicts; ++k) lse += std::exp(static_cast<double>(logits(k)) - mx);
    const auto gi = static_cast<std::size_t>(gold);
    double loss = -weights[gi] * (static_cast<double>(logits(static_cast<int>(gi))) - mx - std::log(lse));

    const CellOutput<Scalar> cells = cell_logits(m.cell, hidden, e);
    const double y_w = w_p;
    for (std::size_t k = 0; k < cells.cells.size(); ++k) {
        const double z = static_cast<double>(cells.logits[k]);
        const double y = cell_labels[k] == CellLabel::Relevant ? 1.0 : 0.0;
        // log sigmoid(z) = -softplus(-z), log(1 - sigmoid(z)) = -softplus(z)
        auto softplus = [](double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); };
        loss += y_w * y * softplus(-z) + (1.0 - y) * softplus(z);
    }
    if (grads == nullptr) return loss;

    const auto dlogits = weighted_ce_logit_grad(p, gold, weights);
    Eigen::Matrix<Scalar, 1, kNumVerdicts> dl;
    for (int k = 0; k < kNumVerdicts; ++k) dl(k) = static_cast<Scalar>(dlogits[static_cast<std::size_t>(k)]);
    grads->verdict.w += hidden.row(0).transpose() * dl;
    grads->verdict.b.row(0) += dl;
    Matrix<Scalar> dhidden = Matrix<Scalar>::Zero(hidden.rows(), hidden.cols());
    dhidden.row(0) += dl * m.verdict.w.transpose();

    std::vector<Scalar> dcell(cells.cells.size());
    for (std::size_t k = 0; k < dcell.size(); ++k)
        dcell[k] = static_cast<Scalar>(weighted_bce_logit_grad(cells.probs[k], cell_labels[k], w_p));
    dhidden += cell_logits_backward(m.cell, hidden, e, cells, std::span<const Scalar>(dcell), grads->cell);
    enc.backward(m.encoder, e, cache, dhidden, grads->encoder);
    return loss;
}

/// Tiny default configuration for gradient checking (d_model 8, two layers, two heads).
nn::EncoderConfig tiny_grad_check_config();

/// Finite-difference check of every parameter group, both heads attached, on a random example.
/// `corrupt` may tamper with the analytic gradient (negative control). Rejects dropout > 0.
nn::GradCheckReport grad_check(const nn::EncoderConfig& cfg, double tolerance, double eps = 1e-4,
                               const std::function<void(Model<double>&)>& corrupt = {});

}  // namespace tabfact
