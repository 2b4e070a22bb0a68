#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tabfact/encoding.hpp"
#include "tabfact/nn/config.hpp"
#include "tabfact/nn/tensor.hpp"

namespace tabfact::nn {

inline constexpr double kLayerNormEps = 1e-5;

template <typename Scalar>
struct LayerParams {
    Matrix<Scalar> wq, bq, wk, bk, wv, bv, wo, bo;
    Matrix<Scalar> ln1_gain, ln1_bias;
    Matrix<Scalar> w1, b1, w2, b2;
    Matrix<Scalar> ln2_gain, ln2_bias;

    template <typename F>
    void visit(const std::string& prefix, F&& f) {
        f(prefix + "wq", wq);
        f(prefix + "bq", bq);
        f(prefix + "wk", wk);
        f(prefix + "bk", bk);
        f(prefix + "wv", wv);
        f(prefix + "bv", bv);
        f(prefix + "wo", wo);
        f(prefix + "bo", bo);
        f(prefix + "ln1_gain", ln1_gain);
        f(prefix + "ln1_bias", ln1_bias);
        f(prefix + "w1", w1);
        f(prefix + "b1", b1);
        f(prefix + "w2", w2);
        f(prefix + "b2", b2);
        f(prefix + "ln2_gain", ln2_gain);
        f(prefix + "ln2_bias", ln2_bias);
    }
};

/// Embedding tables, pre-norm transformer blocks and the final layer norm.
template <typename Scalar>
struct EncoderParams {
    Matrix<Scalar> token_emb, segment_emb, column_emb, row_emb, position_emb;
    std::vector<LayerParams<Scalar>> layers;
    Matrix<Scalar> final_gain, final_bias;

    template <typename F>
    void visit(F&& f) {
        f("encoder.token_emb", token_emb);
        f("encoder.segment_emb", segment_emb);
        f("encoder.column_emb", column_emb);
        f("encoder.row_emb", row_emb);
        f("encoder.position_emb", position_emb);
        for (std::size_t l = 0; l < layers.size(); ++l)
            layers[l].visit("encoder.layer" + std::to_string(l) + ".", f);
        f("encoder.final_gain", final_gain);
        f("encoder.final_bias", final_bias);
    }
};

/// Normal(0, init_std) weights and embeddings, zero biases, unit layer-norm gains.
template <typename Scalar>
EncoderParams<Scalar> init_encoder(const EncoderConfig& cfg, std::mt19937_64& rng) {
    cfg.validate();
    const int d = cfg.d_model;
    auto weight = [&](int r, int c) {
        Matrix<Scalar> m(r, c);
        fill_normal(m, rng, cfg.init_std);
        return m;
    };
    auto zeros = [](int r, int c) { return Matrix<Scalar>::Zero(r, c).eval(); };
    auto ones = [](int c) { return Matrix<Scalar>::Ones(1, c).eval(); };
    EncoderParams<Scalar> p;
    p.token_emb = weight(cfg.vocab_size, d);
    p.segment_emb = weight(2, d);
    p.column_emb = weight(cfg.max_columns + 1, d);
    p.row_emb = weight(cfg.max_rows + 1, d);
    p.position_emb = weight(cfg.max_position, d);
    for (int l = 0; l < cfg.n_layers; ++l) {
        LayerParams<Scalar> lp;
        lp.wq = weight(d, d);
        lp.bq = zeros(1, d);
        lp.wk = weight(d, d);
        lp.bk = zeros(1, d);
        lp.wv = weight(d, d);
        lp.bv = zeros(1, d);
        lp.wo = weight(d, d);
        lp.bo = zeros(1, d);
        lp.ln1_gain = ones(d);
        lp.ln1_bias = zeros(1, d);
        lp.w1 = weight(d, cfg.ffn_dim);
        lp.b1 = zeros(1, cfg.ffn_dim);
        lp.w2 = weight(cfg.ffn_dim, d);
        lp.b2 = zeros(1, d);
        lp.ln2_gain = ones(d);
        lp.ln2_bias = zeros(1, d);
        p.layers.push_back(std::move(lp));
    }
    p.final_gain = ones(d);
    p.final_bias = zeros(1, d);
    return p;
}

/// Same structure as `like`, every entry zero.
template <typename Params>
Params zeros_like(const Params& like) {
    Params out = like;
    out.visit([](const std::string&, auto& m) { m.setZero(); });
    return out;
}

template <typename Scalar>
struct LayerNormCache {
    Matrix<Scalar> normed;  // (x - mean) * rstd
    Vector<Scalar> rstd;
};

template <typename Scalar>
Matrix<Scalar> layer_norm(const Matrix<Scalar>& x, const Matrix<Scalar>& gain, const Matrix<Scalar>& bias,
                          LayerNormCache<Scalar>& cache) {
    const auto n = static_cast<Scalar>(x.cols());
    cache.normed.resize(x.rows(), x.cols());
    cache.rstd.resize(x.rows());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const Scalar mean = x.row(r).sum() / n;
        const auto centered = (x.row(r).array() - mean).eval();
        const Scalar var = centered.square().sum() / n;
        const Scalar rstd = 1 / std::sqrt(var + static_cast<Scalar>(kLayerNormEps));
        cache.rstd(r) = rstd;
        cache.normed.row(r) = centered * rstd;
    }
    Matrix<Scalar> y = (cache.normed.array().rowwise() * gain.row(0).array()).matrix();
    y.rowwise() += bias.row(0);
    return y;
}

/// Accumulates gain/bias gradients and returns dL/dx.
template <typename Scalar>
Matrix<Scalar> layer_norm_backward(const Matrix<Scalar>& dy, const Matrix<Scalar>& gain,
                                   const LayerNormCache<Scalar>& cache, Matrix<Scalar>& dgain, Matrix<Scalar>& dbias) {
    dgain.row(0) += (dy.array() * cache.normed.array()).colwise().sum().matrix();
    dbias.row(0) += dy.colwise().sum();
    const Matrix<Scalar> dnormed = (dy.array().rowwise() * gain.row(0).array()).matrix();
    Matrix<Scalar> dx(dy.rows(), dy.cols());
    const auto n = static_cast<Scalar>(dy.cols());
    for (Eigen::Index r = 0; r < dy.rows(); ++r) {
        const Scalar mean_d = dnormed.row(r).sum() / n;
        const Scalar mean_dn = dnormed.row(r).dot(cache.normed.row(r)) / n;
        dx.row(r) = cache.rstd(r) *
                    (dnormed.row(r).array() - mean_d - cache.normed.row(r).array() * mean_dn).matrix();
    }
    return dx;
}

template <typename Scalar>
struct LayerCache {
    Matrix<Scalar> input;
    LayerNormCache<Scalar> ln1;
    Matrix<Scalar> a, q, k, v;
    std::vector<Matrix<Scalar>> probs;  // per head, L x L
    Matrix<Scalar> context;
    Matrix<Scalar> attn_drop_mask;
    Matrix<Scalar> mid;
    LayerNormCache<Scalar> ln2;
    Matrix<Scalar> b, h1, g;
    Matrix<Scalar> ffn_drop_mask;
};

template <typename Scalar>
struct ForwardCache {
    Matrix<Scalar> embedded;
    Matrix<Scalar> emb_drop_mask;
    std::vector<LayerCache<Scalar>> layers;
    Matrix<Scalar> pre_final;
    LayerNormCache<Scalar> final_ln;
    Eigen::Index valid = 0;
};

/// Feature-range check; throws ContractError naming the offending feature and position.
inline void check_feature_ranges(const EncoderConfig& cfg, const EncodedExample& e) {
    const auto n = e.token_ids.size();
    auto bad = [&](const char* feature, std::size_t i, int v, int limit) {
        throw ContractError(std::string("encoder input: ") + feature + " index " + std::to_string(v) +
                            " at position " + std::to_string(i) + " outside [0, " + std::to_string(limit) + ")");
    };
    if (e.segment_ids.size() != n || e.column_ids.size() != n || e.row_ids.size() != n || e.pos_in_cell.size() != n)
        throw ContractError("encoder input: feature lists have different lengths");
    if (e.attention_len < 1 || e.attention_len > static_cast<int>(n))
        throw ContractError("encoder input: attention_len out of range");
    for (std::size_t i = 0; i < n; ++i) {
        if (e.token_ids[i] < 0 || e.token_ids[i] >= cfg.vocab_size) bad("token", i, e.token_ids[i], cfg.vocab_size);
        if (e.segment_ids[i] < 0 || e.segment_ids[i] >= 2) bad("segment", i, e.segment_ids[i], 2);
        if (e.column_ids[i] < 0 || e.column_ids[i] > cfg.max_columns) bad("column", i, e.column_ids[i], cfg.max_columns + 1);
        if (e.row_ids[i] < 0 || e.row_ids[i] > cfg.max_rows) bad("row", i, e.row_ids[i], cfg.max_rows + 1);
        if (e.pos_in_cell[i] < 0 || e.pos_in_cell[i] >= cfg.max_position)
            bad("pos_in_cell", i, e.pos_in_cell[i], cfg.max_position);
    }
}

/// Saturates structural indices into the embedding ranges of `cfg` (long cells, wide or tall
/// tables). Token ids are left alone.
inline EncodedExample clip_features(EncodedExample e, const EncoderConfig& cfg) {
    for (auto& v : e.column_ids) v = std::min(v, cfg.max_columns);
    for (auto& v : e.row_ids) v = std::min(v, cfg.max_rows);
    for (auto& v : e.pos_in_cell) v = std::min(v, cfg.max_position - 1);
    return e;
}

/// Inverted dropout masks are drawn only when `dropout_rng` is given and the rate is positive.
template <typename Scalar>
class Encoder {
public:
    explicit Encoder(EncoderConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

    [[nodiscard]] const EncoderConfig& config() const noexcept { return cfg_; }

    /// Hidden states, one row per token (L x d_model).
    Matrix<Scalar> forward(const EncoderParams<Scalar>& p, const EncodedExample& e, ForwardCache<Scalar>& cache,
                           std::mt19937_64* dropout_rng = nullptr) const {
        check_feature_ranges(cfg_, e);
        const auto len = static_cast<Eigen::Index>(e.token_ids.size());
        const int d = cfg_.d_model;
        cache.valid = e.attention_len;
        Matrix<Scalar> x(len, d);
        for (Eigen::Index i = 0; i < len; ++i) {
            const auto u = static_cast<std::size_t>(i);
            x.row(i) = p.token_emb.row(e.token_ids[u]) + p.segment_emb.row(e.segment_ids[u]) +
                       p.column_emb.row(e.column_ids[u]) + p.row_emb.row(e.row_ids[u]) +
                       p.position_emb.row(e.pos_in_cell[u]);
        }
        cache.embedded = x;
        apply_dropout(x, cache.emb_drop_mask, dropout_rng);
        cache.layers.resize(p.layers.size());
        for (std::size_t l = 0; l < p.layers.size(); ++l) x = layer_forward(p.layers[l], x, cache.layers[l], dropout_rng, cache.valid);
        cache.pre_final = x;
        return layer_norm(x, p.final_gain, p.final_bias, cache.final_ln);
    }

    /// Accumulates parameter gradients for upstream gradient `dhidden`.
    void backward(const EncoderParams<Scalar>& p, const EncodedExample& e, const ForwardCache<Scalar>& cache,
                  const Matrix<Scalar>& dhidden, EncoderParams<Scalar>& grads) const {
        Matrix<Scalar> dx = layer_norm_backward(dhidden, p.final_gain, cache.final_ln, grads.final_gain, grads.final_bias);
        for (std::size_t l = p.layers.size(); l-- > 0;)
            dx = layer_backward(p.layers[l], cache.layers[l], dx, grads.layers[l]);
        if (cache.emb_drop_mask.size() > 0) dx.array() *= cache.emb_drop_mask.array();
        for (Eigen::Index i = 0; i < dx.rows(); ++i) {
            const auto u = static_cast<std::size_t>(i);
            grads.token_emb.row(e.token_ids[u]) += dx.row(i);
            grads.segment_emb.row(e.segment_ids[u]) += dx.row(i);
            grads.column_emb.row(e.column_ids[u]) += dx.row(i);
            grads.row_emb.row(e.row_ids[u]) += dx.row(i);
            grads.position_emb.row(e.pos_in_cell[u]) += dx.row(i);
        }
    }

private:
    void apply_dropout(Matrix<Scalar>& x, Matrix<Scalar>& mask, std::mt19937_64* rng) const {
        if (rng == nullptr || cfg_.dropout_rate <= 0.0) {
            mask.resize(0, 0);
            return;
        }
        std::bernoulli_distribution keep(1.0 - cfg_.dropout_rate);
        const auto scale = static_cast<Scalar>(1.0 / (1.0 - cfg_.dropout_rate));
        mask.resize(x.rows(), x.cols());
        for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = keep(*rng) ? scale : Scalar(0);
        x.array() *= mask.array();
    }

    Matrix<Scalar> layer_forward(const LayerParams<Scalar>& p, const Matrix<Scalar>& x, LayerCache<Scalar>& c,
                                 std::mt19937_64* rng, Eigen::Index valid) const {
        const Eigen::Index len = x.rows();
        const int heads = cfg_.n_heads;
        const int dh = cfg_.d_model / heads;
        const Scalar scale = 1 / std::sqrt(static_cast<Scalar>(dh));
        c.input = x;
        c.a = layer_norm(x, p.ln1_gain, p.ln1_bias, c.ln1);
        c.q = c.a * p.wq;
        c.q.rowwise() += p.bq.row(0);
        c.k = c.a * p.wk;
        c.k.rowwise() += p.bk.row(0);
        c.v = c.a * p.wv;
        c.v.rowwise() += p.bv.row(0);
        c.probs.resize(static_cast<std::size_t>(heads));
        c.context.resize(len, cfg_.d_model);
        for (int h = 0; h < heads; ++h) {
            auto& probs = c.probs[static_cast<std::size_t>(h)];
            probs = (c.q.middleCols(h * dh, dh) * c.k.middleCols(h * dh, dh).transpose()) * scale;
            softmax_rows(probs, valid);
            c.context.middleCols(h * dh, dh) = probs * c.v.middleCols(h * dh, dh);
        }
        Matrix<Scalar> attn = c.context * p.wo;
        attn.rowwise() += p.bo.row(0);
        apply_dropout(attn, c.attn_drop_mask, rng);
        c.mid = x + attn;
        c.b = layer_norm(c.mid, p.ln2_gain, p.ln2_bias, c.ln2);
        c.h1 = c.b * p.w1;
        c.h1.rowwise() += p.b1.row(0);
        c.g = c.h1.unaryExpr([](Scalar v) { return gelu(v); });
        Matrix<Scalar> ffn = c.g * p.w2;
        ffn.rowwise() += p.b2.row(0);
        apply_dropout(ffn, c.ffn_drop_mask, rng);
        return c.mid + ffn;
    }

    Matrix<Scalar> layer_backward(const LayerParams<Scalar>& p, const LayerCache<Scalar>& c, const Matrix<Scalar>& dout,
                                  LayerParams<Scalar>& g) const {
        const int heads = cfg_.n_heads;
        const int dh = cfg_.d_model / heads;
        const Scalar scale = 1 / std::sqrt(static_cast<Scalar>(dh));

        // FFN sublayer: out = mid + drop(gelu(b w1 + b1) w2 + b2)
        Matrix<Scalar> dffn = dout;
        if (c.ffn_drop_mask.size() > 0) dffn.array() *= c.ffn_drop_mask.array();
        g.w2 += c.g.transpose() * dffn;
        g.b2.row(0) += dffn.colwise().sum();
        Matrix<Scalar> dh1 = dffn * p.w2.transpose();
        dh1.array() *= c.h1.unaryExpr([](Scalar v) { return gelu_grad(v); }).array();
        g.w1 += c.b.transpose() * dh1;
        g.b1.row(0) += dh1.colwise().sum();
        const Matrix<Scalar> db = dh1 * p.w1.transpose();
        Matrix<Scalar> dmid = dout + layer_norm_backward(db, p.ln2_gain, c.ln2, g.ln2_gain, g.ln2_bias);

        // Attention sublayer: mid = x + drop(context wo + bo)
        Matrix<Scalar> dattn = dmid;
        if (c.attn_drop_mask.size() > 0) dattn.array() *= c.attn_drop_mask.array();
        g.wo += c.context.transpose() * dattn;
        g.bo.row(0) += dattn.colwise().sum();
        const Matrix<Scalar> dcontext = dattn * p.wo.transpose();
        Matrix<Scalar> dq(c.q.rows(), c.q.cols()), dk(c.k.rows(), c.k.cols()), dv(c.v.rows(), c.v.cols());
        for (int h = 0; h < heads; ++h) {
            const auto& probs = c.probs[static_cast<std::size_t>(h)];
            const auto dctx = dcontext.middleCols(h * dh, dh);
            dv.middleCols(h * dh, dh) = probs.transpose() * dctx;
            const Matrix<Scalar> dprobs = dctx * c.v.middleCols(h * dh, dh).transpose();
            const Vector<Scalar> row_dot = (dprobs.array() * probs.array()).rowwise().sum();
            Matrix<Scalar> dscores = (probs.array() * (dprobs.colwise() - row_dot).array()).matrix();
            dscores *= scale;
            dq.middleCols(h * dh, dh) = dscores * c.k.middleCols(h * dh, dh);
            dk.middleCols(h * dh, dh) = dscores.transpose() * c.q.middleCols(h * dh, dh);
        }
        g.wq += c.a.transpose() * dq;
        g.bq.row(0) += dq.colwise().sum();
        g.wk += c.a.transpose() * dk;
        g.bk.row(0) += dk.colwise().sum();
        g.wv += c.a.transpose() * dv;
        g.bv.row(0) += dv.colwise().sum();
        const Matrix<Scalar> da = dq * p.wq.transpose() + dk * p.wk.transpose() + dv * p.wv.transpose();
        return dmid + layer_norm_backward(da, p.ln1_gain, c.ln1, g.ln1_gain, g.ln1_bias);
    }

    EncoderConfig cfg_;
};

}  // namespace tabfact::nn
