#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "tabfact/nn/tensor.hpp"

namespace tabfact::nn {

/// Adam moments with decoupled weight decay:
///   p <- p - lr * wd * p
///   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
///   p <- p - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
template <typename Scalar>
class AdamW {
public:
    struct Hyper {
        double beta1 = 0.9;
        double beta2 = 0.999;
        double eps = 1e-8;
    };

    AdamW() = default;
    explicit AdamW(Hyper h) : hyper_(h) {}

    [[nodiscard]] long step_count() const noexcept { return t_; }
    [[nodiscard]] const std::vector<Matrix<Scalar>>& first_moments() const noexcept { return m_; }
    [[nodiscard]] const std::vector<Matrix<Scalar>>& second_moments() const noexcept { return v_; }

    void restore(std::vector<Matrix<Scalar>> m, std::vector<Matrix<Scalar>> v, long t) {
        m_ = std::move(m);
        v_ = std::move(v);
        t_ = t;
    }

    void reset() {
        m_.clear();
        v_.clear();
        t_ = 0;
    }

    /// Updates every tensor of `params` accepted by `trainable` (all when empty). Moment state
    /// exists for all tensors so that frozen phases can be followed by full training.
    template <typename Params>
    void step(Params& params, Params& grads, double lr, double weight_decay,
              const std::function<bool(const std::string&)>& trainable = {}) {
        std::vector<Matrix<Scalar>*> p_list;
        std::vector<Matrix<Scalar>*> g_list;
        std::vector<std::string> names;
        params.visit([&](const std::string& name, Matrix<Scalar>& m) {
            p_list.push_back(&m);
            names.push_back(name);
        });
        grads.visit([&](const std::string&, Matrix<Scalar>& m) { g_list.push_back(&m); });
        if (p_list.size() != g_list.size()) throw ContractError("optimizer: parameter/gradient structure mismatch");
        for (std::size_t i = 0; i < p_list.size(); ++i) {
            if (p_list[i]->rows() != g_list[i]->rows() || p_list[i]->cols() != g_list[i]->cols())
                throw ContractError("optimizer: shape mismatch for " + names[i]);
            if (!g_list[i]->allFinite()) throw ContractError("optimizer: non-finite gradient in " + names[i]);
        }
        if (m_.empty()) {
            for (auto* p : p_list) {
                m_.push_back(Matrix<Scalar>::Zero(p->rows(), p->cols()));
                v_.push_back(Matrix<Scalar>::Zero(p->rows(), p->cols()));
            }
        }
        if (m_.size() != p_list.size()) throw ContractError("optimizer: state does not match parameters");
        ++t_;
        const double bc1 = 1.0 - std::pow(hyper_.beta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(hyper_.beta2, static_cast<double>(t_));
        const auto b1 = static_cast<Scalar>(hyper_.beta1);
        const auto b2 = static_cast<Scalar>(hyper_.beta2);
        const auto eps = static_cast<Scalar>(hyper_.eps);
        const auto step_size = static_cast<Scalar>(lr / bc1);
        const auto inv_bc2 = static_cast<Scalar>(1.0 / bc2);
        const auto decay = static_cast<Scalar>(1.0 - lr * weight_decay);
        for (std::size_t i = 0; i < p_list.size(); ++i) {
            if (trainable && !trainable(names[i])) continue;
            auto& p = *p_list[i];
            const auto& g = *g_list[i];
            auto& m = m_[i];
            auto& v = v_[i];
            p *= decay;
            m = b1 * m + (1 - b1) * g;
            v.array() = b2 * v.array() + (1 - b2) * g.array().square();
            p.array() -= step_size * m.array() / ((v.array() * inv_bc2).sqrt() + eps);
        }
    }

private:
    Hyper hyper_{};
    std::vector<Matrix<Scalar>> m_;
    std::vector<Matrix<Scalar>> v_;
    long t_ = 0;
};

}  // namespace tabfact::nn
