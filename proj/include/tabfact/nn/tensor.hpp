#pragma once

#include <cmath>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "tabfact/table.hpp"

namespace tabfact::nn {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    return m.allFinite();
}

template <typename Scalar>
void fill_normal(Matrix<Scalar>& m, std::mt19937_64& rng, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<Scalar>(dist(rng));
}

/// Row-wise numerically stable softmax over the first `valid` columns; the rest get zero.
template <typename Scalar>
void softmax_rows(Matrix<Scalar>& m, Eigen::Index valid) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        const Scalar mx = row.head(valid).maxCoeff();
        row.head(valid) = (row.head(valid).array() - mx).exp();
        row.head(valid) /= row.head(valid).sum();
        row.tail(m.cols() - valid).setZero();
    }
}

// GELU, tanh approximation:
//   gelu(x) = 0.5 x (1 + tanh(sqrt(2/pi) (x + 0.044715 x^3)))
template <typename Scalar>
Scalar gelu(Scalar x) {
    constexpr Scalar k = static_cast<Scalar>(0.7978845608028654);  // sqrt(2/pi)
    const Scalar u = k * (x + static_cast<Scalar>(0.044715) * x * x * x);
    return static_cast<Scalar>(0.5) * x * (1 + std::tanh(u));
}

template <typename Scalar>
Scalar gelu_grad(Scalar x) {
    constexpr Scalar k = static_cast<Scalar>(0.7978845608028654);
    const Scalar u = k * (x + static_cast<Scalar>(0.044715) * x * x * x);
    const Scalar t = std::tanh(u);
    const Scalar du = k * (1 + 3 * static_cast<Scalar>(0.044715) * x * x);
    return static_cast<Scalar>(0.5) * (1 + t) + static_cast<Scalar>(0.5) * x * (1 - t * t) * du;
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
    if (x >= 0) return 1 / (1 + std::exp(-x));
    const Scalar e = std::exp(x);
    return e / (1 + e);
}

}  // namespace tabfact::nn
