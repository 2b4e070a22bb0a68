#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tabfact/nn/tensor.hpp"

namespace tabfact::nn {

struct GroupGradError {
    std::string name;
    double max_rel_error = 0.0;
    double max_abs_error = 0.0;
    long checked = 0;
};

struct GradCheckReport {
    std::vector<GroupGradError> groups;
    double tolerance = 0.0;

    [[nodiscard]] double worst() const {
        double w = 0.0;
        for (const auto& g : groups) w = std::max(w, g.max_rel_error);
        return w;
    }
    [[nodiscard]] bool passed() const { return worst() < tolerance; }
};

/// Relative error of one coordinate. Coordinates whose true and analytic values are both below
/// `floor` in magnitude are compared on the `floor` scale, where central differences at
/// eps = 1e-4 carry no relative precision.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
    const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
    return std::abs(analytic - numeric) / scale;
}

/// Central-difference check of `analytic` against `loss(params)` for every coordinate of every
/// tensor. `params` is perturbed in place and restored.
template <typename Params, typename LossFn>
GradCheckReport finite_difference_check(Params& params, const Params& analytic, LossFn&& loss, double eps,
                                        double tolerance) {
    GradCheckReport report;
    report.tolerance = tolerance;
    std::vector<const void*> grad_ptrs;
    const_cast<Params&>(analytic).visit([&](const std::string&, const auto& m) { grad_ptrs.push_back(&m); });
    std::size_t idx = 0;
    params.visit([&](const std::string& name, auto& m) {
        using M = std::decay_t<decltype(m)>;
        const M& g = *static_cast<const M*>(grad_ptrs.at(idx++));
        GroupGradError err{name};
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            const auto saved = m.data()[i];
            m.data()[i] = saved + static_cast<typename M::Scalar>(eps);
            const double up = loss();
            m.data()[i] = saved - static_cast<typename M::Scalar>(eps);
            const double down = loss();
            m.data()[i] = saved;
            const double numeric = (up - down) / (2.0 * eps);
            const double a = static_cast<double>(g.data()[i]);
            err.max_abs_error = std::max(err.max_abs_error, std::abs(a - numeric));
            err.max_rel_error = std::max(err.max_rel_error, relative_error(a, numeric));
            ++err.checked;
        }
        report.groups.push_back(std::move(err));
    });
    return report;
}

}  // namespace tabfact::nn
