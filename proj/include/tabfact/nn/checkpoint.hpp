#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tabfact/nn/tensor.hpp"

namespace tabfact::nn {

struct NamedTensor {
    std::string name;
    long rows = 0;
    long cols = 0;
    std::vector<double> values;
};

/// Versioned binary container: magic, format version, a JSON metadata block, parameter tensors
/// in declared order, optional optimizer moments and the optimizer step counter.
struct CheckpointData {
    std::string meta_json;
    std::vector<NamedTensor> params;
    std::vector<NamedTensor> adam_m;
    std::vector<NamedTensor> adam_v;
    long adam_step = 0;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(const std::filesystem::path& path, const CheckpointData& data);
CheckpointData read_checkpoint(const std::filesystem::path& path);

template <typename Scalar>
NamedTensor to_named(const std::string& name, const Matrix<Scalar>& m) {
    NamedTensor t{name, static_cast<long>(m.rows()), static_cast<long>(m.cols()), {}};
    t.values.resize(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.size(); ++i) t.values[static_cast<std::size_t>(i)] = static_cast<double>(m.data()[i]);
    return t;
}

template <typename Params>
std::vector<NamedTensor> export_tensors(const Params& params) {
    std::vector<NamedTensor> out;
    const_cast<Params&>(params).visit([&](const std::string& name, const auto& m) { out.push_back(to_named(name, m)); });
    return out;
}

/// Copies tensors into `params`, requiring identical names, order and shapes. Tensors whose
/// name is rejected by `accept` are skipped on both sides.
template <typename Params, typename Accept>
void import_tensors(Params& params, const std::vector<NamedTensor>& tensors, Accept accept) {
    std::size_t i = 0;
    auto next_accepted = [&]() -> const NamedTensor* {
        while (i < tensors.size() && !accept(tensors[i].name)) ++i;
        return i < tensors.size() ? &tensors[i++] : nullptr;
    };
    params.visit([&](const std::string& name, auto& m) {
        if (!accept(name)) return;
        const NamedTensor* t = next_accepted();
        if (t == nullptr) throw ContractError("checkpoint: missing tensor " + name);
        if (t->name != name) throw ContractError("checkpoint: expected tensor " + name + ", found " + t->name);
        if (t->rows != m.rows() || t->cols != m.cols()) {
            throw ContractError("checkpoint: tensor " + name + " has shape " + std::to_string(t->rows) + "x" +
                                std::to_string(t->cols) + ", model expects " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()));
        }
        using Scalar = typename std::decay_t<decltype(m)>::Scalar;
        for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = static_cast<Scalar>(t->values[static_cast<std::size_t>(k)]);
    });
    if (next_accepted() != nullptr) throw ContractError("checkpoint: more tensors than the model declares");
}

template <typename Params>
void import_tensors(Params& params, const std::vector<NamedTensor>& tensors) {
    import_tensors(params, tensors, [](const std::string&) { return true; });
}

}  // namespace tabfact::nn
