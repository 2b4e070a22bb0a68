#pragma once

#include <cstdint>
#include <string>

namespace tabfact::nn {

/// Sizes of the compact encoder. Index tables hold one extra row so that 1-based column/row ids
/// up to `max_columns`/`max_rows` are addressable.
struct EncoderConfig {
    int d_model = 64;
    int n_layers = 2;
    int n_heads = 4;
    int ffn_dim = 256;
    int vocab_size = 0;
    int max_position = 64;
    int max_columns = 64;
    int max_rows = 128;
    double dropout_rate = 0.0;
    double init_std = 0.02;
    std::uint64_t seed = 1;

    /// Throws ContractError naming the first bad field.
    void validate() const;

    /// Architecture equality; the seed is ignored.
    [[nodiscard]] bool same_architecture(const EncoderConfig& o) const;

    [[nodiscard]] std::string to_json() const;
    static EncoderConfig from_json(const std::string& text);
};

}  // namespace tabfact::nn
