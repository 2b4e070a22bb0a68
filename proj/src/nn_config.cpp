#include "tabfact/nn/config.hpp"

#include <json.hpp>

#include "tabfact/table.hpp"

namespace tabfact::nn {

void EncoderConfig::validate() const {
    auto positive = [](int v, const char* name) {
        if (v <= 0) throw ContractError(std::string("encoder config: ") + name + " must be positive");
    };
    positive(d_model, "d_model");
    positive(n_heads, "n_heads");
    positive(ffn_dim, "ffn_dim");
    positive(vocab_size, "vocab_size");
    positive(max_position, "max_position");
    positive(max_columns, "max_columns");
    positive(max_rows, "max_rows");
    if (n_layers < 0) throw ContractError("encoder config: n_layers must be non-negative");
    if (d_model % n_heads != 0) throw ContractError("encoder config: d_model must be divisible by n_heads");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) throw ContractError("encoder config: dropout_rate must be in [0, 1)");
    if (!(init_std > 0.0)) throw ContractError("encoder config: init_std must be positive");
}

bool EncoderConfig::same_architecture(const EncoderConfig& o) const {
    return d_model == o.d_model && n_layers == o.n_layers && n_heads == o.n_heads && ffn_dim == o.ffn_dim &&
           vocab_size == o.vocab_size && max_position == o.max_position && max_columns == o.max_columns &&
           max_rows == o.max_rows;
}

std::string EncoderConfig::to_json() const {
    nlohmann::json j = {{"d_model", d_model},           {"n_layers", n_layers},       {"n_heads", n_heads},
                        {"ffn_dim", ffn_dim},           {"vocab_size", vocab_size},   {"max_position", max_position},
                        {"max_columns", max_columns},   {"max_rows", max_rows},       {"dropout_rate", dropout_rate},
                        {"init_std", init_std},         {"seed", seed}};
    return j.dump();
}

EncoderConfig EncoderConfig::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    EncoderConfig c;
    c.d_model = j.at("d_model");
    c.n_layers = j.at("n_layers");
    c.n_heads = j.at("n_heads");
    c.ffn_dim = j.at("ffn_dim");
    c.vocab_size = j.at("vocab_size");
    c.max_position = j.at("max_position");
    c.max_columns = j.at("max_columns");
    c.max_rows = j.at("max_rows");
    c.dropout_rate = j.at("dropout_rate");
    c.init_std = j.value("init_std", 0.02);
    c.seed = j.at("seed");
    return c;
}

}  // namespace tabfact::nn
