#include "tabfact/heads.hpp"

#include <algorithm>

#include "tabfact/preprocess.hpp"

namespace tabfact {

LossValue weighted_ce_loss(std::span<const VerdictProbs> probs, std::span<const Verdict> gold,
                           const ClassWeights& weights) {
    if (probs.size() != gold.size()) throw ContractError("weighted_ce_loss: batch size mismatch");
    LossValue out;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const auto g = static_cast<std::size_t>(gold[i]);
        double p = probs[i][g];
        if (p < kLogClamp) {
            p = kLogClamp;
            ++out.clamped;
        }
        out.value -= weights[g] * std::log(p);
    }
    return out;
}

std::vector<CellLabel> aligned_cell_labels(const CellLabelGrid& grid, std::span<const int> cells, int header_rows) {
    const auto& g = grid.labels;
    for (int r = 0; r < std::min(header_rows, g.rows()); ++r) {
        for (int c = 0; c < g.cols(); ++c) {
            if (g(r, c) != CellLabel::Excluded) {
                throw ContractError("statement '" + grid.statement_id + "': header cell (" + std::to_string(r) + "," +
                                    std::to_string(c) + ") must be Excluded");
            }
        }
    }
    std::vector<CellLabel> out;
    out.reserve(cells.size());
    for (int flat : cells) {
        const int r = flat / g.cols();
        const int c = flat % g.cols();
        const CellLabel l = g(r, c);
        if (l == CellLabel::Excluded) {
            throw ContractError("statement '" + grid.statement_id + "': body cell (" + std::to_string(r) + "," +
                                std::to_string(c) + ") is Excluded");
        }
        out.push_back(l);
    }
    return out;
}

LossValue weighted_bce_loss(std::span<const double> probs, std::span<const CellLabel> labels, double w_p) {
    if (probs.size() != labels.size()) throw ContractError("weighted_bce_loss: probability/label count mismatch");
    LossValue out;
    auto safe_log = [&](double v) {
        if (v < kLogClamp) {
            ++out.clamped;
            v = kLogClamp;
        }
        return std::log(v);
    };
    for (std::size_t i = 0; i < probs.size(); ++i) {
        switch (labels[i]) {
            case CellLabel::Relevant: out.value -= w_p * safe_log(probs[i]); break;
            case CellLabel::Irrelevant: out.value -= safe_log(1.0 - probs[i]); break;
            case CellLabel::Excluded:
                throw ContractError("weighted_bce_loss: Excluded cells carry no loss terms and must not be scored");
        }
    }
    return out;
}

nn::EncoderConfig tiny_grad_check_config() {
    nn::EncoderConfig cfg;
    cfg.d_model = 8;
    cfg.n_layers = 2;
    cfg.n_heads = 2;
    cfg.ffn_dim = 16;
    cfg.max_position = 8;
    cfg.max_columns = 4;
    cfg.max_rows = 4;
    cfg.init_std = 0.5;
    cfg.seed = 7;
    return cfg;
}

nn::GradCheckReport grad_check(const nn::EncoderConfig& cfg_in, double tolerance, double eps,
                               const std::function<void(Model<double>&)>& corrupt) {
    if (cfg_in.dropout_rate > 0.0) throw ContractError("grad_check: dropout must be 0 for a deterministic forward pass");
    if (cfg_in.d_model > 16) throw ContractError("grad_check: use a tiny model (d_model <= 16)");

    // Small table with a multi-token cell and an empty body cell.
    const std::vector<std::string> corpus = {"alpha beta gamma delta 1 2 3 4 5 6 7 8 9"};
    const Vocab vocab = build_vocab(corpus, 64);
    nn::EncoderConfig cfg = cfg_in;
    cfg.vocab_size = vocab.size();
    RawTable raw;
    raw.table_id = "gradcheck";
    raw.n_rows = 3;
    raw.n_cols = 3;
    const std::vector<std::string> texts = {"", "alpha", "beta", "gamma", "12", "3", "delta", "", "45"};
    for (int i = 0; i < 9; ++i) raw.cells.push_back({i / 3, i % 3, {texts[static_cast<std::size_t>(i)], 1, 1}});
    SingleCellTable t = single_header(expand_spans(raw));
    EncodedExample e = nn::clip_features(encode_example("beta is 3", t, vocab, 64), cfg);

    Model<double> model = init_model<double>(cfg);
    std::mt19937_64 rng(cfg.seed + 1);
    std::normal_distribution<double> noise(0.0, 0.2);
    model.visit([&](const std::string& name, Matrix<double>& m) {
        if (name.find("gain") != std::string::npos || name.find(".b") != std::string::npos ||
            name.find("bias") != std::string::npos) {
            for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] += noise(rng);
        }
    });
    const nn::Encoder<double> enc(cfg);
    const ClassWeights weights = {1.6, 2.7, 1.0};
    const std::vector<CellLabel> labels = {CellLabel::Relevant, CellLabel::Irrelevant, CellLabel::Relevant,
                                           CellLabel::Irrelevant, CellLabel::Irrelevant, CellLabel::Relevant};
    const double w_p = 10.0;

    Model<double> grads = nn::zeros_like(model);
    joint_loss_and_grad(enc, model, e, Verdict::Refuted, weights, labels, w_p, &grads);
    if (corrupt) corrupt(grads);
    return nn::finite_difference_check(
        model, grads, [&] { return joint_loss_and_grad<double>(enc, model, e, Verdict::Refuted, weights, labels, w_p, nullptr); },
        eps, tolerance);
}

}  // namespace tabfact
