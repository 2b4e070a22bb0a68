#include "tabfact/train.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include <json.hpp>

#include "tabfact/metrics.hpp"
#include "tabfact/nn/adamw.hpp"
#include "tabfact/nn/checkpoint.hpp"
#include "tabfact/postprocess.hpp"
#include "tabfact/preprocess.hpp"

namespace tabfact {

namespace {

using Json = nlohmann::json;

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) throw Error("bad value '" + value + "' for " + key);
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw Error("bad value '" + value + "' for " + key + " (expected true or false)");
}

class TableCache {
public:
    explicit TableCache(const Dataset& d) : d_(d) {}
    const SingleCellTable& get(const std::string& table_id) {
        auto it = cache_.find(table_id);
        if (it == cache_.end()) {
            const auto raw = d_.tables.find(table_id);
            if (raw == d_.tables.end()) throw Error("unknown table '" + table_id + "'");
            it = cache_.emplace(table_id, prepare_table(raw->second)).first;
        }
        return it->second;
    }

private:
    const Dataset& d_;
    std::map<std::string, SingleCellTable> cache_;
};

struct Example {
    EncodedExample e;
    Verdict gold = Verdict::Unknown;
    std::vector<CellLabel> labels;
};

bool scored_for_evidence(const StatementRecord& s) {
    return (s.verdict == Verdict::Entailed || s.verdict == Verdict::Refuted) && !s.evidence_variants.empty();
}

std::string input_text(const StatementRecord& s, Variant v) {
    return v == Variant::Statement ? templated(s).text : s.text;
}

Vocab vocab_for(const Dataset& d, Variant v, int max_size) {
    std::vector<std::string> corpus;
    for (const auto& s : d.statements) corpus.push_back(input_text(s, v));
    for (const auto& [id, t] : d.tables) {
        for (const auto& c : t.cells) corpus.push_back(c.cell.text);
    }
    return build_vocab(corpus, max_size);
}

std::vector<Example> build_examples(Task task, Variant variant, const Dataset& d, const Vocab& vocab,
                                    const nn::EncoderConfig& cfg, int max_len, int& skipped) {
    TableCache tables(d);
    std::vector<Example> out;
    for (const auto& s : d.statements) {
        if (task == Task::Evidence && !scored_for_evidence(s)) continue;
        const auto& t = tables.get(s.table_id);
        Example ex;
        try {
            ex.e = nn::clip_features(encode_example(input_text(s, variant), t, vocab, max_len), cfg);
        } catch (const OversizeError&) {
            ++skipped;
            continue;
        }
        ex.gold = s.verdict;
        if (task == Task::Evidence) {
            const RawTable& raw = d.table_of(s);
            const auto grid = propagate_evidence_labels(span_labels_from_evidence(s, raw), t, s.statement_id);
            ex.labels = aligned_cell_labels(grid, body_cells(ex.e));
        }
        out.push_back(std::move(ex));
    }
    return out;
}

/// Class weights over the classes present in training; absent classes keep weight 1.
ClassWeights present_class_weights(const std::vector<Example>& examples) {
    std::array<long, kNumVerdicts> counts{};
    for (const auto& ex : examples) ++counts[static_cast<std::size_t>(ex.gold)];
    const long mx = *std::ranges::max_element(counts);
    ClassWeights w{1.0, 1.0, 1.0};
    for (std::size_t k = 0; k < counts.size(); ++k)
        if (counts[k] > 0) w[k] = static_cast<double>(mx) / static_cast<double>(counts[k]);
    return w;
}

void zero(Model<Real>& g) {
    g.visit([](const std::string&, Matrix<Real>& m) { m.setZero(); });
}

/// Adds one example's loss gradient to `grads` and returns its loss.
double accumulate(const nn::Encoder<Real>& enc, const Model<Real>& m, const Example& ex, Task task,
                  const ClassWeights& weights, double w_p, bool head_only, std::mt19937_64* dropout_rng,
                  Model<Real>& grads) {
    nn::ForwardCache<Real> cache;
    const Matrix<Real> hidden = enc.forward(m.encoder, ex.e, cache, dropout_rng);
    Matrix<Real> dhidden = Matrix<Real>::Zero(hidden.rows(), hidden.cols());
    double loss = 0.0;
    if (task == Task::Verdict) {
        const auto logits = verdict_logits(m.verdict, hidden);
        const VerdictProbs p = softmax3(logits);
        loss = weighted_ce_loss(std::span(&p, 1), std::span(&ex.gold, 1), weights).value;
        const auto dl = weighted_ce_logit_grad(p, ex.gold, weights);
        Eigen::Matrix<Real, 1, kNumVerdicts> d;
        for (int k = 0; k < kNumVerdicts; ++k) d(k) = static_cast<Real>(dl[static_cast<std::size_t>(k)]);
        grads.verdict.w += hidden.row(0).transpose() * d;
        grads.verdict.b.row(0) += d;
        dhidden.row(0) = d * m.verdict.w.transpose();
    } else {
        const CellOutput<Real> out = cell_logits(m.cell, hidden, ex.e);
        loss = weighted_bce_loss(out.probs, ex.labels, w_p).value;
        std::vector<Real> dcell(out.cells.size());
        for (std::size_t k = 0; k < dcell.size(); ++k) {
            dcell[k] = out.token_counts[k] > 0 ? static_cast<Real>(weighted_bce_logit_grad(out.probs[k], ex.labels[k], w_p)) : Real(0);
        }
        dhidden = cell_logits_backward(m.cell, hidden, ex.e, out, std::span<const Real>(dcell), grads.cell);
    }
    if (!head_only) enc.backward(m.encoder, ex.e, cache, dhidden, grads.encoder);
    return loss;
}

Json meta_json(const LoadedModel& m) {
    return {{"format", "tabfact-model"},
            {"task", to_string(m.task)},
            {"variant", to_string(m.variant)},
            {"step", m.step},
            {"encoder", Json::parse(m.encoder.to_json())},
            {"train", Json::parse(m.train.to_json())},
            {"vocab", vocab_to_text(m.vocab)}};
}

double selection_value(const std::string& metric, const VerdictEvaluation* a, const EvidenceEvaluation* b) {
    if (a != nullptr) {
        if (metric == "f1_3way") return a->f1_3way;
        if (metric == "f1_2way") return a->f1_2way;
    }
    if (b != nullptr && metric == "evidence_f1") return b->f1;
    throw Error("selection metric '" + metric + "' does not apply to this task");
}

std::vector<EvidencePrediction> predict_cells_for(const LoadedModel& m, const Dataset& d, double threshold, int max_len,
                                                  const std::function<bool(const StatementRecord&)>& take) {
    const nn::Encoder<Real> enc(m.encoder);
    TableCache tables(d);
    std::vector<EvidencePrediction> out;
    for (const auto& s : d.statements) {
        if (!take(s)) continue;
        const RawTable& raw = d.table_of(s);
        EvidencePrediction p;
        p.statement_id = s.statement_id;
        p.table_id = s.table_id;
        const auto& t = tables.get(s.table_id);
        try {
            const EncodedExample e =
                nn::clip_features(encode_example(input_text(s, m.variant), t, m.vocab, max_len), m.encoder);
            p.length = e.full_length;
            p.truncated_rows = e.truncated_rows;
            const auto cells = cell_select_forward(enc, m.model, e);
            CellLabelGrid grid{s.statement_id, Grid<CellLabel>(t.n_rows(), t.n_cols(), CellLabel::Irrelevant)};
            for (int c = 0; c < t.n_cols(); ++c) grid.labels(0, c) = CellLabel::Excluded;
            for (std::size_t k = 0; k < cells.cells.size(); ++k) {
                if (cells.probs[k] > threshold) {
                    grid.labels(cells.cells[k] / t.n_cols(), cells.cells[k] % t.n_cols()) = CellLabel::Relevant;
                }
            }
            const auto with_header = propagate_header_relevance(grid, t);
            p.labels = spans_to_raw_grid(merge_to_spans(with_header, t, raw), raw, s.statement_id);
        } catch (const OversizeError& err) {
            p.error = err.what();
            p.labels = CellLabelGrid{s.statement_id, Grid<CellLabel>(raw.n_rows, raw.n_cols, CellLabel::Irrelevant)};
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

std::string_view to_string(Task t) { return t == Task::Verdict ? "verdict" : "evidence"; }

Task parse_task(std::string_view s) {
    if (s == "verdict" || s == "A" || s == "a") return Task::Verdict;
    if (s == "evidence" || s == "B" || s == "b") return Task::Evidence;
    throw Error("unknown task '" + std::string(s) + "' (expected A or B)");
}

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::Base: return "base";
        case Variant::Statement: return "statement";
        case Variant::Separate: return "separate";
    }
    return "?";
}

Variant parse_variant(std::string_view s) {
    for (auto v : {Variant::Base, Variant::Statement, Variant::Separate})
        if (to_string(v) == s) return v;
    throw Error("unknown variant '" + std::string(s) + "' (expected base, statement or separate)");
}

ClassWeights compute_class_weights(const std::array<long, kNumVerdicts>& counts) {
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] <= 0) {
            throw Error("class " + std::string(to_string(static_cast<Verdict>(k))) + " has count " +
                        std::to_string(counts[k]) + "; class weights need every class in training");
        }
    }
    const long mx = *std::ranges::max_element(counts);
    ClassWeights w{};
    for (std::size_t k = 0; k < counts.size(); ++k) w[k] = static_cast<double>(mx) / static_cast<double>(counts[k]);
    return w;
}

void TrainConfig::validate() const {
    auto fail = [](const std::string& m) { throw ContractError("train config: " + m); };
    if (phase1_epochs < 0 || phase2_epochs < 0) fail("epochs must be non-negative");
    if (!(phase1_lr > 0) || !(phase2_lr > 0)) fail("learning rates must be positive");
    if (phase2_lr > phase1_lr) fail("phase2_lr must not exceed phase1_lr");
    if (batch_size < 1) fail("batch_size must be at least 1");
    if (checkpoint_every < 1) fail("checkpoint_every must be at least 1");
    if (!(w_p > 0)) fail("w_p must be positive");
    if (weight_decay < 0) fail("weight_decay must be non-negative");
    if (steps < 0) fail("steps must be non-negative");
    if (max_len < 4) fail("max_len must be at least 4");
    if (vocab_size < Vocab::kNumReserved) fail("vocab_size too small");
    if (selection_metric != "f1_3way" && selection_metric != "f1_2way" && selection_metric != "evidence_f1")
        fail("unknown selection_metric '" + selection_metric + "'");
}

std::string TrainConfig::to_json() const {
    const Json j = {{"phase1_epochs", phase1_epochs},
                    {"phase1_lr", phase1_lr},
                    {"phase2_epochs", phase2_epochs},
                    {"phase2_lr", phase2_lr},
                    {"batch_size", batch_size},
                    {"checkpoint_every", checkpoint_every},
                    {"w_p", w_p},
                    {"selection_metric", selection_metric},
                    {"seed", seed},
                    {"weight_decay", weight_decay},
                    {"threshold", threshold},
                    {"steps", steps},
                    {"max_len", max_len},
                    {"vocab_size", vocab_size},
                    {"keep_all_checkpoints", keep_all_checkpoints}};
    return j.dump();
}

TrainConfig TrainConfig::from_json(const std::string& text) {
    const auto j = Json::parse(text);
    TrainConfig c;
    c.phase1_epochs = j.at("phase1_epochs");
    c.phase1_lr = j.at("phase1_lr");
    c.phase2_epochs = j.at("phase2_epochs");
    c.phase2_lr = j.at("phase2_lr");
    c.batch_size = j.at("batch_size");
    c.checkpoint_every = j.at("checkpoint_every");
    c.w_p = j.at("w_p");
    c.selection_metric = j.at("selection_metric");
    c.seed = j.at("seed");
    c.weight_decay = j.at("weight_decay");
    c.threshold = j.at("threshold");
    c.steps = j.at("steps");
    c.max_len = j.at("max_len");
    c.vocab_size = j.at("vocab_size");
    c.keep_all_checkpoints = j.at("keep_all_checkpoints");
    return c;
}

TrainConfig default_train_config(Task task) {
    TrainConfig c;
    if (task == Task::Evidence) {
        c.checkpoint_every = 50;
        c.selection_metric = "evidence_f1";
    }
    return c;
}

void set_train_field(TrainConfig& c, const std::string& key, const std::string& v) {
    if (key == "phase1_epochs") c.phase1_epochs = parse_number<int>(key, v);
    else if (key == "phase1_lr") c.phase1_lr = parse_number<double>(key, v);
    else if (key == "phase2_epochs") c.phase2_epochs = parse_number<int>(key, v);
    else if (key == "phase2_lr") c.phase2_lr = parse_number<double>(key, v);
    else if (key == "batch_size") c.batch_size = parse_number<int>(key, v);
    else if (key == "checkpoint_every") c.checkpoint_every = parse_number<int>(key, v);
    else if (key == "w_p") c.w_p = parse_number<double>(key, v);
    else if (key == "selection_metric") c.selection_metric = v;
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, v);
    else if (key == "weight_decay") c.weight_decay = parse_number<double>(key, v);
    else if (key == "threshold") c.threshold = parse_number<double>(key, v);
    else if (key == "steps") c.steps = parse_number<int>(key, v);
    else if (key == "max_len") c.max_len = parse_number<int>(key, v);
    else if (key == "vocab_size") c.vocab_size = parse_number<int>(key, v);
    else if (key == "keep_all_checkpoints") c.keep_all_checkpoints = parse_bool(key, v);
    else throw Error("unknown train setting '" + key + "'");
}

void set_encoder_field(nn::EncoderConfig& c, const std::string& key, const std::string& v) {
    if (key == "d_model") c.d_model = parse_number<int>(key, v);
    else if (key == "n_layers") c.n_layers = parse_number<int>(key, v);
    else if (key == "n_heads") c.n_heads = parse_number<int>(key, v);
    else if (key == "ffn_dim") c.ffn_dim = parse_number<int>(key, v);
    else if (key == "max_position") c.max_position = parse_number<int>(key, v);
    else if (key == "max_columns") c.max_columns = parse_number<int>(key, v);
    else if (key == "max_rows") c.max_rows = parse_number<int>(key, v);
    else if (key == "dropout_rate") c.dropout_rate = parse_number<double>(key, v);
    else if (key == "init_std") c.init_std = parse_number<double>(key, v);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, v);
    else throw Error("unknown encoder setting '" + key + "'");
}

void save_model(const std::filesystem::path& path, const LoadedModel& m, const nn::AdamW<Real>* opt) {
    nn::CheckpointData data;
    data.meta_json = meta_json(m).dump();
    data.params = nn::export_tensors(m.model);
    if (opt != nullptr && !opt->first_moments().empty()) {
        std::vector<std::string> names;
        const_cast<Model<Real>&>(m.model).visit([&](const std::string& n, const auto&) { names.push_back(n); });
        for (std::size_t i = 0; i < names.size(); ++i) {
            data.adam_m.push_back(nn::to_named(names[i], opt->first_moments()[i]));
            data.adam_v.push_back(nn::to_named(names[i], opt->second_moments()[i]));
        }
        data.adam_step = opt->step_count();
    }
    nn::write_checkpoint(path, data);
}

LoadedModel load_model(const std::filesystem::path& path) {
    const nn::CheckpointData data = nn::read_checkpoint(path);
    LoadedModel m;
    try {
        const auto meta = Json::parse(data.meta_json);
        if (meta.at("format") != "tabfact-model") throw Error("unexpected checkpoint metadata format");
        m.task = parse_task(meta.at("task").get<std::string>());
        m.variant = parse_variant(meta.at("variant").get<std::string>());
        m.step = meta.at("step");
        m.encoder = nn::EncoderConfig::from_json(meta.at("encoder").dump());
        m.train = TrainConfig::from_json(meta.at("train").dump());
        m.vocab = vocab_from_text(meta.at("vocab").get<std::string>());
    } catch (const Json::exception& e) {
        throw Error("checkpoint '" + path.string() + "' has bad metadata: " + e.what());
    }
    m.model = init_model<Real>(m.encoder);
    nn::import_tensors(m.model, data.params);
    return m;
}

StatementRecord templated(const StatementRecord& s) {
    StatementRecord out = s;
    out.text = template_statement(s.text, s.verdict);
    return out;
}

TrainResult train(const TrainInputs& in) {
    if (in.train == nullptr || in.validation == nullptr) throw ContractError("train: datasets missing");
    if (in.variant == Variant::Separate) throw ContractError("train: use train_separate for the separate variant");
    if (in.variant == Variant::Statement && in.task != Task::Evidence)
        throw ContractError("train: the statement variant applies to evidence finding");
    in.config.validate();
    const TrainConfig& tc = in.config;
    auto say = [&](const std::string& s) {
        if (in.progress) in.progress(s);
    };

    LoadedModel lm;
    lm.task = in.task;
    lm.variant = in.variant;
    lm.train = tc;
    lm.encoder = in.encoder;
    if (in.init_from) {
        LoadedModel src = load_model(*in.init_from);
        nn::EncoderConfig want = in.encoder;
        want.vocab_size = src.encoder.vocab_size;
        if (!want.same_architecture(src.encoder)) {
            throw Error("config mismatch: checkpoint '" + in.init_from->string() + "' has encoder " +
                        src.encoder.to_json() + " but this run requests " + want.to_json());
        }
        lm.encoder = want;
        lm.vocab = src.vocab;
        lm.model = init_model<Real>(lm.encoder);
        const bool same_task = src.task == in.task;
        nn::import_tensors(lm.model, nn::export_tensors(src.model),
                           [&](const std::string& name) { return same_task || !is_head_tensor(name); });
        say("initialized from " + in.init_from->string() + (same_task ? " (all tensors)" : " (encoder only)"));
    } else {
        lm.vocab = vocab_for(*in.train, in.variant, tc.vocab_size);
        lm.encoder.vocab_size = lm.vocab.size();
        lm.model = init_model<Real>(lm.encoder);
    }
    lm.encoder.validate();

    TrainResult result;
    const auto examples = build_examples(in.task, in.variant, *in.train, lm.vocab, lm.encoder, tc.max_len,
                                         result.skipped_examples);
    if (examples.empty()) throw Error("train: no usable training examples");
    const ClassWeights weights = present_class_weights(examples);

    const long per_epoch = (static_cast<long>(examples.size()) + tc.batch_size - 1) / tc.batch_size;
    long phase1_steps = 0, total_steps = 0;
    if (in.task == Task::Verdict) {
        phase1_steps = per_epoch * tc.phase1_epochs;
        total_steps = phase1_steps + per_epoch * tc.phase2_epochs;
    } else {
        total_steps = tc.steps > 0 ? tc.steps : per_epoch * tc.phase2_epochs;
    }
    if (total_steps == 0) throw Error("train: schedule has no steps");

    std::filesystem::create_directories(in.run_dir);
    const auto log_path = in.run_dir / "train_log.jsonl";
    std::string log_text;

    const nn::Encoder<Real> enc(lm.encoder);
    nn::AdamW<Real> opt;
    Model<Real> grads = nn::zeros_like(lm.model);
    std::mt19937_64 rng(tc.seed);
    std::mt19937_64* dropout_rng = lm.encoder.dropout_rate > 0 ? &rng : nullptr;
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::filesystem::path> written;

    double loss_sum = 0.0;
    long loss_count = 0;
    long step = 0;
    bool best_set = false;
    while (step < total_steps) {
        std::ranges::shuffle(order, rng);
        for (std::size_t start = 0; start < order.size() && step < total_steps; start += static_cast<std::size_t>(tc.batch_size)) {
            const bool head_only = in.task == Task::Verdict && step < phase1_steps;
            if (in.task == Task::Verdict && step == phase1_steps && phase1_steps > 0) opt.reset();
            const double lr = head_only ? tc.phase1_lr : (in.task == Task::Verdict ? tc.phase2_lr : tc.phase2_lr);
            zero(grads);
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(tc.batch_size));
            double batch_loss = 0.0;
            for (std::size_t i = start; i < end; ++i) {
                batch_loss += accumulate(enc, lm.model, examples[order[i]], in.task, weights, tc.w_p, head_only,
                                         dropout_rng, grads);
            }
            ++step;
            if (!std::isfinite(batch_loss)) throw Error("non-finite training loss at step " + std::to_string(step));
            const double inv = 1.0 / static_cast<double>(end - start);
            grads.visit([&](const std::string&, Matrix<Real>& m) { m *= static_cast<Real>(inv); });
            std::function<bool(const std::string&)> trainable;
            if (head_only) trainable = [](const std::string& n) { return is_head_tensor(n); };
            opt.step(lm.model, grads, lr, tc.weight_decay, trainable);
            loss_sum += batch_loss;
            loss_count += static_cast<long>(end - start);

            if (step % tc.checkpoint_every != 0 && step != total_steps) continue;
            lm.step = step;
            double metric;
            if (in.task == Task::Verdict) {
                const auto ev = evaluate_verdicts(*in.validation, predict_verdict(lm, *in.validation, tc.max_len));
                metric = selection_value(tc.selection_metric, &ev, nullptr);
            } else {
                const auto ev = evaluate_evidence(*in.validation, predict_cells(lm, *in.validation, tc.threshold, tc.max_len));
                metric = selection_value(tc.selection_metric, nullptr, &ev);
            }
            const EvalRecord rec{step, metric, loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0};
            loss_sum = 0.0;
            loss_count = 0;
            result.log.push_back(rec);
            log_text += Json{{"step", rec.step}, {"metric", rec.metric}, {"loss", rec.loss}}.dump() + "\n";
            const auto ckpt = in.run_dir / (std::to_string(step) + ".ckpt");
            save_model(ckpt, lm, &opt);
            written.push_back(ckpt);
            if (!best_set || metric > result.best_metric) {
                best_set = true;
                result.best_metric = metric;
                result.best_step = step;
                result.best_checkpoint = ckpt;
            }
            say("step " + std::to_string(step) + "/" + std::to_string(total_steps) + " loss " +
                format_fixed2(rec.loss) + " " + tc.selection_metric + " " + format_fixed2(metric));
        }
    }

    write_file(log_path, log_text);
    const Json best = {{"step", result.best_step},
                       {"checkpoint", result.best_checkpoint.filename().string()},
                       {"metric", result.best_metric},
                       {"selection_metric", tc.selection_metric}};
    write_file(in.run_dir / "best.json", best.dump(2) + "\n");
    if (!tc.keep_all_checkpoints) {
        for (const auto& p : written)
            if (p != result.best_checkpoint) std::filesystem::remove(p);
    }
    return result;
}

SeparateResult train_separate(const TrainInputs& in) {
    if (in.task != Task::Evidence) throw ContractError("train_separate: the separate variant applies to evidence finding");
    auto subset = [](const Dataset& d, Verdict v) {
        Dataset out;
        out.split_name = d.split_name;
        for (const auto& s : d.statements) {
            if (s.verdict != v) continue;
            out.statements.push_back(s);
            out.tables.emplace(s.table_id, d.table_of(s));
        }
        return out;
    };
    SeparateResult r;
    for (auto v : {Verdict::Entailed, Verdict::Refuted}) {
        const Dataset tr = subset(*in.train, v);
        const Dataset va = subset(*in.validation, v);
        TrainInputs sub = in;
        sub.variant = Variant::Base;
        sub.train = &tr;
        sub.validation = &va;
        sub.run_dir = in.run_dir / (v == Verdict::Entailed ? "entailed" : "refuted");
        (v == Verdict::Entailed ? r.entailed : r.refuted) = train(sub);
    }
    return r;
}

std::vector<VerdictPrediction> predict_verdict(const LoadedModel& m, const Dataset& d, int max_len) {
    const nn::Encoder<Real> enc(m.encoder);
    TableCache tables(d);
    std::vector<VerdictPrediction> out;
    out.reserve(d.statements.size());
    for (const auto& s : d.statements) {
        VerdictPrediction p;
        p.statement_id = s.statement_id;
        p.table_id = s.table_id;
        try {
            const auto& t = tables.get(s.table_id);
            const EncodedExample e = nn::clip_features(encode_example(s.text, t, m.vocab, max_len), m.encoder);
            p.length = e.full_length;
            p.truncated_rows = e.truncated_rows;
            p.probs = verdict_forward(enc, m.model, e);
            p.verdict = argmax_verdict(p.probs);
        } catch (const OversizeError& err) {
            p.error = err.what();
            p.verdict = Verdict::Unknown;
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<EvidencePrediction> predict_cells(const LoadedModel& m, const Dataset& d, double threshold, int max_len) {
    return predict_cells_for(m, d, threshold, max_len, [](const StatementRecord& s) {
        return s.verdict == Verdict::Entailed || s.verdict == Verdict::Refuted;
    });
}

std::vector<EvidencePrediction> route_separate(const LoadedModel& entailed, const LoadedModel& refuted, const Dataset& d,
                                               double threshold, int max_len) {
    for (const auto& s : d.statements) {
        if (s.verdict == Verdict::Unknown) {
            throw Error("route_separate: statement '" + s.statement_id + "' is Unknown; only Entailed or Refuted can be routed");
        }
    }
    auto a = predict_cells_for(entailed, d, threshold, max_len,
                               [](const StatementRecord& s) { return s.verdict == Verdict::Entailed; });
    auto b = predict_cells_for(refuted, d, threshold, max_len,
                               [](const StatementRecord& s) { return s.verdict == Verdict::Refuted; });
    a.insert(a.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end()));
    std::ranges::sort(a, {}, &EvidencePrediction::statement_id);
    return a;
}

}  // namespace tabfact
