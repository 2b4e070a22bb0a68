#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tabfact/encoding.hpp"
#include "tabfact/heads.hpp"
#include "tabfact/ingest.hpp"
#include "tabfact/nn/adamw.hpp"
#include "tabfact/nn/config.hpp"

namespace tabfact {

/// Scalar type of trained models.
using Real = float;

enum class Task { Verdict, Evidence };

std::string_view to_string(Task t);
/// Accepts "verdict"/"A" and "evidence"/"B".
Task parse_task(std::string_view s);

/// Evidence-finding strategies: one pooled model, a pooled model on templated statements, or
/// one model per gold verdict.
enum class Variant { Base, Statement, Separate };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view s);

/// Throws on a zero count: every class must occur in training.
ClassWeights compute_class_weights(const std::array<long, kNumVerdicts>& counts);

struct TrainConfig {
    int phase1_epochs = 3;
    double phase1_lr = 1e-3;
    int phase2_epochs = 10;
    double phase2_lr = 1e-4;
    int batch_size = 8;
    int checkpoint_every = 100;  // 50 is the usual choice for evidence
    double w_p = 10.0;
    std::string selection_metric = "f1_3way";  // f1_3way, f1_2way, evidence_f1
    std::uint64_t seed = 1;
    double weight_decay = 0.01;
    double threshold = 0.5;
    int steps = 0;  // evidence step budget; 0 runs phase2_epochs epochs
    int max_len = 512;
    int vocab_size = 2000;
    bool keep_all_checkpoints = false;

    /// Throws ContractError naming the first bad field.
    void validate() const;
    [[nodiscard]] std::string to_json() const;
    static TrainConfig from_json(const std::string& text);
};

/// Defaults for `task` (checkpoint cadence and selection metric differ).
TrainConfig default_train_config(Task task);

/// Sets a field by key (e.g. "phase2_lr"); throws Error for unknown keys or bad values.
void set_train_field(TrainConfig& cfg, const std::string& key, const std::string& value);
void set_encoder_field(nn::EncoderConfig& cfg, const std::string& key, const std::string& value);

/// A trained model with everything needed to encode inputs for it.
struct LoadedModel {
    Task task = Task::Verdict;
    Variant variant = Variant::Base;
    nn::EncoderConfig encoder;
    TrainConfig train;
    Vocab vocab;
    Model<Real> model;
    long step = 0;
};

void save_model(const std::filesystem::path& path, const LoadedModel& m, const nn::AdamW<Real>* opt = nullptr);
LoadedModel load_model(const std::filesystem::path& path);

struct EvalRecord {
    long step = 0;
    double metric = 0.0;
    double loss = 0.0;  // mean training loss per example since the previous evaluation
};

struct TrainResult {
    std::filesystem::path best_checkpoint;
    long best_step = 0;
    double best_metric = 0.0;
    std::vector<EvalRecord> log;
    int skipped_examples = 0;  // training examples that could not be encoded
};

struct TrainInputs {
    Task task = Task::Verdict;
    Variant variant = Variant::Base;  // Separate is handled by train_separate
    const Dataset* train = nullptr;
    const Dataset* validation = nullptr;
    TrainConfig config;
    nn::EncoderConfig encoder;
    std::optional<std::filesystem::path> init_from;
    std::filesystem::path run_dir;
    std::function<void(const std::string&)> progress;  // optional status lines
};

/// Verdict: head-only phase 1, then full phase 2. Evidence: one full phase. Evaluates every
/// `checkpoint_every` steps and at the end, writes `<run_dir>/<step>.ckpt`, `train_log.jsonl` and
/// a `best` manifest, and returns the earliest checkpoint with the best validation metric.
TrainResult train(const TrainInputs& in);

struct SeparateResult {
    TrainResult entailed;
    TrainResult refuted;
};

/// Two evidence models, one per gold verdict, under `<run_dir>/entailed` and `<run_dir>/refuted`.
SeparateResult train_separate(const TrainInputs& in);

/// Statement rewritten as a question that names the gold verdict.
StatementRecord templated(const StatementRecord& s);

std::vector<VerdictPrediction> predict_verdict(const LoadedModel& m, const Dataset& d, int max_len = 512);

/// Predictions for statements with a gold verdict of Entailed or Refuted, over raw-grid
/// coordinates after header propagation and span merging. Relevant iff probability > threshold.
std::vector<EvidencePrediction> predict_cells(const LoadedModel& m, const Dataset& d, double threshold = 0.5,
                                              int max_len = 512);

/// Sends each statement to the model matching its gold verdict; Unknown is an error.
std::vector<EvidencePrediction> route_separate(const LoadedModel& entailed, const LoadedModel& refuted,
                                               const Dataset& d, double threshold = 0.5, int max_len = 512);

}  // namespace tabfact
