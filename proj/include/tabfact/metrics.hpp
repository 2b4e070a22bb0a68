#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tabfact/ingest.hpp"
#include "tabfact/table.hpp"

namespace tabfact {

/// Half-up rounding to `digits` decimals.
double round_half_up(double x, int digits = 2);
/// round_half_up to two decimals, printed with exactly two decimals.
std::string format_fixed2(double x);

/// Percentages in [0, 100]. Per-class values are one-vs-rest F1 (0 when the class never occurs in
/// gold or prediction).
struct ThreeWayScore {
    double micro = 0.0;
    std::array<double, kNumVerdicts> per_class{};
};

ThreeWayScore f1_micro_3way(std::span<const Verdict> gold, std::span<const Verdict> pred);

enum class TwoWayMode {
    /// Unknown predictions are left out of precision but count against recall.
    PenalizeRecall,
    /// Unknown predictions are ordinary errors (the score equals restricted accuracy).
    PlainError,
};

/// F1-micro over statements whose gold label is Entailed or Refuted, in percent.
double f1_micro_2way(std::span<const Verdict> gold, std::span<const Verdict> pred,
                     TwoWayMode mode = TwoWayMode::PenalizeRecall);

struct CellCounts {
    long tp = 0;
    long fp = 0;
    long fn = 0;
};

/// Cell-level F1 (relevant cells positive) in [0, 1]; two empty sets score 1.
double cell_f1(const CoordSet& pred, const CoordSet& gold);

struct EvidenceScore {
    double f1 = 0.0;       // best over variants, in [0, 1]
    int best_variant = 0;  // first variant attaining the best score
    CellCounts counts;     // counts against the best variant
};

/// Best F1 of `pred` against any of the variants. Throws when there are no variants.
EvidenceScore evidence_f1(const CoordSet& pred, const std::vector<CoordSet>& variants);

/// Unweighted mean of per-statement scores (0 for an empty corpus).
double evidence_f1_corpus(std::span<const double> per_statement);
/// F1 of the summed best-variant cell counts.
double evidence_f1_micro(std::span<const CellCounts> per_statement);

struct ConfusionMatrix {
    Eigen::Matrix3i counts = Eigen::Matrix3i::Zero();  // rows gold, columns predicted
    Eigen::Matrix3d percent = Eigen::Matrix3d::Zero();  // row-normalized, 0 for empty rows
};

ConfusionMatrix confusion_matrix(std::span<const Verdict> gold, std::span<const Verdict> pred);

/// Cell-level relevant/irrelevant confusion for evidence finding (index 0 relevant, 1 irrelevant).
struct CellConfusion {
    Eigen::Matrix2i counts = Eigen::Matrix2i::Zero();
    Eigen::Matrix2d percent = Eigen::Matrix2d::Zero();
};

struct LengthBucket {
    int count = 0;
    double percent = 0.0;
    std::map<std::string, std::optional<double>> metrics;  // nullopt when the bucket is empty
};

struct LengthBucketReport {
    int limit = 512;
    LengthBucket short_bucket;  // length <= limit
    LengthBucket long_bucket;   // length > limit
    std::vector<std::string> metric_names;
};

using SubsetMetric = std::function<double(std::span<const std::size_t>)>;

/// Splits samples by pre-truncation length and evaluates each metric on each bucket's subset.
LengthBucketReport length_bucket_report(std::span<const int> lengths,
                                        const std::vector<std::pair<std::string, SubsetMetric>>& metrics,
                                        int limit = 512);

// ---------------------------------------------------------------------------------------------
// Evaluation of prediction files against a gold dataset

struct VerdictEvaluation {
    int n = 0;
    double f1_2way = 0.0;
    double f1_3way = 0.0;
    std::array<double, kNumVerdicts> per_class{};
    ConfusionMatrix confusion;
    LengthBucketReport buckets;
};

/// Joins predictions to gold statements by id; a gold statement without a prediction is an error.
VerdictEvaluation evaluate_verdicts(const Dataset& gold, const std::vector<VerdictPrediction>& preds,
                                    TwoWayMode mode = TwoWayMode::PenalizeRecall, int length_limit = 512);

struct EvidenceEvaluation {
    int n = 0;
    double f1 = 0.0;  // percentages
    double f1_entailed = 0.0;
    double f1_refuted = 0.0;
    double f1_micro_cells = 0.0;
    CellConfusion confusion;
    LengthBucketReport buckets;
    std::vector<double> per_statement;  // [0, 1], gold order of scored statements
};

/// Relevant positions of a raw-grid prediction mapped to the anchors of their spans.
CoordSet predicted_anchor_set(const CellLabelGrid& pred, const RawTable& t);

/// Scores every gold statement with at least one evidence variant.
EvidenceEvaluation evaluate_evidence(const Dataset& gold, const std::vector<EvidencePrediction>& preds,
                                     int length_limit = 512);

std::string verdict_evaluation_json(const VerdictEvaluation& e);
std::string evidence_evaluation_json(const EvidenceEvaluation& e);

/// Rows "2-way micro", "3-way micro", "Refuted", "Entailed", "Unknown"; one column per system.
std::string format_verdict_table(const std::vector<std::pair<std::string, VerdictEvaluation>>& systems);
/// One row per system with F1, F1_entailed, F1_refuted.
std::string format_evidence_table(const std::vector<std::pair<std::string, EvidenceEvaluation>>& systems);
std::string format_confusion(const ConfusionMatrix& m);
std::string format_cell_confusion(const CellConfusion& m);
std::string format_length_buckets(const LengthBucketReport& r);

}  // namespace tabfact
