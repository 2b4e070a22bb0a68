#include "tabfact/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace tabfact {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw ContractError(std::string(what) + ": gold has " + std::to_string(a) + " labels but prediction has " +
                            std::to_string(b));
    }
}

double f1_from(double tp, double fp, double fn) {
    const double denom = 2.0 * tp + fp + fn;
    return denom == 0.0 ? 0.0 : 2.0 * tp / denom;
}

std::string pad_right(const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }
std::string pad_left(const std::string& s, std::size_t w) { return s.size() >= w ? s : std::string(w - s.size(), ' ') + s; }

nlohmann::json bucket_json(const LengthBucket& b) {
    nlohmann::json j;
    j["count"] = b.count;
    j["percent"] = round_half_up(b.percent);
    for (const auto& [name, v] : b.metrics) j["metrics"][name] = v ? nlohmann::json(round_half_up(*v)) : nlohmann::json();
    return j;
}

nlohmann::json buckets_json(const LengthBucketReport& r) {
    return {{"limit", r.limit}, {"short", bucket_json(r.short_bucket)}, {"long", bucket_json(r.long_bucket)}};
}

}  // namespace

double round_half_up(double x, int digits) {
    const double scale = std::pow(10.0, digits);
    // The nudge absorbs binary representation error such as 77.5179856... vs 2.675.
    const double scaled = x * scale;
    const double r = x >= 0 ? std::floor(scaled + 0.5 + 1e-9) : -std::floor(-scaled + 0.5 + 1e-9);
    return r / scale;
}

std::string format_fixed2(double x) {
    char buf[64];
    double r = round_half_up(x, 2);
    if (r == 0.0) r = 0.0;  // no "-0.00"
    std::snprintf(buf, sizeof buf, "%.2f", r);
    return buf;
}

ThreeWayScore f1_micro_3way(std::span<const Verdict> gold, std::span<const Verdict> pred) {
    require_same_length(gold.size(), pred.size(), "f1_micro_3way");
    ThreeWayScore out;
    std::array<long, kNumVerdicts> tp{}, fp{}, fn{};
    long correct = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const auto g = static_cast<std::size_t>(gold[i]);
        const auto p = static_cast<std::size_t>(pred[i]);
        if (g == p) {
            ++tp[g];
            ++correct;
        } else {
            ++fp[p];
            ++fn[g];
        }
    }
    if (!gold.empty()) out.micro = 100.0 * static_cast<double>(correct) / static_cast<double>(gold.size());
    for (std::size_t k = 0; k < kNumVerdicts; ++k) {
        out.per_class[k] = 100.0 * f1_from(static_cast<double>(tp[k]), static_cast<double>(fp[k]), static_cast<double>(fn[k]));
    }
    return out;
}

double f1_micro_2way(std::span<const Verdict> gold, std::span<const Verdict> pred, TwoWayMode mode) {
    require_same_length(gold.size(), pred.size(), "f1_micro_2way");
    long n = 0, predicted = 0, correct = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] == Verdict::Unknown) continue;
        ++n;
        if (pred[i] != Verdict::Unknown || mode == TwoWayMode::PlainError) ++predicted;
        if (pred[i] == gold[i]) ++correct;
    }
    if (n == 0 || predicted == 0 || correct == 0) return 0.0;
    const double p = static_cast<double>(correct) / static_cast<double>(predicted);
    const double r = static_cast<double>(correct) / static_cast<double>(n);
    return 100.0 * 2.0 * p * r / (p + r);
}

double cell_f1(const CoordSet& pred, const CoordSet& gold) {
    if (pred.empty() && gold.empty()) return 1.0;
    long tp = 0;
    for (const auto& c : pred) tp += gold.count(c) ? 1 : 0;
    const auto fp = static_cast<long>(pred.size()) - tp;
    const auto fn = static_cast<long>(gold.size()) - tp;
    return f1_from(static_cast<double>(tp), static_cast<double>(fp), static_cast<double>(fn));
}

EvidenceScore evidence_f1(const CoordSet& pred, const std::vector<CoordSet>& variants) {
    if (variants.empty()) throw ContractError("evidence_f1: statement has no evidence variants");
    EvidenceScore best;
    best.f1 = -1.0;
    for (std::size_t v = 0; v < variants.size(); ++v) {
        const double f = cell_f1(pred, variants[v]);
        if (f > best.f1) {
            best.f1 = f;
            best.best_variant = static_cast<int>(v);
            long tp = 0;
            for (const auto& c : pred) tp += variants[v].count(c) ? 1 : 0;
            best.counts = {tp, static_cast<long>(pred.size()) - tp, static_cast<long>(variants[v].size()) - tp};
        }
    }
    return best;
}

double evidence_f1_corpus(std::span<const double> per_statement) {
    if (per_statement.empty()) return 0.0;
    double sum = 0.0;
    for (double s : per_statement) sum += s;
    return sum / static_cast<double>(per_statement.size());
}

double evidence_f1_micro(std::span<const CellCounts> per_statement) {
    CellCounts total;
    for (const auto& c : per_statement) {
        total.tp += c.tp;
        total.fp += c.fp;
        total.fn += c.fn;
    }
    if (total.tp + total.fp + total.fn == 0) return per_statement.empty() ? 0.0 : 1.0;
    return f1_from(static_cast<double>(total.tp), static_cast<double>(total.fp), static_cast<double>(total.fn));
}

ConfusionMatrix confusion_matrix(std::span<const Verdict> gold, std::span<const Verdict> pred) {
    require_same_length(gold.size(), pred.size(), "confusion_matrix");
    ConfusionMatrix m;
    for (std::size_t i = 0; i < gold.size(); ++i) m.counts(static_cast<int>(gold[i]), static_cast<int>(pred[i]))++;
    for (int r = 0; r < 3; ++r) {
        const int total = m.counts.row(r).sum();
        if (total > 0) m.percent.row(r) = 100.0 * m.counts.row(r).cast<double>() / total;
    }
    return m;
}

LengthBucketReport length_bucket_report(std::span<const int> lengths,
                                        const std::vector<std::pair<std::string, SubsetMetric>>& metrics, int limit) {
    LengthBucketReport r;
    r.limit = limit;
    std::vector<std::size_t> short_idx, long_idx;
    for (std::size_t i = 0; i < lengths.size(); ++i) (lengths[i] <= limit ? short_idx : long_idx).push_back(i);
    const double n = static_cast<double>(lengths.size());
    auto fill = [&](LengthBucket& b, const std::vector<std::size_t>& idx) {
        b.count = static_cast<int>(idx.size());
        b.percent = lengths.empty() ? 0.0 : 100.0 * static_cast<double>(idx.size()) / n;
        for (const auto& [name, fn] : metrics) {
            b.metrics[name] = idx.empty() ? std::nullopt : std::optional<double>(fn(idx));
        }
    };
    fill(r.short_bucket, short_idx);
    fill(r.long_bucket, long_idx);
    for (const auto& m : metrics) r.metric_names.push_back(m.first);
    return r;
}

VerdictEvaluation evaluate_verdicts(const Dataset& gold, const std::vector<VerdictPrediction>& preds, TwoWayMode mode,
                                    int length_limit) {
    std::unordered_map<std::string, const VerdictPrediction*> by_id;
    for (const auto& p : preds) by_id[p.statement_id] = &p;
    std::vector<Verdict> g, p;
    std::vector<int> lengths;
    for (const auto& s : gold.statements) {
        const auto it = by_id.find(s.statement_id);
        if (it == by_id.end()) throw Error("no prediction for statement '" + s.statement_id + "'");
        g.push_back(s.verdict);
        p.push_back(it->second->verdict);
        lengths.push_back(it->second->length);
    }
    VerdictEvaluation e;
    e.n = static_cast<int>(g.size());
    const auto three = f1_micro_3way(g, p);
    e.f1_3way = three.micro;
    e.per_class = three.per_class;
    e.f1_2way = f1_micro_2way(g, p, mode);
    e.confusion = confusion_matrix(g, p);
    auto subset = [&](std::span<const std::size_t> idx, std::vector<Verdict>& sg, std::vector<Verdict>& sp) {
        for (auto i : idx) {
            sg.push_back(g[i]);
            sp.push_back(p[i]);
        }
    };
    e.buckets = length_bucket_report(
        lengths,
        {{"2-way", [&](std::span<const std::size_t> idx) {
              std::vector<Verdict> sg, sp;
              subset(idx, sg, sp);
              return f1_micro_2way(sg, sp, mode);
          }},
         {"3-way", [&](std::span<const std::size_t> idx) {
              std::vector<Verdict> sg, sp;
              subset(idx, sg, sp);
              return f1_micro_3way(sg, sp).micro;
          }}},
        length_limit);
    return e;
}

CoordSet predicted_anchor_set(const CellLabelGrid& pred, const RawTable& t) {
    if (pred.labels.rows() != t.n_rows || pred.labels.cols() != t.n_cols) {
        throw ContractError("prediction grid for statement '" + pred.statement_id + "' is " +
                            std::to_string(pred.labels.rows()) + "x" + std::to_string(pred.labels.cols()) + " but table '" +
                            t.table_id + "' is " + std::to_string(t.n_rows) + "x" + std::to_string(t.n_cols));
    }
    const Grid<int> cover = coverage_map(t);
    CoordSet out;
    for (int r = 0; r < t.n_rows; ++r) {
        for (int c = 0; c < t.n_cols; ++c) {
            if (pred.labels(r, c) != CellLabel::Relevant) continue;
            const auto& a = t.cells.at(static_cast<std::size_t>(cover(r, c)));
            out.insert({a.row, a.col});
        }
    }
    return out;
}

EvidenceEvaluation evaluate_evidence(const Dataset& gold, const std::vector<EvidencePrediction>& preds, int length_limit) {
    std::unordered_map<std::string, const EvidencePrediction*> by_id;
    for (const auto& p : preds) by_id[p.statement_id] = &p;
    EvidenceEvaluation e;
    std::vector<double> entailed, refuted;
    std::vector<CellCounts> counts;
    std::vector<int> lengths;
    for (const auto& s : gold.statements) {
        if (s.evidence_variants.empty()) continue;
        const auto it = by_id.find(s.statement_id);
        if (it == by_id.end()) throw Error("no evidence prediction for statement '" + s.statement_id + "'");
        const RawTable& t = gold.table_of(s);
        const CoordSet pred = predicted_anchor_set(it->second->labels, t);
        const EvidenceScore sc = evidence_f1(pred, s.evidence_variants);
        e.per_statement.push_back(sc.f1);
        counts.push_back(sc.counts);
        lengths.push_back(it->second->length);
        if (s.verdict == Verdict::Entailed) entailed.push_back(sc.f1);
        if (s.verdict == Verdict::Refuted) refuted.push_back(sc.f1);
        const CoordSet& best = s.evidence_variants[static_cast<std::size_t>(sc.best_variant)];
        for (const auto& cell : t.cells) {
            const Coord a{cell.row, cell.col};
            e.confusion.counts(best.count(a) ? 0 : 1, pred.count(a) ? 0 : 1)++;
        }
    }
    for (int r = 0; r < 2; ++r) {
        const int total = e.confusion.counts.row(r).sum();
        if (total > 0) e.confusion.percent.row(r) = 100.0 * e.confusion.counts.row(r).cast<double>() / total;
    }
    e.n = static_cast<int>(e.per_statement.size());
    e.f1 = 100.0 * evidence_f1_corpus(e.per_statement);
    e.f1_entailed = 100.0 * evidence_f1_corpus(entailed);
    e.f1_refuted = 100.0 * evidence_f1_corpus(refuted);
    e.f1_micro_cells = 100.0 * evidence_f1_micro(counts);
    const auto& scores = e.per_statement;
    e.buckets = length_bucket_report(lengths,
                                     {{"F1", [&](std::span<const std::size_t> idx) {
                                           std::vector<double> sub;
                                           for (auto i : idx) sub.push_back(scores[i]);
                                           return 100.0 * evidence_f1_corpus(sub);
                                       }}},
                                     length_limit);
    return e;
}

std::string verdict_evaluation_json(const VerdictEvaluation& e) {
    nlohmann::json j;
    j["task"] = "A";
    j["n"] = e.n;
    j["f1_2way"] = round_half_up(e.f1_2way);
    j["f1_3way"] = round_half_up(e.f1_3way);
    for (std::size_t k = 0; k < kNumVerdicts; ++k) {
        j["per_class"][std::string(to_string(static_cast<Verdict>(k)))] = round_half_up(e.per_class[k]);
    }
    for (int r = 0; r < 3; ++r) {
        nlohmann::json counts = nlohmann::json::array(), pct = nlohmann::json::array();
        for (int c = 0; c < 3; ++c) {
            counts.push_back(e.confusion.counts(r, c));
            pct.push_back(round_half_up(e.confusion.percent(r, c)));
        }
        j["confusion"]["counts"].push_back(counts);
        j["confusion"]["percent"].push_back(pct);
    }
    j["length_buckets"] = buckets_json(e.buckets);
    return j.dump(2) + "\n";
}

std::string evidence_evaluation_json(const EvidenceEvaluation& e) {
    nlohmann::json j;
    j["task"] = "B";
    j["n"] = e.n;
    j["f1"] = round_half_up(e.f1);
    j["f1_entailed"] = round_half_up(e.f1_entailed);
    j["f1_refuted"] = round_half_up(e.f1_refuted);
    j["f1_micro_cells"] = round_half_up(e.f1_micro_cells);
    for (int r = 0; r < 2; ++r) {
        j["confusion"]["counts"].push_back({e.confusion.counts(r, 0), e.confusion.counts(r, 1)});
        j["confusion"]["percent"].push_back(
            {round_half_up(e.confusion.percent(r, 0)), round_half_up(e.confusion.percent(r, 1))});
    }
    j["length_buckets"] = buckets_json(e.buckets);
    return j.dump(2) + "\n";
}

std::string format_verdict_table(const std::vector<std::pair<std::string, VerdictEvaluation>>& systems) {
    std::size_t w = 8;
    for (const auto& s : systems) w = std::max(w, s.first.size());
    std::ostringstream out;
    out << pad_right("", 14);
    for (const auto& s : systems) out << "  " << pad_left(s.first, w);
    out << "\n";
    auto row = [&](const std::string& label, auto get) {
        out << pad_right(label, 14);
        for (const auto& s : systems) out << "  " << pad_left(format_fixed2(get(s.second)), w);
        out << "\n";
    };
    row("2-way micro", [](const VerdictEvaluation& e) { return e.f1_2way; });
    row("3-way micro", [](const VerdictEvaluation& e) { return e.f1_3way; });
    row("Refuted", [](const VerdictEvaluation& e) { return e.per_class[1]; });
    row("Entailed", [](const VerdictEvaluation& e) { return e.per_class[0]; });
    row("Unknown", [](const VerdictEvaluation& e) { return e.per_class[2]; });
    return out.str();
}

std::string format_evidence_table(const std::vector<std::pair<std::string, EvidenceEvaluation>>& systems) {
    std::size_t w = 6;
    for (const auto& s : systems) w = std::max(w, s.first.size());
    std::ostringstream out;
    out << pad_right("Model", w) << "  " << pad_left("F1", 8) << "  " << pad_left("F1_ent", 8) << "  "
        << pad_left("F1_ref", 8) << "\n";
    for (const auto& [name, e] : systems) {
        out << pad_right(name, w) << "  " << pad_left(format_fixed2(e.f1), 8) << "  "
            << pad_left(format_fixed2(e.f1_entailed), 8) << "  " << pad_left(format_fixed2(e.f1_refuted), 8) << "\n";
    }
    return out.str();
}

std::string format_confusion(const ConfusionMatrix& m) {
    static const char* names[] = {"Entailed", "Refuted", "Unknown"};
    std::ostringstream out;
    out << pad_right("gold\\pred", 10);
    for (const auto* n : names) out << "  " << pad_left(n, 16);
    out << "\n";
    for (int r = 0; r < 3; ++r) {
        out << pad_right(names[r], 10);
        for (int c = 0; c < 3; ++c) {
            out << "  " << pad_left(std::to_string(m.counts(r, c)) + " (" + format_fixed2(m.percent(r, c)) + "%)", 16);
        }
        out << "\n";
    }
    return out.str();
}

std::string format_cell_confusion(const CellConfusion& m) {
    static const char* names[] = {"Relevant", "Irrelevant"};
    std::ostringstream out;
    out << pad_right("gold\\pred", 10);
    for (const auto* n : names) out << "  " << pad_left(n, 18);
    out << "\n";
    for (int r = 0; r < 2; ++r) {
        out << pad_right(names[r], 10);
        for (int c = 0; c < 2; ++c) {
            out << "  " << pad_left(std::to_string(m.counts(r, c)) + " (" + format_fixed2(m.percent(r, c)) + "%)", 18);
        }
        out << "\n";
    }
    return out.str();
}

std::string format_length_buckets(const LengthBucketReport& r) {
    const std::string short_name = "Length(<=" + std::to_string(r.limit) + ")";
    const std::string long_name = "Length(>" + std::to_string(r.limit) + ")";
    const std::size_t w = std::max<std::size_t>(14, short_name.size());
    std::ostringstream out;
    out << pad_right("", 18) << "  " << pad_left(short_name, w) << "  " << pad_left(long_name, w) << "\n";
    out << pad_right("Samples", 18) << "  " << pad_left(std::to_string(r.short_bucket.count), w) << "  "
        << pad_left(std::to_string(r.long_bucket.count), w) << "\n";
    out << pad_right("Samples (%)", 18) << "  " << pad_left(format_fixed2(r.short_bucket.percent), w) << "  "
        << pad_left(format_fixed2(r.long_bucket.percent), w) << "\n";
    auto cell = [](const LengthBucket& b, const std::string& name) {
        const auto it = b.metrics.find(name);
        return it == b.metrics.end() || !it->second ? std::string("-") : format_fixed2(*it->second);
    };
    for (const auto& name : r.metric_names) {
        out << pad_right(name, 18) << "  " << pad_left(cell(r.short_bucket, name), w) << "  "
            << pad_left(cell(r.long_bucket, name), w) << "\n";
    }
    return out.str();
}

}  // namespace tabfact
