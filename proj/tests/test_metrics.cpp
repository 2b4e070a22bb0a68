#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "tabfact/metrics.hpp"

using namespace tabfact;

namespace {

using V = Verdict;

// Reference scorers written from counts, independent of the library.

double ref_f1(double tp, double fp, double fn) {
    const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double r = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

ThreeWayScore ref_3way(const std::vector<V>& g, const std::vector<V>& p) {
    ThreeWayScore s;
    double tp_all = 0, fp_all = 0, fn_all = 0;
    for (int k = 0; k < 3; ++k) {
        double tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const bool gk = static_cast<int>(g[i]) == k, pk = static_cast<int>(p[i]) == k;
            tp += gk && pk;
            fp += !gk && pk;
            fn += gk && !pk;
        }
        tp_all += tp, fp_all += fp, fn_all += fn;
        s.per_class[static_cast<std::size_t>(k)] = 100.0 * ref_f1(tp, fp, fn);
    }
    s.micro = 100.0 * ref_f1(tp_all, fp_all, fn_all);
    return s;
}

double ref_2way(const std::vector<V>& g, const std::vector<V>& p) {
    double correct = 0, predicted = 0, total = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] == V::Unknown) continue;
        ++total;
        if (p[i] != V::Unknown) ++predicted;
        if (p[i] == g[i]) ++correct;
    }
    const double prec = predicted > 0 ? correct / predicted : 0.0;
    const double rec = total > 0 ? correct / total : 0.0;
    return prec + rec > 0 ? 100.0 * 2 * prec * rec / (prec + rec) : 0.0;
}

double ref_evidence(const CoordSet& pred, const std::vector<CoordSet>& variants) {
    double best = 0;
    for (const auto& v : variants) {
        double tp = 0;
        for (const auto& c : pred) tp += v.count(c);
        const double fp = static_cast<double>(pred.size()) - tp;
        const double fn = static_cast<double>(v.size()) - tp;
        const double f = (pred.empty() && v.empty()) ? 1.0 : ref_f1(tp, fp, fn);
        best = std::max(best, f);
    }
    return best;
}

std::vector<V> random_labels(std::mt19937_64& rng, std::size_t n, int classes = 3) {
    std::uniform_int_distribution<int> d(0, classes - 1);
    std::vector<V> out(n);
    for (auto& v : out) v = static_cast<V>(d(rng));
    return out;
}

CoordSet random_cells(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> size(0, 5), coord(0, 3);
    CoordSet s;
    for (int i = size(rng); i > 0; --i) s.insert({coord(rng), coord(rng)});
    return s;
}

}  // namespace

TEST_CASE("three-way worked examples") {
    const std::vector<V> g = {V::Entailed, V::Refuted, V::Unknown};
    CHECK(f1_micro_3way(g, g).micro == 100.0);
    const auto s = f1_micro_3way(g, std::vector<V>{V::Entailed, V::Unknown, V::Unknown});
    CHECK(round_half_up(s.micro) == 66.67);
    CHECK(s.per_class[0] == doctest::Approx(100.0));
    CHECK(s.per_class[1] == 0.0);
    CHECK(s.per_class[2] == doctest::Approx(200.0 / 3.0));
    CHECK(f1_micro_3way(std::vector<V>{V::Entailed}, std::vector<V>{V::Refuted}).micro == 0.0);
    CHECK_THROWS_AS(f1_micro_3way(g, std::vector<V>{V::Entailed}), ContractError);
}

TEST_CASE("two-way worked examples") {
    const std::vector<V> g = {V::Entailed, V::Entailed, V::Refuted, V::Unknown};
    const std::vector<V> p = {V::Entailed, V::Unknown, V::Refuted, V::Entailed};
    CHECK(f1_micro_2way(g, p) == doctest::Approx(80.0));
    const std::vector<V> er = {V::Entailed, V::Refuted};
    CHECK(f1_micro_2way(er, er) == 100.0);
    CHECK(f1_micro_2way(er, std::vector<V>{V::Unknown, V::Unknown}) == 0.0);
    CHECK(f1_micro_2way(g, p, TwoWayMode::PlainError) == doctest::Approx(200.0 / 3.0));
}

TEST_CASE("metrics agree with reference scorers on random instances") {
    std::mt19937_64 rng(2021);
    std::uniform_int_distribution<std::size_t> len(1, 40);
    for (int i = 0; i < 1000; ++i) {
        const auto n = len(rng);
        const auto g = random_labels(rng, n), p = random_labels(rng, n);
        const auto s = f1_micro_3way(g, p);
        const auto r = ref_3way(g, p);
        CHECK(s.micro == doctest::Approx(r.micro).epsilon(1e-12));
        for (std::size_t k = 0; k < 3; ++k) CHECK(s.per_class[k] == doctest::Approx(r.per_class[k]).epsilon(1e-12));
        const double acc = 100.0 * static_cast<double>(std::inner_product(g.begin(), g.end(), p.begin(), 0, std::plus<>(),
                                                                           std::equal_to<>())) / static_cast<double>(n);
        CHECK(s.micro == doctest::Approx(acc).epsilon(1e-12));
        CHECK(f1_micro_2way(g, p) == doctest::Approx(ref_2way(g, p)).epsilon(1e-12));

        const auto g2 = random_labels(rng, n, 2), p2 = random_labels(rng, n, 2);
        CHECK(f1_micro_2way(g2, p2) == doctest::Approx(f1_micro_3way(g2, p2).micro).epsilon(1e-12));
    }
    for (int i = 0; i < 1000; ++i) {
        std::vector<CoordSet> variants(1 + static_cast<std::size_t>(i % 3));
        for (auto& v : variants) {
            v = random_cells(rng);
            if (v.empty()) v.insert({0, 0});
        }
        const auto pred = random_cells(rng);
        const auto e = evidence_f1(pred, variants);
        CHECK(e.f1 == doctest::Approx(ref_evidence(pred, variants)).epsilon(1e-12));
        CHECK(e.f1 >= 0.0);
        CHECK(e.f1 <= 1.0);
        auto more = variants;
        more.push_back(random_cells(rng));
        CHECK(evidence_f1(pred, more).f1 >= e.f1);
    }
}

TEST_CASE("scores are permutation invariant") {
    std::mt19937_64 rng(8);
    auto g = random_labels(rng, 50), p = random_labels(rng, 50);
    const auto a3 = f1_micro_3way(g, p).micro;
    const auto a2 = f1_micro_2way(g, p);
    std::vector<std::size_t> idx(50);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<V> gs, ps;
    for (auto i : idx) gs.push_back(g[i]), ps.push_back(p[i]);
    CHECK(f1_micro_3way(gs, ps).micro == doctest::Approx(a3));
    CHECK(f1_micro_2way(gs, ps) == doctest::Approx(a2));
}

TEST_CASE("evidence worked examples") {
    const std::vector<CoordSet> v = {{{1, 1}}, {{2, 1}}};
    CHECK(evidence_f1({{2, 1}}, v).f1 == 1.0);
    CHECK(evidence_f1({{2, 1}}, v).best_variant == 1);
    CHECK(evidence_f1({{1, 1}, {2, 1}}, v).f1 == doctest::Approx(2.0 / 3.0));
    CHECK(evidence_f1({{0, 0}, {1, 1}}, {{{0, 0}, {1, 1}}}).f1 == 1.0);
    CHECK_THROWS_AS(evidence_f1({}, {}), ContractError);

    const std::vector<double> per = {1.0, 0.5, 0.0};
    CHECK(evidence_f1_corpus(per) == doctest::Approx(0.5));
    CHECK(evidence_f1_corpus(std::vector<double>{}) == 0.0);
    const std::vector<CellCounts> counts = {{2, 0, 0}, {0, 2, 2}};
    CHECK(evidence_f1_micro(counts) == doctest::Approx(0.5));
}

TEST_CASE("confusion matrix") {
    const std::vector<V> all = {V::Entailed, V::Refuted, V::Unknown};
    const auto id = confusion_matrix(all, all);
    CHECK(id.counts == Eigen::Matrix3i::Identity());
    CHECK(id.percent.isApprox(100.0 * Eigen::Matrix3d::Identity()));

    const auto u = confusion_matrix(std::vector<V>{V::Unknown, V::Unknown}, std::vector<V>{V::Refuted, V::Refuted});
    CHECK(u.counts(2, 1) == 2);
    CHECK(u.percent(2, 1) == 100.0);

    const auto z = confusion_matrix(std::vector<V>{}, std::vector<V>{});
    CHECK(z.counts.isZero());
    CHECK(format_confusion(id).find("100.00") != std::string::npos);
}

TEST_CASE("rounding is half-up at two decimals") {
    CHECK(round_half_up(77.515) == 77.52);
    CHECK(round_half_up(2.675) == 2.68);
    CHECK(format_fixed2(5) == "5.00");
    CHECK(format_fixed2(66.666666) == "66.67");
}

TEST_CASE("length buckets") {
    SUBCASE("published split of 556 samples") {
        std::vector<int> lengths(431, 300);
        lengths.insert(lengths.end(), 125, 700);
        const auto r = length_bucket_report(lengths, {});
        CHECK(r.short_bucket.count == 431);
        CHECK(r.long_bucket.count == 125);
        CHECK(format_fixed2(r.short_bucket.percent) == "77.52");
        CHECK(format_fixed2(r.long_bucket.percent) == "22.48");
    }
    SUBCASE("empty long bucket is undefined") {
        const std::vector<int> lengths = {10, 20};
        const auto r = length_bucket_report(lengths, {{"acc", [](std::span<const std::size_t>) { return 1.0; }}});
        CHECK(r.long_bucket.count == 0);
        CHECK_FALSE(r.long_bucket.metrics.at("acc").has_value());
        CHECK(format_length_buckets(r).find(" -\n") != std::string::npos);
    }
    SUBCASE("bucket metrics equal recomputation on the subset") {
        std::mt19937_64 rng(4);
        std::uniform_int_distribution<int> len(100, 900);
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t n = 60;
            const auto g = random_labels(rng, n), p = random_labels(rng, n);
            std::vector<int> lengths(n);
            for (auto& l : lengths) l = len(rng);
            auto metric = [&](std::span<const std::size_t> idx) {
                std::vector<V> gs, ps;
                for (auto i : idx) gs.push_back(g[i]), ps.push_back(p[i]);
                return f1_micro_3way(gs, ps).micro;
            };
            const auto r = length_bucket_report(lengths, {{"f1", metric}});
            std::vector<V> gs, ps, gl, pl;
            for (std::size_t i = 0; i < n; ++i) {
                const bool short_one = lengths[i] <= 512;
                (short_one ? gs : gl).push_back(g[i]);
                (short_one ? ps : pl).push_back(p[i]);
            }
            CHECK(r.short_bucket.count == static_cast<int>(gs.size()));
            if (!gs.empty()) CHECK(*r.short_bucket.metrics.at("f1") == f1_micro_3way(gs, ps).micro);
            if (!gl.empty()) CHECK(*r.long_bucket.metrics.at("f1") == f1_micro_3way(gl, pl).micro);
        }
    }
}

TEST_CASE("evaluating prediction files") {
    const auto d = fixtures::sample_a1();
    std::vector<VerdictPrediction> preds;
    for (const auto& s : d.statements) preds.push_back({s.statement_id, s.table_id, s.verdict, {}, 100, 0, {}});
    const auto e = evaluate_verdicts(d, preds);
    CHECK(e.f1_3way == 100.0);
    CHECK(e.f1_2way == 100.0);
    preds.pop_back();
    CHECK_THROWS(evaluate_verdicts(d, preds));

    std::vector<EvidencePrediction> ev;
    const auto& t = d.tables.at("A1");
    for (const auto& s : d.statements) {
        if (s.evidence_variants.empty()) continue;
        EvidencePrediction p{s.statement_id, s.table_id, {s.statement_id, Grid<CellLabel>(t.n_rows, t.n_cols, CellLabel::Irrelevant)}, 50, 0, {}};
        for (const auto& c : s.evidence_variants[0]) p.labels.labels(c.row, c.col) = CellLabel::Relevant;
        ev.push_back(p);
    }
    const auto ee = evaluate_evidence(d, ev);
    CHECK(ee.n == 1);
    CHECK(ee.f1 == 100.0);
    CHECK(format_evidence_table({{"gold", ee}}).find("100.00") != std::string::npos);
    CHECK(format_verdict_table({{"gold", e}}).find("3-way") != std::string::npos);
}
