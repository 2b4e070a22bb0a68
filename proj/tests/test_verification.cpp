#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "fixtures.hpp"
#include "tabfact/datagen.hpp"
#include "tabfact/heads.hpp"
#include "tabfact/metrics.hpp"
#include "tabfact/preprocess.hpp"
#include "tabfact/train.hpp"

using namespace tabfact;
using nn::Matrix;

TEST_CASE("class weights") {
    const auto w = compute_class_weights({2818, 1688, 4506});
    CHECK(round_half_up(w[0], 4) == 1.5990);
    CHECK(round_half_up(w[1], 4) == 2.6694);
    CHECK(w[2] == 1.0);
    CHECK(compute_class_weights({7, 7, 7}) == ClassWeights{1, 1, 1});
    CHECK(compute_class_weights({1, 2, 2}) == ClassWeights{2, 1, 1});
    CHECK_THROWS_AS(compute_class_weights({3, 0, 2}), Error);
}

TEST_CASE("verdict probabilities") {
    SUBCASE("zero head is uniform") {
        Eigen::Matrix<double, 1, 3> z = Eigen::Matrix<double, 1, 3>::Zero();
        const auto p = softmax3(z);
        for (double x : p) CHECK(x == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("shift invariance and normalization") {
        std::mt19937_64 rng(1);
        std::normal_distribution<double> n(0, 5);
        for (int i = 0; i < 200; ++i) {
            Eigen::Matrix<double, 1, 3> z(n(rng), n(rng), n(rng));
            const auto p = softmax3(z);
            const auto q = softmax3((z.array() + n(rng)).matrix());
            CHECK(std::abs(p[0] + p[1] + p[2] - 1.0) < 1e-6);
            for (int k = 0; k < 3; ++k) CHECK(std::abs(p[static_cast<std::size_t>(k)] - q[static_cast<std::size_t>(k)]) < 1e-12);
            const auto a = argmax_verdict(p);
            CHECK(static_cast<int>(a) >= 0);
            CHECK(static_cast<int>(a) < 3);
        }
    }
    SUBCASE("model forward with zero head weights") {
        const std::vector<std::string> corpus = {"a b 1"};
        const auto v = build_vocab(corpus, 20);
        const auto t = single_header(expand_spans(fixtures::simple_table({{"a", "b"}, {"1", "2"}})));
        const auto e = encode_example("a b", t, v);
        auto cfg = tiny_grad_check_config();
        cfg.vocab_size = v.size();
        auto m = init_model<double>(cfg);
        m.verdict.w.setZero();
        const nn::Encoder<double> enc(cfg);
        const auto p = verdict_forward(enc, m, e);
        for (double x : p) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("weighted cross-entropy") {
    SUBCASE("unit weights equal plain cross-entropy") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(0.001, 1.0);
        std::uniform_int_distribution<int> label(0, 2), size(1, 32);
        double worst = 0.0;
        for (int b = 0; b < 1000; ++b) {
            const int n = size(rng);
            std::vector<VerdictProbs> probs(static_cast<std::size_t>(n));
            std::vector<Verdict> gold(static_cast<std::size_t>(n));
            double plain = 0.0;
            for (int i = 0; i < n; ++i) {
                auto& p = probs[static_cast<std::size_t>(i)];
                double s = 0;
                for (auto& x : p) s += (x = u(rng));
                for (auto& x : p) x /= s;
                gold[static_cast<std::size_t>(i)] = static_cast<Verdict>(label(rng));
                plain -= std::log(p[static_cast<std::size_t>(gold[static_cast<std::size_t>(i)])]);
            }
            const auto l = weighted_ce_loss(probs, gold, {1, 1, 1});
            worst = std::max(worst, std::abs(l.value - plain) / plain);
        }
        CHECK(worst < 1e-10);
    }
    SUBCASE("hand cases") {
        const std::vector<VerdictProbs> certain = {{1.0, 0.0, 0.0}};
        const std::vector<Verdict> e = {Verdict::Entailed};
        CHECK(weighted_ce_loss(certain, e, {1, 1, 1}).value == 0.0);
        const std::vector<VerdictProbs> half = {{0.25, 0.5, 0.25}};
        const std::vector<Verdict> r = {Verdict::Refuted};
        CHECK(std::abs(weighted_ce_loss(half, r, {1, 2, 1}).value - (-2.0 * std::log(0.5))) < 1e-9);
        CHECK(std::abs(weighted_ce_loss(half, r, {1, 2, 1}).value - 1.3863) < 1e-4);
    }
    SUBCASE("zero probability is clamped and counted") {
        const std::vector<VerdictProbs> p = {{0.0, 1.0, 0.0}};
        const std::vector<Verdict> e = {Verdict::Entailed};
        const auto l = weighted_ce_loss(p, e, {1, 1, 1});
        CHECK(l.clamped == 1);
        CHECK(l.value == doctest::Approx(-std::log(kLogClamp)));
    }
}

TEST_CASE("cell selection averages token logits per cell") {
    EncodedExample e;
    // CLS, SEP, header cells 0..1, body cell 2 with two tokens, body cell 3 with one token.
    e.cell_index = {-1, -1, 0, 1, 2, 2, 3};
    e.token_ids.assign(7, 0);
    e.attention_len = 7;
    e.n_cols = 2;
    e.kept_body_rows = 1;
    Matrix<double> hidden = Matrix<double>::Zero(7, 2);
    hidden(4, 0) = 1.0;
    hidden(5, 0) = 3.0;
    hidden(6, 0) = -0.5;
    CellHead<double> head{Matrix<double>::Zero(2, 1), Matrix<double>::Zero(1, 1)};
    head.w(0, 0) = 1.0;
    const auto out = cell_logits(head, hidden, e);
    REQUIRE(out.cells == std::vector<int>{2, 3});
    CHECK(out.probs[0] == doctest::Approx(nn::sigmoid(2.0)));
    CHECK(out.probs[1] == doctest::Approx(nn::sigmoid(-0.5)));

    head.w.setZero();
    head.b(0, 0) = 0.8;
    const auto flat = cell_logits(head, hidden, e);
    CHECK(flat.probs[0] == doctest::Approx(nn::sigmoid(0.8)));

    head.b.setZero();
    for (double p : cell_logits(head, hidden, e).probs) CHECK(p == 0.5);
}

TEST_CASE("weighted binary cross-entropy") {
    const std::vector<CellLabel> labels = {CellLabel::Relevant, CellLabel::Irrelevant};
    const std::vector<double> perfect = {1.0, 0.0};
    CHECK(weighted_bce_loss(perfect, labels, 1.0).value == 0.0);

    const std::vector<double> half = {0.5};
    const std::vector<CellLabel> rel = {CellLabel::Relevant};
    CHECK(std::abs(weighted_bce_loss(half, rel, 10.0).value - (-10.0 * std::log(0.5))) < 1e-9);
    CHECK(std::abs(weighted_bce_loss(half, rel, 10.0).value - 6.9315) < 1e-4);

    CellLabelGrid g{"s", Grid<CellLabel>(2, 2, CellLabel::Irrelevant)};
    g.labels(0, 0) = g.labels(0, 1) = CellLabel::Excluded;
    const std::vector<int> cells = {2, 3};
    CHECK(aligned_cell_labels(g, cells).size() == 2);
    g.labels(0, 1) = CellLabel::Relevant;
    CHECK_THROWS_AS(aligned_cell_labels(g, cells), ContractError);
}

TEST_CASE("train configuration") {
    const auto a = default_train_config(Task::Verdict);
    CHECK(a.phase1_epochs == 3);
    CHECK(a.phase2_epochs == 10);
    CHECK(a.batch_size == 8);
    CHECK(a.checkpoint_every == 100);
    CHECK(a.w_p == 10.0);
    const auto b = default_train_config(Task::Evidence);
    CHECK(b.checkpoint_every == 50);
    CHECK(b.selection_metric == "evidence_f1");

    auto c = a;
    set_train_field(c, "phase2_lr", "0.01");
    CHECK_THROWS_AS(c.validate(), ContractError);
    CHECK_THROWS_AS(set_train_field(c, "nope", "1"), Error);
    CHECK_THROWS_AS(set_train_field(c, "batch_size", "x"), Error);
    CHECK(TrainConfig::from_json(a.to_json()).to_json() == a.to_json());
}

TEST_CASE("templated statements name the verdict") {
    StatementRecord s{"s", "t", "X", Verdict::Refuted, {}};
    CHECK(templated(s).text == "Which cells refute \"X\"?");
}

namespace {

Split small_corpus(const std::string& profile, int tables) {
    auto p = corpus_profile(profile);
    p.n_tables = tables;
    p.shape.min_body_rows = 2;
    p.shape.max_body_rows = 3;
    p.shape.min_cols = 2;
    p.shape.max_cols = 3;
    return gen_corpus(p, 4);
}

TrainInputs small_run(Task task, const Split& s, const std::filesystem::path& dir) {
    TrainInputs in;
    in.task = task;
    in.train = &s.train;
    in.validation = &s.validation;
    in.config = default_train_config(task);
    in.config.phase1_epochs = 1;
    in.config.phase2_epochs = 1;
    in.config.checkpoint_every = 10;
    in.encoder.d_model = 16;
    in.encoder.n_heads = 2;
    in.encoder.ffn_dim = 32;
    in.encoder.n_layers = 1;
    in.run_dir = dir;
    return in;
}

}  // namespace

TEST_CASE("verdict training writes checkpoints, a log and the earliest best") {
    const auto split = small_corpus("verdict", 24);
    const auto dir = fixtures::scratch_dir("train-a");
    const auto r = train(small_run(Task::Verdict, split, dir / "run"));
    CHECK(std::filesystem::exists(r.best_checkpoint));
    CHECK(std::filesystem::exists(dir / "run" / "train_log.jsonl"));
    CHECK(std::filesystem::exists(dir / "run" / "best.json"));
    REQUIRE_FALSE(r.log.empty());
    double best = -1;
    long first_best = 0;
    for (const auto& e : r.log)
        if (e.metric > best) best = e.metric, first_best = e.step;
    CHECK(r.best_metric == best);
    CHECK(r.best_step == first_best);

    const auto m = load_model(r.best_checkpoint);
    CHECK(m.task == Task::Verdict);
    const auto preds = predict_verdict(m, split.test);
    CHECK(preds.size() == split.test.statements.size());

    SUBCASE("chaining from a checkpoint") {
        auto in = small_run(Task::Verdict, split, dir / "chain");
        in.init_from = r.best_checkpoint;
        const auto c = train(in);
        CHECK(load_model(c.best_checkpoint).vocab == m.vocab);

        auto mismatch = small_run(Task::Verdict, split, dir / "bad");
        mismatch.init_from = r.best_checkpoint;
        mismatch.encoder.d_model = 32;
        CHECK_THROWS_AS(train(mismatch), Error);
    }
    SUBCASE("identical seeds give identical logs") {
        const auto again = train(small_run(Task::Verdict, split, dir / "again"));
        CHECK(read_file(dir / "again" / "train_log.jsonl") == read_file(dir / "run" / "train_log.jsonl"));
    }
}

TEST_CASE("evidence training with every variant") {
    const auto split = small_corpus("evidence-mixed", 16);
    const auto dir = fixtures::scratch_dir("train-b");
    auto in = small_run(Task::Evidence, split, dir / "base");
    const auto r = train(in);
    const auto m = load_model(r.best_checkpoint);
    const auto preds = predict_cells(m, split.test);
    for (const auto& p : preds) {
        const auto& t = split.test.tables.at(p.table_id);
        CHECK(p.labels.labels.rows() == t.n_rows);
        CHECK(p.labels.labels.cols() == t.n_cols);
    }
    CHECK_FALSE(evaluate_evidence(split.test, preds).per_statement.empty());

    in.variant = Variant::Statement;
    in.run_dir = dir / "statement";
    CHECK(load_model(train(in).best_checkpoint).variant == Variant::Statement);

    in.variant = Variant::Separate;
    in.run_dir = dir / "separate";
    const auto sep = train_separate(in);
    const auto routed = route_separate(load_model(sep.entailed.best_checkpoint), load_model(sep.refuted.best_checkpoint),
                                       split.test);
    CHECK(routed.size() == preds.size());
}
