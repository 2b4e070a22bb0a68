#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "tabfact/postprocess.hpp"
#include "tabfact/preprocess.hpp"

using namespace tabfact;

namespace {

CellLabelGrid body_grid(const SingleCellTable& t) {
    CellLabelGrid g{"s", Grid<CellLabel>(t.n_rows(), t.n_cols(), CellLabel::Irrelevant)};
    for (int c = 0; c < t.n_cols(); ++c) g.labels(0, c) = CellLabel::Excluded;
    return g;
}

}  // namespace

TEST_CASE("header relevance follows body relevance per column") {
    const auto t = single_header(expand_spans(fixtures::simple_table({{"n", "a", "b"}, {"x", "1", "2"}, {"y", "3", "4"}})));
    SUBCASE("one relevant cell") {
        auto g = body_grid(t);
        g.labels(2, 1) = CellLabel::Relevant;
        const auto out = propagate_header_relevance(g, t);
        CHECK(out.labels(0, 1) == CellLabel::Relevant);
        CHECK(out.labels(0, 0) == CellLabel::Irrelevant);
        CHECK(out.labels(0, 2) == CellLabel::Irrelevant);
        CHECK(out.labels(2, 1) == CellLabel::Relevant);
    }
    SUBCASE("nothing relevant") {
        const auto out = propagate_header_relevance(body_grid(t), t);
        for (int c = 0; c < 3; ++c) CHECK(out.labels(0, c) == CellLabel::Irrelevant);
    }
    SUBCASE("everything relevant") {
        auto g = body_grid(t);
        for (int r = 1; r < 3; ++r)
            for (int c = 0; c < 3; ++c) g.labels(r, c) = CellLabel::Relevant;
        const auto out = propagate_header_relevance(g, t);
        for (int c = 0; c < 3; ++c) CHECK(out.labels(0, c) == CellLabel::Relevant);
    }
    SUBCASE("shape mismatch") {
        CellLabelGrid g{"s", Grid<CellLabel>(2, 2, CellLabel::Irrelevant)};
        CHECK_THROWS_AS(propagate_header_relevance(g, t), ContractError);
    }
}

TEST_CASE("span merging uses the any-rule") {
    RawTable raw{"t", 3, 2, {{0, 0, {"n", 1, 1}}, {0, 1, {"v", 1, 1}}, {1, 0, {"a", 2, 1}}, {1, 1, {"1", 1, 1}}, {2, 1, {"2", 1, 1}}},
                 {}, {}};
    const auto t = single_header(expand_spans(raw));
    auto g = body_grid(t);
    g.labels(1, 0) = CellLabel::Relevant;
    auto labels = merge_to_spans(g, t, raw);
    REQUIRE(labels.size() == raw.cells.size());
    CHECK(labels[2] == CellLabel::Relevant);
    CHECK(labels[3] == CellLabel::Irrelevant);

    const auto none = merge_to_spans(body_grid(t), t, raw);
    CHECK(none[2] == CellLabel::Irrelevant);

    const auto grid = spans_to_raw_grid(labels, raw, "s");
    CHECK(grid.labels(1, 0) == CellLabel::Relevant);
    CHECK(grid.labels(2, 0) == CellLabel::Relevant);
}

TEST_CASE("1x1 tables pass labels through") {
    const auto raw = fixtures::simple_table({{"n", "v"}, {"a", "1"}, {"b", "2"}});
    const auto t = single_header(expand_spans(raw));
    auto g = body_grid(t);
    g.labels(2, 1) = CellLabel::Relevant;
    const auto labels = merge_to_spans(g, t, raw);
    for (std::size_t i = 0; i < raw.cells.size(); ++i)
        CHECK(labels[i] == (raw.cells[i].row == 2 && raw.cells[i].col == 1 ? CellLabel::Relevant : CellLabel::Irrelevant));
}

TEST_CASE("merged header relevance reaches every original header row") {
    const auto raw = fixtures::sample_table();
    const auto t = prepare_table(raw);
    REQUIRE(t.merged_header_rows == 3);
    auto g = body_grid(t);
    g.labels(1, 4) = CellLabel::Relevant;  // 55.7
    g.labels(1, 0) = CellLabel::Relevant;  // AQA
    const auto labels = merge_to_spans(propagate_header_relevance(g, t), t, raw);
    const auto grid = spans_to_raw_grid(labels, raw, "s");
    CHECK(grid.labels(0, 4) == CellLabel::Relevant);
    CHECK(grid.labels(1, 4) == CellLabel::Relevant);
    CHECK(grid.labels(1, 3) == CellLabel::Relevant);  // "English" spans columns 3-4
    CHECK(grid.labels(2, 4) == CellLabel::Relevant);
    CHECK(grid.labels(2, 3) == CellLabel::Irrelevant);
    CHECK(grid.labels(0, 0) == CellLabel::Relevant);
    CHECK(grid.labels(3, 4) == CellLabel::Relevant);
    CHECK(grid.labels(4, 4) == CellLabel::Irrelevant);
}

TEST_CASE("post-processing is monotone") {
    const auto raw = fixtures::sample_table();
    const auto t = prepare_table(raw);
    std::mt19937_64 rng(5);
    std::bernoulli_distribution coin(0.2);
    std::uniform_int_distribution<int> row(1, t.n_rows() - 1), col(0, t.n_cols() - 1);
    for (int i = 0; i < 200; ++i) {
        auto g = body_grid(t);
        for (int r = 1; r < t.n_rows(); ++r)
            for (int c = 0; c < t.n_cols(); ++c)
                if (coin(rng)) g.labels(r, c) = CellLabel::Relevant;
        auto more = g;
        more.labels(row(rng), col(rng)) = CellLabel::Relevant;
        const auto a = merge_to_spans(propagate_header_relevance(g, t), t, raw);
        const auto b = merge_to_spans(propagate_header_relevance(more, t), t, raw);
        REQUIRE(a.size() == raw.cells.size());
        for (std::size_t k = 0; k < a.size(); ++k)
            if (a[k] == CellLabel::Relevant) CHECK(b[k] == CellLabel::Relevant);
    }
}
