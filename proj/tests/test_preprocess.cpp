#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "tabfact/datagen.hpp"
#include "tabfact/preprocess.hpp"

using namespace tabfact;

namespace {

/// Random valid tiling: greedy placement of spans of random size, then 1x1 filler.
RawTable random_tiling(std::mt19937_64& rng, int rows, int cols) {
    const std::vector<std::string> words = {"", "", "A", "B", "x", " A ", "1", "2"};
    std::uniform_int_distribution<int> word(0, static_cast<int>(words.size()) - 1);
    std::uniform_int_distribution<int> span(1, 3);
    RawTable t{"fuzz", rows, cols, {}, {}, {}};
    Grid<char> used(rows, cols, 0);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (used(r, c)) continue;
            int rs = std::min(span(rng), rows - r);
            int cs = std::min(span(rng), cols - c);
            auto free_block = [&](int h, int w) {
                for (int i = 0; i < h; ++i)
                    for (int j = 0; j < w; ++j)
                        if (used(r + i, c + j)) return false;
                return true;
            };
            while (!free_block(1, cs)) --cs;
            while (!free_block(rs, cs)) --rs;
            for (int i = 0; i < rs; ++i)
                for (int j = 0; j < cs; ++j) used(r + i, c + j) = 1;
            t.cells.push_back({r, c, {words[static_cast<std::size_t>(word(rng))], rs, cs}});
        }
    return t;
}

}  // namespace

TEST_CASE("span expansion copies text into every covered position") {
    const auto t = expand_spans(fixtures::sample_table());
    CHECK(t.n_rows() == 8);
    CHECK(t.n_cols() == 5);
    CHECK(t.header_rows == 0);
    CHECK(t.grid(1, 1) == "English Language");
    CHECK(t.grid(1, 2) == "English Language");
    CHECK(t.span_origin(1, 1) == t.span_origin(1, 2));
    CHECK(t.grid(1, 3) == "English");
    CHECK(t.grid(1, 4) == "English");
    CHECK(t.grid(3, 0) == "AQA");
}

TEST_CASE("expansion of 1x1 tables is the identity") {
    const auto raw = fixtures::simple_table({{"a", "b"}, {"c", "d"}});
    const auto t = expand_spans(raw);
    CHECK(t.grid(0, 0) == "a");
    CHECK(t.grid(1, 1) == "d");
    const auto again = expand_spans(raw);
    CHECK(again.grid == t.grid);
    CHECK(again.span_origin == t.span_origin);
}

TEST_CASE("vertical span shares one origin") {
    RawTable raw{"t", 3, 2, {{0, 0, {"X", 3, 1}}, {0, 1, {"a", 1, 1}}, {1, 1, {"b", 1, 1}}, {2, 1, {"c", 1, 1}}}, {}, {}};
    const auto t = expand_spans(raw);
    for (int r = 0; r < 3; ++r) {
        CHECK(t.grid(r, 0) == "X");
        CHECK(t.span_origin(r, 0) == t.span_origin(0, 0));
    }
}

TEST_CASE("worked example: three header rows merged per column") {
    const auto t = expand_spans(fixtures::sample_table());
    const int h = predict_header_rows(t);
    CHECK(h == 3);
    const auto s = standardize_header(t, h);
    CHECK(s.n_rows() == 6);
    CHECK(s.header_rows == 1);
    CHECK(s.merged_header_rows == 3);
    CHECK(s.grid(0, 1) == "(1)\nEnglish Language\nFrequency");
    CHECK(s.grid(0, 2) == "(2)\nEnglish Language\nPercent");
    CHECK(s.grid(0, 3) == "(3)\nEnglish\nFrequency");
    CHECK(s.grid(0, 4) == "(4)\nEnglish\nPercent");
    CHECK(s.grid(0, 0).empty());
    CHECK(s.grid(1, 0) == "AQA");
    CHECK(s.grid(5, 1) == "392015");
}

TEST_CASE("distinct first row gives one header row") {
    const auto t = expand_spans(fixtures::simple_table({{"N", "a", "b"}, {"x", "1", "2"}, {"y", "3", "4"}}));
    CHECK(predict_header_rows(t) == 1);
}

TEST_CASE("repeated top-left text extends the header") {
    const auto t = expand_spans(fixtures::simple_table(
        {{"A", "B", "B"}, {"A", "B1", "B2"}, {"x", "1", "2"}, {"y", "3", "4"}}));
    CHECK(predict_header_rows(t) == 2);
}

TEST_CASE("adjacent equal header columns extend the header") {
    const auto t = expand_spans(fixtures::simple_table(
        {{"N", "G", "G"}, {"x", "a", "b"}, {"y", "1", "2"}, {"z", "3", "4"}}));
    CHECK(predict_header_rows(t) == 2);
}

TEST_CASE("empty top-left: only empty cells qualify") {
    const auto t = expand_spans(fixtures::simple_table({{"", "a", "b"}, {"", "c", "d"}, {"x", "1", "2"}}));
    CHECK(predict_header_rows(t) == 2);
}

TEST_CASE("header count is clamped to leave a body row") {
    const auto t = expand_spans(fixtures::simple_table({{"", "a", "a"}, {"", "b", "b"}}));
    CHECK(predict_header_rows(t) == 1);
    CHECK_THROWS_AS(predict_header_rows(expand_spans(fixtures::simple_table({{"a", "b"}}))), ContractError);
}

TEST_CASE("header prediction stays in range on random tilings") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> dim(2, 7);
    for (int i = 0; i < 2000; ++i) {
        const auto raw = random_tiling(rng, dim(rng), dim(rng));
        REQUIRE(validate_raw_table(raw).empty());
        const auto t = expand_spans(raw);
        CHECK(t.n_rows() == raw.n_rows);
        CHECK(t.n_cols() == raw.n_cols);
        const int h = predict_header_rows(t);
        REQUIRE(h >= 1);
        REQUIRE(h <= raw.n_rows - 1);
        const auto s = standardize_header(t, h);
        REQUIRE(s.n_rows() == raw.n_rows - h + 1);
        for (int r = h; r < raw.n_rows; ++r)
            for (int c = 0; c < raw.n_cols; ++c) REQUIRE(s.grid(r - h + 1, c) == t.grid(r, c));
    }
}

TEST_CASE("standardization") {
    SUBCASE("h = 1 only sets the header count") {
        const auto t = expand_spans(fixtures::simple_table({{"a", "b"}, {"c", "d"}}));
        const auto s = standardize_header(t, 1);
        CHECK(s.header_rows == 1);
        CHECK(s.grid == t.grid);
    }
    SUBCASE("a span contributes its text once") {
        RawTable raw{"t", 4, 2, {{0, 0, {"n", 3, 1}}, {0, 1, {"", 1, 1}}, {1, 1, {"X", 2, 1}}, {3, 0, {"r", 1, 1}},
                                 {3, 1, {"5", 1, 1}}}, {}, {}};
        const auto s = standardize_header(expand_spans(raw), 3);
        CHECK(s.grid(0, 1) == "X");
        CHECK(s.grid(0, 0) == "n");
    }
    SUBCASE("equal texts from different spans are both kept") {
        const auto s = standardize_header(expand_spans(fixtures::simple_table({{"X"}, {"X"}, {"1"}})), 2);
        CHECK(s.grid(0, 0) == "X\nX");
    }
    SUBCASE("out of range") {
        const auto t = expand_spans(fixtures::simple_table({{"a"}, {"b"}}));
        CHECK_THROWS_AS(standardize_header(t, 0), ContractError);
        CHECK_THROWS_AS(standardize_header(t, 2), ContractError);
    }
}

TEST_CASE("the generated header-rule suite is predicted exactly") {
    const auto suite = gen_header_suite(3, 20);
    const auto manifest = header_manifest(suite);
    CHECK(manifest.size() >= 80);
    for (const auto& [id, t] : suite.tables) CHECK_MESSAGE(predict_header_rows(expand_spans(t)) == manifest.at(id), id);
    const auto row = evaluate_header_predictions(suite, manifest, "suite");
    CHECK(row.n_tables == static_cast<int>(manifest.size()));
    CHECK(row.exact_match == row.n_tables);
    CHECK(row.within_one == row.n_tables);
    const auto tsv = format_header_eval({row});
    CHECK(tsv.find("100.00") != std::string::npos);
}

TEST_CASE("evidence labels are broadcast onto the body") {
    // Name column, then a value column whose rows 2-3 form one span; header of two rows.
    RawTable raw{"t", 4, 2,
                 {{0, 0, {"", 2, 1}}, {0, 1, {"G", 2, 1}}, {2, 0, {"a", 1, 1}}, {2, 1, {"7", 2, 1}}, {3, 0, {"b", 1, 1}}},
                 {}, {}};
    SingleCellTable t = expand_spans(raw);
    t.header_rows = 2;
    SUBCASE("relevant body span") {
        std::vector<CellLabel> labels(raw.cells.size(), CellLabel::Irrelevant);
        labels[3] = CellLabel::Relevant;
        const auto g = propagate_evidence_labels(labels, t, "s");
        CHECK(g.labels(2, 1) == CellLabel::Relevant);
        CHECK(g.labels(3, 1) == CellLabel::Relevant);
        CHECK(g.labels(2, 0) == CellLabel::Irrelevant);
        CHECK(g.labels(0, 1) == CellLabel::Excluded);
    }
    SUBCASE("all irrelevant") {
        const auto g = propagate_evidence_labels(std::vector<CellLabel>(raw.cells.size(), CellLabel::Irrelevant), t);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 2; ++c)
                CHECK(g.labels(r, c) == (r < 2 ? CellLabel::Excluded : CellLabel::Irrelevant));
    }
    SUBCASE("header span labels are dropped") {
        std::vector<CellLabel> labels(raw.cells.size(), CellLabel::Irrelevant);
        labels[1] = CellLabel::Relevant;
        const auto g = propagate_evidence_labels(labels, t);
        CHECK(g.labels(0, 1) == CellLabel::Excluded);
        CHECK(g.labels(1, 1) == CellLabel::Excluded);
    }
    SUBCASE("unknown span index") {
        CHECK_THROWS_AS(propagate_evidence_labels(std::vector<CellLabel>(2, CellLabel::Irrelevant), t), ContractError);
    }
}

TEST_CASE("evidence anchors become span labels") {
    const auto raw = fixtures::sample_table();
    const auto& s = fixtures::sample_a1().statements[1];
    const auto labels = span_labels_from_evidence(s, raw);
    int relevant = 0;
    for (auto l : labels) relevant += l == CellLabel::Relevant;
    CHECK(relevant == 7);
}
