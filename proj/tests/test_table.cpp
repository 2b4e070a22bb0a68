#include <doctest.h>

#include "fixtures.hpp"
#include "tabfact/table.hpp"

using namespace tabfact;

TEST_CASE("one cell tiles a 1x1 grid") {
    RawTable t{"t", 1, 1, {{0, 0, {"x", 1, 1}}}, {}, {}};
    CHECK(validate_raw_table(t).empty());
}

TEST_CASE("a full span tiles a 2x2 grid") {
    RawTable t{"t", 2, 2, {{0, 0, {"x", 2, 2}}}, {}, {}};
    CHECK(validate_raw_table(t).empty());
    const auto cov = coverage_map(t);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) CHECK(cov(r, c) == 0);
}

TEST_CASE("uncovered positions are listed individually") {
    RawTable t{"t", 2, 2, {{0, 0, {"x", 1, 1}}}, {}, {}};
    const auto v = validate_raw_table(t);
    REQUIRE(v.size() == 3);
    CoordSet at;
    for (const auto& x : v) {
        CHECK(x.kind == Violation::Kind::Uncovered);
        at.insert(x.at);
    }
    CHECK(at == CoordSet{{0, 1}, {1, 0}, {1, 1}});
    CHECK_THROWS_AS(require_valid(t), ContractError);
}

TEST_CASE("overlap, out-of-bounds and bad spans are reported") {
    RawTable overlap{"t", 1, 2, {{0, 0, {"a", 1, 2}}, {0, 1, {"b", 1, 1}}}, {}, {}};
    bool saw_overlap = false;
    for (const auto& v : validate_raw_table(overlap)) saw_overlap |= v.kind == Violation::Kind::Overlap;
    CHECK(saw_overlap);

    RawTable oob{"t", 1, 1, {{0, 0, {"a", 1, 2}}}, {}, {}};
    bool saw_oob = false;
    for (const auto& v : validate_raw_table(oob)) saw_oob |= v.kind == Violation::Kind::OutOfBounds;
    CHECK(saw_oob);

    RawTable zero{"t", 1, 1, {{0, 0, {"a", 0, 1}}}, {}, {}};
    bool saw_bad = false;
    for (const auto& v : validate_raw_table(zero)) saw_bad |= v.kind == Violation::Kind::BadSpan;
    CHECK(saw_bad);
}

TEST_CASE("the published example table is a valid tiling") {
    const auto t = fixtures::sample_table();
    CHECK(t.n_rows == 8);
    CHECK(t.n_cols == 5);
    CHECK(validate_raw_table(t).empty());
}

TEST_CASE("emptiness trims ASCII whitespace only") {
    CHECK(is_empty_cell(""));
    CHECK(is_empty_cell(" \t\r\n"));
    CHECK_FALSE(is_empty_cell(" x "));
    CHECK(trim("  a b \n") == "a b");
}

TEST_CASE("verdict names round trip") {
    for (auto v : {Verdict::Entailed, Verdict::Refuted, Verdict::Unknown}) CHECK(parse_verdict(to_string(v)) == v);
    CHECK(parse_verdict("E") == Verdict::Entailed);
    CHECK(parse_verdict("Refuted") == Verdict::Refuted);
    CHECK_THROWS(parse_verdict("maybe"));
}

TEST_CASE("statement evidence must lie inside the table") {
    const auto t = fixtures::simple_table({{"a", "b"}, {"c", "d"}});
    StatementRecord s{"s", "t", "x", Verdict::Entailed, {{{1, 1}}}};
    CHECK_NOTHROW(validate_statement(s, t));
    s.evidence_variants = {{{2, 0}}};
    CHECK_THROWS_AS(validate_statement(s, t), Error);
    StatementRecord u{"u", "t", "x", Verdict::Unknown, {{{0, 0}}}};
    CHECK_THROWS_AS(validate_statement(u, t), Error);
}

TEST_CASE("grid indexing is bounds checked") {
    Grid<int> g(2, 3, 7);
    CHECK(g(1, 2) == 7);
    CHECK_THROWS_AS(g(2, 0), ContractError);
}
