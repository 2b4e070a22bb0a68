#include <doctest.h>

#include <algorithm>
#include <set>

#include "tabfact/datagen.hpp"
#include "tabfact/preprocess.hpp"

using namespace tabfact;

namespace {

/// Independent truth and witness evaluation of a claim over the raw table.
struct Oracle {
    const RawTable& t;
    int h;
    Grid<int> cover;

    explicit Oracle(const RawTable& table) : t(table), h(generated_header_rows(table)), cover(coverage_map(table)) {}

    int value(int r, int c) const { return std::stoi(t.cells[static_cast<std::size_t>(cover(r, c))].cell.text); }
    Coord anchor(int r, int c) const {
        const auto& a = t.cells[static_cast<std::size_t>(cover(r, c))];
        return {a.row, a.col};
    }
    CoordSet header(int c) const {
        CoordSet s;
        for (int r = 0; r < h; ++r) s.insert(anchor(r, c));
        return s;
    }
    std::vector<int> scope(const Claim& cl) const {
        std::vector<int> rows;
        for (int r = h; r < t.n_rows; ++r)
            if (!(cl.kind == ClaimKind::MaxExcluding && r == cl.row)) rows.push_back(r);
        return rows;
    }

    bool truth(const Claim& cl) const {
        const int c = cl.column;
        switch (cl.kind) {
            case ClaimKind::Max:
            case ClaimKind::MaxExcluding:
            case ClaimKind::Min: {
                // The claim holds iff some row attains the value and no row beats it.
                bool attained = false;
                for (int r : scope(cl)) {
                    const int x = value(r, c);
                    attained |= x == cl.value;
                    if (cl.kind == ClaimKind::Min ? x < cl.value : x > cl.value) return false;
                }
                return attained;
            }
            case ClaimKind::Lookup: return value(cl.row, c) == cl.value;
            case ClaimKind::Compare: return value(cl.row, c) > value(cl.row_b, c);
        }
        return false;
    }

    /// Minimal witness sets in lookup mode: header of the column plus one deciding cell.
    std::set<CoordSet> lookup_variants(const Claim& cl) const {
        const int c = cl.column;
        std::set<CoordSet> out;
        if (cl.kind == ClaimKind::Lookup) {
            auto s = header(c);
            s.insert({cl.row, c});
            out.insert(s);
        } else if (cl.kind == ClaimKind::Compare) {
            auto s = header(c);
            s.insert({cl.row, c});
            s.insert({cl.row_b, c});
            out.insert(s);
        } else {
            const auto rows = scope(cl);
            for (int r : rows) {
                bool extreme = true;
                for (int o : rows)
                    if (cl.kind == ClaimKind::Min ? value(o, c) < value(r, c) : value(o, c) > value(r, c)) extreme = false;
                if (!extreme) continue;
                auto s = header(c);
                s.insert({r, c});
                out.insert(s);
            }
        }
        return out;
    }
};

CorpusProfile profile_with(EvidenceMode mode) {
    auto p = corpus_profile("verdict");
    p.mix.evidence = mode;
    p.mix.argument_perturbation = 0.5;
    p.n_tables = 60;
    return p;
}

}  // namespace

TEST_CASE("tables are deterministic per seed") {
    TableShape s;
    CHECK(gen_table(4, s, "a") == gen_table(4, s, "a"));
    CHECK_FALSE(gen_table(4, s, "a") == gen_table(5, s, "a"));
    const auto t = gen_table(4, s, "a");
    CHECK(validate_raw_table(t).empty());
    CHECK(t.n_rows >= s.min_body_rows + 1);
    CHECK(t.n_rows <= s.max_body_rows + 1);
}

TEST_CASE("header cases") {
    SUBCASE("1b repeats the top-left value through a row span") {
        TableShape s;
        s.header_case = HeaderCase::OneB;
        s.header_rows = 3;
        const auto t = gen_table(2, s, "hdr-1b-h3-0000");
        const auto cov = coverage_map(t);
        const auto& tl = t.cells[static_cast<std::size_t>(cov(0, 0))];
        CHECK(tl.cell.row_span == 3);
        CHECK(expected_header_rows(t.table_id) == 3);
        CHECK(predict_header_rows(expand_spans(t)) == 3);
    }
    SUBCASE("2 has an adjacent duplicated pair over distinct sub-headers") {
        TableShape s;
        s.header_case = HeaderCase::Two;
        s.header_rows = 2;
        const auto x = expand_spans(gen_table(3, s, "hdr-2-h2-0000"));
        bool pair = false;
        for (int c = 0; c + 1 < x.n_cols(); ++c)
            pair |= x.grid(0, c) == x.grid(0, c + 1) && x.grid(1, c) != x.grid(1, c + 1);
        CHECK(pair);
        CHECK(predict_header_rows(x) == 2);
    }
    SUBCASE("suite covers every case at least twenty times") {
        const auto suite = gen_header_suite(1, 20);
        std::map<std::string, int> per_case;
        for (const auto& [id, t] : suite.tables) ++per_case[id.substr(0, id.find("-h", 4))];
        CHECK(per_case.size() == 4);
        for (const auto& [k, n] : per_case) CHECK_MESSAGE(n >= 20, k);
    }
}

TEST_CASE("generated statements match a brute-force evaluator") {
    for (auto mode : {EvidenceMode::Lookup, EvidenceMode::Full}) {
        const auto p = profile_with(mode);
        std::mt19937_64 rng(17);
        int checked = 0, multi = 0;
        for (int i = 0; i < p.n_tables; ++i) {
            auto shape = p.shape;
            if (i % 5 == 0) {
                shape.header_case = HeaderCase::OneA;
                shape.header_rows = 2;
            }
            const std::string id = i % 5 == 0 ? "hdr-1a-h2-" + std::to_string(i) : "t" + std::to_string(i);
            auto t = gen_table(static_cast<std::uint64_t>(i), shape, id);
            if (i % 7 == 0) {
                // Force a duplicated maximum in column 1.
                const Oracle o(t);
                int top = o.h;
                for (int r = o.h; r < t.n_rows; ++r)
                    if (o.value(r, 1) > o.value(top, 1)) top = r;
                const int other = top == o.h ? o.h + 1 : o.h;
                t.cells[static_cast<std::size_t>(o.cover(other, 1))].cell.text = std::to_string(o.value(top, 1));
            }
            const Oracle o(t);
            for (const auto& g : gen_statements(t, rng, p.mix)) {
                const auto& s = g.record;
                CHECK_MESSAGE(o.truth(g.claim) == (s.verdict == Verdict::Entailed), s.text);
                CHECK(s.text.find(std::string(trim(t.cells[static_cast<std::size_t>(o.cover(o.h - 1, g.claim.column))].cell.text))) !=
                      std::string::npos);
                validate_statement(s, t);
                REQUIRE_FALSE(s.evidence_variants.empty());
                if (mode == EvidenceMode::Lookup) {
                    const std::set<CoordSet> got(s.evidence_variants.begin(), s.evidence_variants.end());
                    CHECK_MESSAGE(got == o.lookup_variants(g.claim), s.text);
                    multi += got.size() > 1;
                } else {
                    // Full evidence contains every lookup witness.
                    REQUIRE(s.evidence_variants.size() == 1);
                    for (const auto& w : o.lookup_variants(g.claim))
                        for (const auto& c : w) CHECK(s.evidence_variants[0].contains(c));
                }
                ++checked;
            }
        }
        CHECK(checked > 100);
        if (mode == EvidenceMode::Lookup) CHECK(multi > 0);
    }
}

TEST_CASE("refuting values are absent from the table unless an argument is perturbed") {
    auto p = corpus_profile("verdict");
    p.mix.argument_perturbation = 0.0;
    p.mix.refute_fraction = 1.0;
    std::mt19937_64 rng(2);
    for (int i = 0; i < 30; ++i) {
        const auto t = gen_table(static_cast<std::uint64_t>(i), p.shape, "t");
        const Oracle o(t);
        std::set<int> present;
        for (int r = o.h; r < t.n_rows; ++r)
            for (int c = 1; c < t.n_cols; ++c) present.insert(o.value(r, c));
        for (const auto& g : gen_statements(t, rng, p.mix)) {
            CHECK(g.record.verdict == Verdict::Refuted);
            if (g.claim.kind != ClaimKind::Compare) CHECK_FALSE(present.contains(g.claim.value));
        }
    }
}

TEST_CASE("unknown statements go to other tables") {
    std::map<std::string, RawTable> tables;
    tables["a"] = gen_table(1, {}, "a");
    tables["b"] = gen_table(2, {}, "b");
    std::mt19937_64 rng(1);
    const std::vector<StatementRecord> one = {{"s", "a", "x", Verdict::Entailed, {{{1, 1}}}}};
    const auto u = make_unknowns(one, tables, rng);
    REQUIRE(u.size() == 1);
    CHECK(u[0].table_id == "b");
    CHECK(u[0].verdict == Verdict::Unknown);
    CHECK(u[0].evidence_variants.empty());

    for (int i = 2; i < 8; ++i) tables["t" + std::to_string(i)] = gen_table(static_cast<std::uint64_t>(i), {}, "t" + std::to_string(i));
    std::vector<StatementRecord> many;
    for (int i = 0; i < 200; ++i) many.push_back({"s" + std::to_string(i), i % 2 ? "a" : "t3", "x", Verdict::Refuted, {}});
    const auto us = make_unknowns(many, tables, rng);
    CHECK(us.size() == many.size());
    for (std::size_t i = 0; i < us.size(); ++i) CHECK(us[i].table_id != many[i].table_id);

    std::map<std::string, RawTable> lone{{"a", tables["a"]}};
    CHECK_THROWS_AS(make_unknowns(one, lone, rng), ContractError);
}

TEST_CASE("splits are by table and deterministic") {
    auto p = corpus_profile("verdict");
    p.n_tables = 40;
    const auto a = gen_corpus(p, 9);
    const auto b = gen_corpus(p, 9);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);
    std::set<std::string> seen;
    for (const auto* d : {&a.train, &a.validation, &a.test})
        for (const auto& [id, t] : d->tables) CHECK(seen.insert(id).second);
    for (const auto* d : {&a.train, &a.validation, &a.test})
        for (const auto& s : d->statements) {
            CHECK(d->tables.contains(s.table_id));
            if (s.verdict == Verdict::Unknown) CHECK(s.evidence_variants.empty());
        }

    Dataset all;
    for (const auto& [id, t] : a.train.tables) all.tables[id] = t;
    all.statements = a.train.statements;
    const auto whole = split_dataset(all, {1, 0, 0}, 3);
    CHECK(whole.train.tables.size() == all.tables.size());
    CHECK(whole.test.tables.empty());
    CHECK_THROWS_AS(split_dataset(all, {0.5, 0.2, 0.2}, 3), Error);
}
