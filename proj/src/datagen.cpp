#include "tabfact/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <regex>
#include <set>

namespace tabfact {

namespace {

const std::vector<std::string> kColumnWords = {
    "Goals",     "Points",   "Wins",      "Losses",   "Draws",     "Assists",   "Height",    "Weight",
    "Speed",     "Price",    "Sales",     "Revenue",  "Profit",    "Cost",      "Score",     "Rating",
    "Votes",     "Seats",    "Members",   "Visitors", "Games",     "Laps",      "Titles",    "Medals",
    "Rebounds",  "Steals",   "Blocks",    "Saves",    "Shots",     "Passes",    "Tackles",   "Fouls",
    "Cards",     "Minutes",  "Hours",     "Days",     "Weeks",     "Months",    "Years",     "Age",
    "Depth",     "Width",    "Length",    "Area",     "Volume",    "Mass",      "Density",   "Pressure",
    "Voltage",   "Current",  "Power",     "Energy",   "Torque",    "Range",     "Capacity",  "Yield",
    "Output",    "Input",    "Stock",     "Orders",   "Returns",   "Refunds",   "Clicks",    "Views",
    "Likes",     "Shares",   "Comments",  "Replies",  "Downloads", "Installs",  "Users",     "Sessions",
    "Errors",    "Warnings", "Failures",  "Repairs",  "Defects",   "Batches",   "Shipments", "Crates",
    "Tickets",   "Bookings", "Flights",   "Trips",    "Routes",    "Stops",     "Stations",  "Platforms",
    "Students",  "Teachers", "Classes",   "Courses",  "Exams",     "Grades",    "Credits",   "Awards",
    "Patients",  "Doctors",  "Nurses",    "Beds",     "Visits",    "Tests",     "Doses",     "Trials",
    "Apples",    "Pears",    "Plums",     "Cherries", "Grapes",    "Melons",    "Lemons",    "Limes",
    "Bricks",    "Tiles",    "Panels",    "Beams",    "Rivets",    "Bolts",     "Nails",     "Screws",
};

const std::vector<std::string> kRowNames = {
    "Avalon",   "Brixton",  "Calder",   "Dunmore",  "Elmira",   "Farley",   "Garnet",   "Halden",   "Ingram",
    "Jasper",   "Kendal",   "Linden",   "Marlow",   "Norwood",  "Oakley",   "Preston",  "Quincy",   "Redmond",
    "Selby",    "Thornton", "Upton",    "Vernon",   "Walden",   "Yardley",  "Zeller",   "Ashby",    "Belmont",
    "Carver",   "Denton",   "Easton",   "Fenwick",  "Glenn",    "Hadley",   "Irvine",   "Jarrow",   "Keswick",
    "Lowell",   "Milton",   "Newport",  "Orwell",   "Paxton",   "Radley",   "Sutton",   "Tilbury",  "Ulster",
    "Valen",    "Wexford",  "Yarrow",   "Alder",    "Birch",    "Cedar",    "Dogwood",  "Ebony",    "Fir",
    "Hawthorn", "Juniper",  "Larch",    "Maple",    "Nutmeg",   "Olive",    "Pine",     "Rowan",    "Spruce",
    "Tamarack", "Willow",   "Amber",    "Beryl",    "Coral",    "Diamond",  "Emerald",  "Flint",    "Gypsum",
    "Jade",     "Kyanite",  "Lapis",    "Marble",   "Onyx",     "Pearl",    "Quartz",   "Ruby",     "Slate",
    "Topaz",    "Umber",    "Zircon",   "Albatross", "Bison",   "Cougar",   "Dingo",    "Egret",    "Falcon",
    "Gazelle",  "Heron",    "Ibis",     "Jackal",   "Koala",    "Lemur",    "Marmot",   "Narwhal",  "Ocelot",
    "Panther",  "Raven",    "Stork",    "Tapir",    "Viper",    "Walrus",   "Yak",      "Zebra",    "Aurora",
    "Borealis", "Comet",    "Drift",    "Eclipse",  "Fjord",    "Glacier",  "Harbor",   "Island",   "Jetty",
    "Knoll",    "Lagoon",   "Mesa",     "Nebula",   "Oasis",    "Prairie",  "Quarry",   "Ridge",    "Summit",
    "Tundra",   "Valley",   "Wharf",    "Zenith",
};

const std::vector<std::string> kNameHeaders = {"Name",   "Team",  "Player", "Country", "City",
                                               "Region", "Club",  "Model",  "Brand",   "School"};

const std::vector<std::string> kGroupWords = {
    "Season",  "Results", "Totals",  "Home",    "Away",    "Stats",   "Round",   "Phase",   "Period",  "Block",
    "Series",  "Group",   "Summary", "Overall", "Regular", "Playoff", "First",   "Second",  "Third",   "Fourth",
    "Spring",  "Summer",  "Autumn",  "Winter",  "North",   "South",   "East",    "West",    "Central", "Upper",
    "Lower",   "Inner",   "Outer",   "Early",   "Late",    "Annual",  "Monthly", "Daily",   "Local",   "Global",
    "Primary", "Backup",  "Actual",  "Planned", "Target",  "Budget",  "Measured", "Derived", "Nominal", "Peak",
};

template <typename T>
std::vector<T> sample(const std::vector<T>& pool, std::size_t k, std::mt19937_64& rng) {
    if (k > pool.size()) throw ContractError("datagen: word pool too small");
    std::vector<T> out;
    std::ranges::sample(pool, std::back_inserter(out), static_cast<std::ptrdiff_t>(k), rng);
    std::ranges::shuffle(out, rng);
    return out;
}

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool coin(std::mt19937_64& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

void add_cell(RawTable& t, int r, int c, std::string text, int rs = 1, int cs = 1) {
    t.cells.push_back({r, c, {std::move(text), rs, cs}});
}

void add_header(RawTable& t, HeaderCase hc, int h, const std::string& name_header,
                const std::vector<std::string>& leaves, std::mt19937_64& rng) {
    const int n_cols = static_cast<int>(leaves.size()) + 1;
    if (hc == HeaderCase::None) {
        add_cell(t, 0, 0, name_header);
        for (int c = 1; c < n_cols; ++c) add_cell(t, 0, c, leaves[static_cast<std::size_t>(c - 1)]);
        return;
    }
    auto words = sample(kGroupWords, static_cast<std::size_t>(h * n_cols), rng);
    std::size_t next = 0;
    auto word = [&] { return words.at(next++); };

    // Column 0.
    switch (hc) {
        case HeaderCase::OneA:
            if (coin(rng, 0.5)) {
                add_cell(t, 0, 0, "", h, 1);
            } else {
                for (int r = 0; r < h; ++r) add_cell(t, r, 0, "");
            }
            break;
        case HeaderCase::OneB: add_cell(t, 0, 0, name_header, h, 1); break;
        case HeaderCase::OneC:
            add_cell(t, 0, 0, name_header);
            for (int r = 1; r < h; ++r) add_cell(t, r, 0, "");
            break;
        case HeaderCase::Two:
            for (int r = 0; r + 1 < h; ++r) add_cell(t, r, 0, word());
            add_cell(t, h - 1, 0, name_header);
            break;
        case HeaderCase::None: break;
    }

    // Upper levels over the value columns.
    int pair_start = -1;
    if (hc == HeaderCase::Two) pair_start = uniform(rng, 1, n_cols - 2);
    for (int r = 0; r + 1 < h; ++r) {
        int c = 1;
        while (c < n_cols) {
            bool wide;
            if (hc == HeaderCase::Two) {
                wide = c == pair_start;
            } else {
                wide = c + 1 < n_cols && coin(rng, 0.5);
            }
            add_cell(t, r, c, word(), 1, wide ? 2 : 1);
            c += wide ? 2 : 1;
        }
    }
    for (int c = 1; c < n_cols; ++c) add_cell(t, h - 1, c, leaves[static_cast<std::size_t>(c - 1)]);
}

struct TableView {
    const RawTable& t;
    Grid<int> cover;
    int h;

    explicit TableView(const RawTable& table) : t(table), cover(coverage_map(table)), h(generated_header_rows(table)) {}

    [[nodiscard]] const std::string& text(int r, int c) const {
        return t.cells.at(static_cast<std::size_t>(cover(r, c))).cell.text;
    }
    [[nodiscard]] Coord anchor(int r, int c) const {
        const auto& a = t.cells.at(static_cast<std::size_t>(cover(r, c)));
        return {a.row, a.col};
    }
    [[nodiscard]] int value(int r, int c) const {
        const auto v = cell_value(t, r, c);
        if (!v) throw ContractError("table '" + t.table_id + "': cell (" + std::to_string(r) + "," + std::to_string(c) +
                                    ") is not numeric");
        return *v;
    }
    [[nodiscard]] std::vector<int> body_rows() const {
        std::vector<int> rows(static_cast<std::size_t>(t.n_rows - h));
        std::iota(rows.begin(), rows.end(), h);
        return rows;
    }
    [[nodiscard]] CoordSet header_anchors(int c) const {
        CoordSet s;
        for (int r = 0; r < h; ++r) s.insert(anchor(r, c));
        return s;
    }
};

std::string sentence_for(const Claim& cl, const TableView& v) {
    const std::string& col = v.text(v.h - 1, cl.column);
    switch (cl.kind) {
        case ClaimKind::Max: return "The highest " + col + " is " + std::to_string(cl.value) + ".";
        case ClaimKind::Min: return "The lowest " + col + " is " + std::to_string(cl.value) + ".";
        case ClaimKind::MaxExcluding:
            return "The highest " + col + ", not counting " + v.text(cl.row, 0) + ", is " + std::to_string(cl.value) +
                   ".";
        case ClaimKind::Lookup:
            return "The " + col + " of " + v.text(cl.row, 0) + " is " + std::to_string(cl.value) + ".";
        case ClaimKind::Compare:
            return v.text(cl.row, 0) + " has a higher " + col + " than " + v.text(cl.row_b, 0) + ".";
    }
    return {};
}

}  // namespace

std::string_view to_string(HeaderCase c) {
    switch (c) {
        case HeaderCase::None: return "none";
        case HeaderCase::OneA: return "1a";
        case HeaderCase::OneB: return "1b";
        case HeaderCase::OneC: return "1c";
        case HeaderCase::Two: return "2";
    }
    return "?";
}

HeaderCase parse_header_case(std::string_view s) {
    for (auto c : {HeaderCase::None, HeaderCase::OneA, HeaderCase::OneB, HeaderCase::OneC, HeaderCase::Two}) {
        if (to_string(c) == s) return c;
    }
    throw Error("unknown header case '" + std::string(s) + "' (expected none, 1a, 1b, 1c or 2)");
}

std::string_view to_string(ClaimKind k) {
    switch (k) {
        case ClaimKind::Max: return "max";
        case ClaimKind::Min: return "min";
        case ClaimKind::MaxExcluding: return "max-excluding";
        case ClaimKind::Lookup: return "lookup";
        case ClaimKind::Compare: return "compare";
    }
    return "?";
}

ClaimKind parse_claim_kind(std::string_view s) {
    for (int i = 0; i < kNumClaimKinds; ++i) {
        if (to_string(static_cast<ClaimKind>(i)) == s) return static_cast<ClaimKind>(i);
    }
    throw Error("unknown statement template '" + std::string(s) + "'");
}

RawTable gen_table(std::uint64_t seed, const TableShape& shape, const std::string& table_id) {
    if (shape.min_body_rows < 1 || shape.max_body_rows < shape.min_body_rows || shape.min_cols < 2 ||
        shape.max_cols < shape.min_cols || shape.value_max < shape.value_min) {
        throw ContractError("gen_table: inconsistent shape bounds");
    }
    const bool multi = shape.header_case != HeaderCase::None;
    if (multi && shape.header_rows < 2) throw ContractError("gen_table: header cases need at least 2 header rows");
    if (shape.header_case == HeaderCase::Two && shape.min_cols < 3)
        throw ContractError("gen_table: header case 2 needs at least 3 columns");

    std::mt19937_64 rng(seed);
    const int body = uniform(rng, shape.min_body_rows, shape.max_body_rows);
    const int n_cols = uniform(rng, shape.min_cols, shape.max_cols);
    const int h = multi ? shape.header_rows : 1;

    RawTable t;
    t.table_id = table_id;
    t.n_rows = h + body;
    t.n_cols = n_cols;
    const auto name_header = sample(kNameHeaders, 1, rng).front();
    const auto leaves = sample(kColumnWords, static_cast<std::size_t>(n_cols - 1), rng);
    add_header(t, shape.header_case, h, name_header, leaves, rng);
    const auto names = sample(kRowNames, static_cast<std::size_t>(body), rng);
    for (int r = 0; r < body; ++r) {
        add_cell(t, h + r, 0, names[static_cast<std::size_t>(r)]);
        for (int c = 1; c < n_cols; ++c) add_cell(t, h + r, c, std::to_string(uniform(rng, shape.value_min, shape.value_max)));
    }
    require_valid(t);
    return t;
}

std::optional<int> expected_header_rows(const std::string& table_id) {
    static const std::regex re("^hdr-[0-9a-z]+-h([0-9]+)-");
    std::smatch m;
    if (std::regex_search(table_id, m, re)) return std::stoi(m[1].str());
    return std::nullopt;
}

int generated_header_rows(const RawTable& t) { return expected_header_rows(t.table_id).value_or(1); }

std::optional<int> cell_value(const RawTable& t, int row, int col) {
    const Grid<int> cover = coverage_map(t);
    const std::string text(trim(t.cells.at(static_cast<std::size_t>(cover(row, col))).cell.text));
    if (text.empty() || text.size() > 9) return std::nullopt;
    if (!std::ranges::all_of(text, [](char ch) { return ch >= '0' && ch <= '9'; })) return std::nullopt;
    return std::stoi(text);
}

std::vector<GeneratedStatement> gen_statements(const RawTable& t, std::mt19937_64& rng, const StatementMix& mix) {
    const TableView v(t);
    const auto rows = v.body_rows();
    if (rows.empty() || t.n_cols < 2) throw ContractError("gen_statements: table '" + t.table_id + "' has no body");

    std::set<int> present;
    for (int r : rows)
        for (int c = 1; c < t.n_cols; ++c) present.insert(v.value(r, c));
    const int lo = std::min(mix.value_min, *present.begin());
    const int hi = std::max(mix.value_max, *present.rbegin());
    std::vector<int> absent;
    for (int x = lo; x <= hi; ++x)
        if (!present.contains(x)) absent.push_back(x);

    std::discrete_distribution<int> pick_kind(mix.kind_weights.begin(), mix.kind_weights.end());
    auto pick = [&](const auto& vec) { return vec[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(vec.size()) - 1))]; };

    std::vector<GeneratedStatement> out;
    std::set<std::string> seen;
    for (int attempt = 0; attempt < mix.per_table * 8 && static_cast<int>(out.size()) < mix.per_table; ++attempt) {
        Claim cl;
        cl.kind = static_cast<ClaimKind>(pick_kind(rng));
        cl.column = uniform(rng, 1, t.n_cols - 1);
        const bool refute = coin(rng, mix.refute_fraction);
        const bool argument = refute && coin(rng, mix.argument_perturbation);
        const int c = cl.column;

        std::vector<CoordSet> variants;
        auto witness_variants = [&](const std::vector<int>& scope, int target, const CoordSet& extra_full) {
            CoordSet full = v.header_anchors(c);
            for (int r : scope) full.insert({r, c});
            full.insert(extra_full.begin(), extra_full.end());
            if (mix.evidence == EvidenceMode::Full) {
                variants.push_back(full);
                return;
            }
            for (int r : scope) {
                if (v.value(r, c) != target) continue;
                CoordSet s = v.header_anchors(c);
                s.insert({r, c});
                variants.push_back(s);
            }
        };
        auto wrong_value = [&](const std::vector<int>& scope, int truth) -> std::optional<int> {
            if (argument) {
                std::vector<int> others;
                for (int r : scope)
                    if (v.value(r, c) != truth) others.push_back(v.value(r, c));
                if (!others.empty()) return pick(others);
            }
            if (absent.empty()) return std::nullopt;
            return pick(absent);
        };

        bool truth = !refute;
        switch (cl.kind) {
            case ClaimKind::Max:
            case ClaimKind::Min: {
                int best = v.value(rows.front(), c);
                for (int r : rows) best = cl.kind == ClaimKind::Max ? std::max(best, v.value(r, c)) : std::min(best, v.value(r, c));
                if (refute) {
                    const auto w = wrong_value(rows, best);
                    if (!w) continue;
                    cl.value = *w;
                } else {
                    cl.value = best;
                }
                witness_variants(rows, best, {});
                break;
            }
            case ClaimKind::MaxExcluding: {
                if (rows.size() < 3) continue;
                int top = rows.front();
                for (int r : rows)
                    if (v.value(r, c) > v.value(top, c)) top = r;
                cl.row = top;
                std::vector<int> scope;
                for (int r : rows)
                    if (r != top) scope.push_back(r);
                int best = v.value(scope.front(), c);
                for (int r : scope) best = std::max(best, v.value(r, c));
                if (refute) {
                    std::optional<int> w;
                    if (argument && v.value(top, c) != best) {
                        w = v.value(top, c);
                    } else if (!absent.empty()) {
                        w = pick(absent);
                    }
                    if (!w) continue;
                    cl.value = *w;
                } else {
                    cl.value = best;
                }
                witness_variants(scope, best, {});
                break;
            }
            case ClaimKind::Lookup: {
                cl.row = pick(rows);
                const int actual = v.value(cl.row, c);
                if (refute) {
                    const auto w = wrong_value(rows, actual);
                    if (!w) continue;
                    cl.value = *w;
                } else {
                    cl.value = actual;
                }
                CoordSet s = v.header_anchors(c);
                s.insert({cl.row, c});
                if (mix.evidence == EvidenceMode::Full) {
                    const auto names = v.header_anchors(0);
                    s.insert(names.begin(), names.end());
                    s.insert({cl.row, 0});
                }
                variants.push_back(s);
                break;
            }
            case ClaimKind::Compare: {
                if (rows.size() < 2) continue;
                const int a = pick(rows);
                const int b = pick(rows);
                if (a == b || v.value(a, c) == v.value(b, c)) continue;
                const bool a_higher = v.value(a, c) > v.value(b, c);
                // Entailed names the higher row first; refuted swaps the order.
                cl.row = (a_higher != refute) ? a : b;
                cl.row_b = cl.row == a ? b : a;
                CoordSet s = v.header_anchors(c);
                s.insert({cl.row, c});
                s.insert({cl.row_b, c});
                if (mix.evidence == EvidenceMode::Full) {
                    const auto names = v.header_anchors(0);
                    s.insert(names.begin(), names.end());
                    s.insert({cl.row, 0});
                    s.insert({cl.row_b, 0});
                }
                variants.push_back(s);
                break;
            }
        }

        GeneratedStatement g;
        g.claim = cl;
        g.record.text = sentence_for(cl, v);
        if (!seen.insert(g.record.text).second) continue;
        g.record.statement_id = t.table_id + "-s" + std::to_string(out.size());
        g.record.table_id = t.table_id;
        g.record.verdict = truth ? Verdict::Entailed : Verdict::Refuted;
        g.record.evidence_variants = std::move(variants);
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<StatementRecord> make_unknowns(const std::vector<StatementRecord>& records,
                                           const std::map<std::string, RawTable>& tables, std::mt19937_64& rng) {
    if (tables.size() < 2) throw ContractError("make_unknowns: needs at least 2 tables, got " + std::to_string(tables.size()));
    std::vector<std::string> ids;
    for (const auto& [id, t] : tables) ids.push_back(id);
    std::vector<StatementRecord> out;
    out.reserve(records.size());
    for (const auto& s : records) {
        const auto own = std::ranges::find(ids, s.table_id);
        if (own == ids.end()) throw ContractError("make_unknowns: statement '" + s.statement_id + "' has no table");
        const auto own_idx = static_cast<int>(own - ids.begin());
        int k = uniform(rng, 0, static_cast<int>(ids.size()) - 2);
        if (k >= own_idx) ++k;
        StatementRecord u;
        u.statement_id = s.statement_id + "-u";
        u.table_id = ids[static_cast<std::size_t>(k)];
        u.text = s.text;
        u.verdict = Verdict::Unknown;
        out.push_back(std::move(u));
    }
    return out;
}

Split split_dataset(const Dataset& all, std::array<double, 3> ratios, std::uint64_t seed) {
    double sum = 0.0;
    for (double r : ratios) {
        if (r < 0.0 || !std::isfinite(r)) throw Error("split ratios must be non-negative");
        sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw Error("split ratios must sum to 1, got " + std::to_string(sum));
    std::vector<std::string> ids;
    for (const auto& [id, t] : all.tables) ids.push_back(id);
    std::mt19937_64 rng(seed);
    std::ranges::shuffle(ids, rng);
    const auto n = static_cast<double>(ids.size());
    const auto n_train = static_cast<std::size_t>(std::llround(ratios[0] * n));
    const auto n_val = std::min(ids.size() - n_train, static_cast<std::size_t>(std::llround(ratios[1] * n)));

    Split out;
    out.train.split_name = "train";
    out.validation.split_name = "validation";
    out.test.split_name = "test";
    std::map<std::string, Dataset*> where;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        Dataset* d = i < n_train ? &out.train : i < n_train + n_val ? &out.validation : &out.test;
        d->tables.emplace(ids[i], all.tables.at(ids[i]));
        where[ids[i]] = d;
    }
    for (const auto& s : all.statements) {
        const auto it = where.find(s.table_id);
        if (it == where.end()) throw Error("statement '" + s.statement_id + "' refers to unknown table '" + s.table_id + "'");
        it->second->statements.push_back(s);
    }
    return out;
}

CorpusProfile corpus_profile(std::string_view name) {
    CorpusProfile p;
    p.name = std::string(name);
    // Small tables: a from-scratch encoder at desk scale learns token matching only on short
    // sequences with a modest number of distinct values.
    p.shape.min_body_rows = 2;
    p.shape.max_body_rows = 3;
    p.shape.min_cols = 2;
    p.shape.max_cols = 3;
    p.shape.value_min = 10;
    p.shape.value_max = 49;
    if (name == "verdict" || name == "source-tf") {
        p.n_tables = 1500;
        p.shape.max_cols = 2;
        p.mix.kind_weights = {1, 1, 1, 2, 0};
        p.mix.per_table = 5;
        p.with_unknowns = name == "verdict";
    } else if (name == "evidence" || name == "source-lookup") {
        p.n_tables = 3000;
        p.mix.kind_weights = {0, 0, 0, 1, 0};
        p.mix.evidence = name == "evidence" ? EvidenceMode::Lookup : EvidenceMode::Full;
        p.with_unknowns = false;
    } else if (name == "evidence-mixed") {
        p.n_tables = 3000;
        p.mix.kind_weights = {1, 1, 0, 1, 0};
        p.mix.evidence = EvidenceMode::Lookup;
        p.with_unknowns = false;
    } else {
        throw Error("unknown corpus profile '" + std::string(name) + "'");
    }
    return p;
}

std::vector<std::string> corpus_profile_names() {
    return {"verdict", "evidence", "evidence-mixed", "source-tf", "source-lookup"};
}

Split gen_corpus(const CorpusProfile& profile, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Dataset all;
    StatementMix mix = profile.mix;
    mix.value_min = profile.shape.value_min;
    mix.value_max = profile.shape.value_max;
    for (int i = 0; i < profile.n_tables; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "%s-t%04d", profile.name.c_str(), i);
        RawTable t = gen_table(rng(), profile.shape, id);
        for (auto& g : gen_statements(t, rng, mix)) all.statements.push_back(std::move(g.record));
        all.tables.emplace(t.table_id, std::move(t));
    }
    Split s = split_dataset(all, profile.ratios, rng());
    if (profile.with_unknowns) {
        for (Dataset* d : {&s.train, &s.validation, &s.test}) {
            if (d->tables.size() < 2) continue;
            auto unknowns = make_unknowns(d->statements, d->tables, rng);
            d->statements.insert(d->statements.end(), unknowns.begin(), unknowns.end());
        }
    }
    return s;
}

Dataset gen_header_suite(std::uint64_t seed, int per_case) {
    Dataset d;
    d.split_name = "headers";
    std::mt19937_64 rng(seed);
    for (auto hc : {HeaderCase::OneA, HeaderCase::OneB, HeaderCase::OneC, HeaderCase::Two}) {
        for (int i = 0; i < per_case; ++i) {
            TableShape shape;
            shape.header_case = hc;
            shape.header_rows = 2 + i % 2;
            shape.min_cols = 3;
            shape.max_cols = 5;
            char id[48];
            std::snprintf(id, sizeof id, "hdr-%s-h%d-%04d", std::string(to_string(hc)).c_str(), shape.header_rows, i);
            RawTable t = gen_table(rng(), shape, id);
            d.tables.emplace(t.table_id, std::move(t));
        }
    }
    return d;
}

std::map<std::string, int> header_manifest(const Dataset& d) {
    std::map<std::string, int> out;
    for (const auto& [id, t] : d.tables) {
        if (auto h = expected_header_rows(id)) out[id] = *h;
    }
    return out;
}

}  // namespace tabfact
