#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tabfact/ingest.hpp"
#include "tabfact/table.hpp"

namespace tabfact {

enum class HeaderCase { None, OneA, OneB, OneC, Two };

std::string_view to_string(HeaderCase c);
HeaderCase parse_header_case(std::string_view s);

struct TableShape {
    int min_body_rows = 3;
    int max_body_rows = 8;
    int min_cols = 3;  // including the name column
    int max_cols = 5;
    int value_min = 10;
    int value_max = 99;
    HeaderCase header_case = HeaderCase::None;
    int header_rows = 2;  // used when header_case != None
};

/// Deterministic table: column 0 holds distinct row names, the rest are integers. Header-case
/// tables carry the case and expected header count in their id ("hdr-1b-h3-0007").
RawTable gen_table(std::uint64_t seed, const TableShape& shape, const std::string& table_id);

/// Header row count a generated table was built with (parsed from its id), if any.
std::optional<int> expected_header_rows(const std::string& table_id);

enum class ClaimKind { Max, Min, MaxExcluding, Lookup, Compare };
inline constexpr int kNumClaimKinds = 5;

std::string_view to_string(ClaimKind k);
ClaimKind parse_claim_kind(std::string_view s);

/// Structured meaning of a generated statement over a header-plus-body table (raw coordinates).
struct Claim {
    ClaimKind kind = ClaimKind::Lookup;
    int column = 1;
    int row = -1;      // Lookup: the named row; Compare: row A; MaxExcluding: the excluded row
    int row_b = -1;    // Compare: row B
    int value = 0;     // claimed value (Max, Min, MaxExcluding, Lookup)
};

enum class EvidenceMode { Full, Lookup };

struct StatementMix {
    std::array<double, kNumClaimKinds> kind_weights{1, 1, 1, 1, 1};
    double refute_fraction = 0.5;
    double argument_perturbation = 0.0;  // share of refutations perturbing an argument rather than the value
    int per_table = 6;
    int value_min = 10;  // range refuting values are drawn from
    int value_max = 99;
    EvidenceMode evidence = EvidenceMode::Full;
};

struct GeneratedStatement {
    StatementRecord record;
    Claim claim;
};

/// Numeric value of a body cell, or nullopt for non-integer text.
std::optional<int> cell_value(const RawTable& t, int row, int col);
/// Number of header rows of a generated table (1 unless it was built with a header case).
int generated_header_rows(const RawTable& t);

/// Templated statements over `t` with evidence variants. Refuted statements use a value absent
/// from the table or (argument perturbation) a value or order that exists but does not hold.
std::vector<GeneratedStatement> gen_statements(const RawTable& t, std::mt19937_64& rng, const StatementMix& mix);

/// One Unknown copy of every record, attached to a different table chosen uniformly at random.
std::vector<StatementRecord> make_unknowns(const std::vector<StatementRecord>& records,
                                           const std::map<std::string, RawTable>& tables, std::mt19937_64& rng);

struct Split {
    Dataset train;
    Dataset validation;
    Dataset test;
};

/// Table-level split; ratios must sum to 1.
Split split_dataset(const Dataset& all, std::array<double, 3> ratios, std::uint64_t seed);

struct CorpusProfile {
    std::string name;
    int n_tables = 240;
    TableShape shape;
    StatementMix mix;
    bool with_unknowns = true;
    std::array<double, 3> ratios{0.7, 0.15, 0.15};
};

/// Named presets: "verdict", "evidence", "evidence-mixed", plus the chaining sources "source-tf"
/// (verdict without unknowns) and "source-lookup" (evidence with full evidence sets).
CorpusProfile corpus_profile(std::string_view name);
std::vector<std::string> corpus_profile_names();

/// Generates tables and statements, splits by table, then adds unknowns within each split.
Split gen_corpus(const CorpusProfile& profile, std::uint64_t seed);

/// Header-rule suite: `per_case` tables for each of the cases 1a, 1b, 1c and 2.
Dataset gen_header_suite(std::uint64_t seed, int per_case = 20);
/// Table id to expected header row count for every header-case table in `d`.
std::map<std::string, int> header_manifest(const Dataset& d);

}  // namespace tabfact
