#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tabfact {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input that does not satisfy a documented contract (bad shapes, bad labels, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

enum class Verdict { Entailed = 0, Refuted = 1, Unknown = 2 };

inline constexpr int kNumVerdicts = 3;

std::string_view to_string(Verdict v);
/// Accepts "entailed"/"refuted"/"unknown" (case-insensitive) and the single letters E/R/U.
Verdict parse_verdict(std::string_view s);

struct Coord {
    int row = 0;
    int col = 0;
    auto operator<=>(const Coord&) const = default;
};

using CoordSet = std::set<Coord>;

/// Row-major dense grid of arbitrary cell values.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int rows, int cols, const T& fill = T{})
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    [[nodiscard]] int rows() const noexcept { return rows_; }
    [[nodiscard]] int cols() const noexcept { return cols_; }
    [[nodiscard]] bool contains(int r, int c) const noexcept {
        return r >= 0 && c >= 0 && r < rows_ && c < cols_;
    }

    T& operator()(int r, int c) { return data_[index(r, c)]; }
    const T& operator()(int r, int c) const { return data_[index(r, c)]; }

    [[nodiscard]] const std::vector<T>& data() const noexcept { return data_; }

    bool operator==(const Grid&) const = default;

private:
    [[nodiscard]] std::size_t index(int r, int c) const {
        if (!contains(r, c)) {
            throw ContractError("grid index (" + std::to_string(r) + "," + std::to_string(c) +
                                ") outside " + std::to_string(rows_) + "x" + std::to_string(cols_));
        }
        return static_cast<std::size_t>(r) * cols_ + c;
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

struct SpannedCell {
    std::string text;
    int row_span = 1;
    int col_span = 1;
    bool operator==(const SpannedCell&) const = default;
};

struct AnchoredCell {
    int row = 0;
    int col = 0;
    SpannedCell cell;
    bool operator==(const AnchoredCell&) const = default;
};

/// Ingestion-time table: spanned cells anchored at their top-left grid position.
struct RawTable {
    std::string table_id;
    int n_rows = 0;
    int n_cols = 0;
    std::vector<AnchoredCell> cells;
    std::optional<std::string> caption;
    std::optional<std::string> legend;
    bool operator==(const RawTable&) const = default;
};

struct Violation {
    enum class Kind { BadSpan, OutOfBounds, Overlap, Uncovered, BadShape };
    Kind kind;
    Coord at;
    std::string message;
};

/// Every tiling violation of `t`; empty iff the spans tile the grid exactly.
std::vector<Violation> validate_raw_table(const RawTable& t);

/// Throws ContractError carrying the first few violations when `t` is invalid.
void require_valid(const RawTable& t);

/// For each grid position, the index into `t.cells` of the span covering it (-1 if uncovered).
/// Assumes `t` is valid.
Grid<int> coverage_map(const RawTable& t);

/// Table of atomic cells. `span_origin` holds the index of the source spanned cell, or -1 for
/// cells synthesized by header merging. `merged_header_rows` is the number of original rows
/// folded into row 0 by header standardization (equal to `header_rows` when not standardized).
struct SingleCellTable {
    std::string table_id;
    Grid<std::string> grid;
    Grid<int> span_origin;
    int header_rows = 0;
    int merged_header_rows = 0;

    [[nodiscard]] int n_rows() const noexcept { return grid.rows(); }
    [[nodiscard]] int n_cols() const noexcept { return grid.cols(); }
};

struct StatementRecord {
    std::string statement_id;
    std::string table_id;
    std::string text;
    Verdict verdict = Verdict::Unknown;
    std::vector<CoordSet> evidence_variants;
    bool operator==(const StatementRecord&) const = default;
};

/// Checks evidence coordinates against `t` and that Unknown records carry no evidence.
void validate_statement(const StatementRecord& s, const RawTable& t);

enum class CellLabel { Irrelevant = 0, Relevant = 1, Excluded = 2 };

struct CellLabelGrid {
    std::string statement_id;
    Grid<CellLabel> labels;
    bool operator==(const CellLabelGrid&) const = default;
};

/// Text that is empty after trimming ASCII whitespace.
bool is_empty_cell(std::string_view text) noexcept;

std::string_view trim(std::string_view s) noexcept;

}  // namespace tabfact
