#include "tabfact/table.hpp"

#include <algorithm>
#include <cctype>

namespace tabfact {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Entailed: return "entailed";
        case Verdict::Refuted: return "refuted";
        case Verdict::Unknown: return "unknown";
    }
    return "unknown";
}

Verdict parse_verdict(std::string_view s) {
    std::string lower(s);
    std::ranges::transform(lower, lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "entailed" || lower == "e") return Verdict::Entailed;
    if (lower == "refuted" || lower == "r") return Verdict::Refuted;
    if (lower == "unknown" || lower == "u") return Verdict::Unknown;
    throw ContractError("unknown verdict label '" + std::string(s) + "'");
}

std::string_view trim(std::string_view s) noexcept {
    auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
    while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
    return s;
}

bool is_empty_cell(std::string_view text) noexcept { return trim(text).empty(); }

std::vector<Violation> validate_raw_table(const RawTable& t) {
    std::vector<Violation> out;
    if (t.n_rows <= 0 || t.n_cols <= 0) {
        out.push_back({Violation::Kind::BadShape, {0, 0},
                       "table " + t.table_id + " has non-positive shape " + std::to_string(t.n_rows) + "x" +
                           std::to_string(t.n_cols)});
        return out;
    }
    Grid<int> owner(t.n_rows, t.n_cols, -1);
    for (std::size_t i = 0; i < t.cells.size(); ++i) {
        const auto& a = t.cells[i];
        const Coord anchor{a.row, a.col};
        if (a.cell.row_span < 1 || a.cell.col_span < 1) {
            out.push_back({Violation::Kind::BadSpan, anchor,
                           "span " + std::to_string(a.cell.row_span) + "x" + std::to_string(a.cell.col_span) +
                               " at (" + std::to_string(a.row) + "," + std::to_string(a.col) + ") is not positive"});
            continue;
        }
        for (int r = a.row; r < a.row + a.cell.row_span; ++r) {
            for (int c = a.col; c < a.col + a.cell.col_span; ++c) {
                if (!owner.contains(r, c)) {
                    out.push_back({Violation::Kind::OutOfBounds, {r, c},
                                   "cell anchored at (" + std::to_string(a.row) + "," + std::to_string(a.col) +
                                       ") extends to (" + std::to_string(r) + "," + std::to_string(c) +
                                       ") outside the grid"});
                    continue;
                }
                if (int prev = owner(r, c); prev >= 0) {
                    const auto& p = t.cells[static_cast<std::size_t>(prev)];
                    out.push_back({Violation::Kind::Overlap, {r, c},
                                   "position (" + std::to_string(r) + "," + std::to_string(c) +
                                       ") covered by cells anchored at (" + std::to_string(p.row) + "," +
                                       std::to_string(p.col) + ") and (" + std::to_string(a.row) + "," +
                                       std::to_string(a.col) + ")"});
                    continue;
                }
                owner(r, c) = static_cast<int>(i);
            }
        }
    }
    for (int r = 0; r < t.n_rows; ++r) {
        for (int c = 0; c < t.n_cols; ++c) {
            if (owner(r, c) < 0) {
                out.push_back({Violation::Kind::Uncovered, {r, c},
                               "position (" + std::to_string(r) + "," + std::to_string(c) + ") is not covered"});
            }
        }
    }
    return out;
}

void require_valid(const RawTable& t) {
    auto v = validate_raw_table(t);
    if (v.empty()) return;
    std::string msg = "invalid table '" + t.table_id + "': " + v.front().message;
    if (v.size() > 1) msg += " (+" + std::to_string(v.size() - 1) + " more)";
    throw ContractError(msg);
}

Grid<int> coverage_map(const RawTable& t) {
    Grid<int> owner(t.n_rows, t.n_cols, -1);
    for (std::size_t i = 0; i < t.cells.size(); ++i) {
        const auto& a = t.cells[i];
        for (int r = a.row; r < a.row + a.cell.row_span; ++r)
            for (int c = a.col; c < a.col + a.cell.col_span; ++c)
                if (owner.contains(r, c)) owner(r, c) = static_cast<int>(i);
    }
    return owner;
}

void validate_statement(const StatementRecord& s, const RawTable& t) {
    if (s.verdict == Verdict::Unknown && !s.evidence_variants.empty()) {
        throw ContractError("statement '" + s.statement_id + "' is unknown but carries evidence");
    }
    for (const auto& variant : s.evidence_variants) {
        for (const auto& c : variant) {
            if (c.row < 0 || c.col < 0 || c.row >= t.n_rows || c.col >= t.n_cols) {
                throw ContractError("statement '" + s.statement_id + "' evidence (" + std::to_string(c.row) + "," +
                                    std::to_string(c.col) + ") lies outside table '" + t.table_id + "'");
            }
        }
    }
}

}  // namespace tabfact
