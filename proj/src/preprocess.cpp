#include "tabfact/preprocess.hpp"

#include <algorithm>
#include <cstdlib>

#include "tabfact/metrics.hpp"

namespace tabfact {

SingleCellTable expand_spans(const RawTable& t) {
    require_valid(t);
    SingleCellTable out;
    out.table_id = t.table_id;
    out.grid = Grid<std::string>(t.n_rows, t.n_cols);
    out.span_origin = Grid<int>(t.n_rows, t.n_cols, -1);
    for (std::size_t i = 0; i < t.cells.size(); ++i) {
        const auto& a = t.cells[i];
        for (int r = a.row; r < a.row + a.cell.row_span; ++r) {
            for (int c = a.col; c < a.col + a.cell.col_span; ++c) {
                out.grid(r, c) = a.cell.text;
                out.span_origin(r, c) = static_cast<int>(i);
            }
        }
    }
    return out;
}

int predict_header_rows(const SingleCellTable& t) {
    const int n_rows = t.n_rows();
    if (n_rows < 2) {
        throw ContractError("table '" + t.table_id + "' has " + std::to_string(n_rows) +
                            " row(s); header prediction needs at least one body row");
    }
    const int max_h = n_rows - 1;

    // Rule 1. Row 0 always qualifies, so h >= 1. An empty top-left cell only admits empty cells
    // below it; a non-empty one admits empty cells and repeats of itself.
    const auto top_left = trim(t.grid(0, 0));
    int h = 0;
    while (h < n_rows) {
        const auto cell = trim(t.grid(h, 0));
        if (!(cell.empty() || cell == top_left)) break;
        ++h;
    }
    h = std::clamp(h, 1, max_h);

    // Rule 2.
    auto columns_agree = [&](int j, int rows) {
        for (int r = 0; r < rows; ++r)
            if (trim(t.grid(r, j)) != trim(t.grid(r, j + 1))) return false;
        return true;
    };
    auto any_pair_agrees = [&](int rows) {
        for (int j = 0; j + 1 < t.n_cols(); ++j)
            if (columns_agree(j, rows)) return true;
        return false;
    };
    while (h < max_h && any_pair_agrees(h)) ++h;
    return h;
}

SingleCellTable standardize_header(const SingleCellTable& t, int h) {
    if (h < 1 || h > t.n_rows() - 1) {
        throw ContractError("header row count " + std::to_string(h) + " out of range [1, " +
                            std::to_string(t.n_rows() - 1) + "] for table '" + t.table_id + "'");
    }
    const int n_rows = t.n_rows() - h + 1;
    SingleCellTable out;
    out.table_id = t.table_id;
    out.grid = Grid<std::string>(n_rows, t.n_cols());
    out.span_origin = Grid<int>(n_rows, t.n_cols(), -1);
    out.header_rows = 1;
    out.merged_header_rows = h;
    for (int c = 0; c < t.n_cols(); ++c) {
        if (h == 1) {
            out.grid(0, c) = t.grid(0, c);
            out.span_origin(0, c) = t.span_origin(0, c);
            continue;
        }
        std::string merged;
        int last_origin = -2;
        for (int r = 0; r < h; ++r) {
            const auto& text = t.grid(r, c);
            const int origin = t.span_origin(r, c);
            const bool repeat = origin == last_origin;
            last_origin = origin;
            if (is_empty_cell(text) || repeat) continue;
            if (!merged.empty()) merged.push_back('\n');
            merged += trim(text);
        }
        out.grid(0, c) = std::move(merged);
    }
    for (int r = h; r < t.n_rows(); ++r) {
        for (int c = 0; c < t.n_cols(); ++c) {
            out.grid(r - h + 1, c) = t.grid(r, c);
            out.span_origin(r - h + 1, c) = t.span_origin(r, c);
        }
    }
    return out;
}

SingleCellTable single_header(const SingleCellTable& t) {
    if (t.n_rows() < 2) throw ContractError("table '" + t.table_id + "' needs at least two rows");
    SingleCellTable out = t;
    out.header_rows = 1;
    out.merged_header_rows = 1;
    return out;
}

SingleCellTable prepare_table(const RawTable& t, bool standardize) {
    SingleCellTable expanded = expand_spans(t);
    if (!standardize) return single_header(expanded);
    return standardize_header(expanded, predict_header_rows(expanded));
}

CellLabelGrid propagate_evidence_labels(const std::vector<CellLabel>& span_labels, const SingleCellTable& t,
                                        const std::string& statement_id) {
    if (t.header_rows < 1) throw ContractError("table '" + t.table_id + "' has no header rows set");
    CellLabelGrid out{statement_id, Grid<CellLabel>(t.n_rows(), t.n_cols(), CellLabel::Irrelevant)};
    for (int r = 0; r < t.n_rows(); ++r) {
        for (int c = 0; c < t.n_cols(); ++c) {
            if (r < t.header_rows) {
                out.labels(r, c) = CellLabel::Excluded;
                continue;
            }
            const int origin = t.span_origin(r, c);
            if (origin < 0 || origin >= static_cast<int>(span_labels.size())) {
                throw ContractError("no label for span " + std::to_string(origin) + " at body position (" +
                                    std::to_string(r) + "," + std::to_string(c) + ") of table '" + t.table_id + "'");
            }
            const CellLabel l = span_labels[static_cast<std::size_t>(origin)];
            if (l == CellLabel::Excluded) {
                throw ContractError("span " + std::to_string(origin) + " carries an Excluded label");
            }
            out.labels(r, c) = l;
        }
    }
    return out;
}

std::vector<CellLabel> span_labels_from_evidence(const StatementRecord& s, const RawTable& t) {
    std::vector<CellLabel> out(t.cells.size(), CellLabel::Irrelevant);
    const Grid<int> owner = coverage_map(t);
    for (const auto& variant : s.evidence_variants) {
        for (const auto& c : variant) {
            if (!owner.contains(c.row, c.col)) {
                throw ContractError("statement '" + s.statement_id + "' evidence outside table '" + t.table_id + "'");
            }
            out[static_cast<std::size_t>(owner(c.row, c.col))] = CellLabel::Relevant;
        }
    }
    return out;
}

HeaderEvalRow evaluate_header_predictions(const Dataset& d, const std::map<std::string, int>& oracle,
                                          std::string corpus_name) {
    HeaderEvalRow row{std::move(corpus_name)};
    for (const auto& [id, table] : d.tables) {
        auto it = oracle.find(id);
        if (it == oracle.end() || it->second <= 0) continue;
        if (table.n_rows < 2) continue;
        const int predicted = predict_header_rows(expand_spans(table));
        ++row.n_tables;
        if (predicted == it->second) ++row.exact_match;
        if (std::abs(predicted - it->second) <= 1) ++row.within_one;
    }
    return row;
}

std::string format_header_eval(const std::vector<HeaderEvalRow>& rows) {
    auto pct = [](int k, int n) { return n == 0 ? std::string("-") : format_fixed2(100.0 * k / n); };
    std::string out = "corpus\tn_tables\texact_match\texact_match_pct\twithin_one\twithin_one_pct\n";
    for (const auto& r : rows) {
        out += r.corpus + "\t" + std::to_string(r.n_tables) + "\t" + std::to_string(r.exact_match) + "\t" +
               pct(r.exact_match, r.n_tables) + "\t" + std::to_string(r.within_one) + "\t" +
               pct(r.within_one, r.n_tables) + "\n";
    }
    return out;
}

}  // namespace tabfact
