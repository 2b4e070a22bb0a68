#include "tabfact/postprocess.hpp"

namespace tabfact {

namespace {

void require_shape(const CellLabelGrid& pred, const SingleCellTable& t) {
    if (pred.labels.rows() != t.n_rows() || pred.labels.cols() != t.n_cols()) {
        throw ContractError("statement '" + pred.statement_id + "': label grid is " + std::to_string(pred.labels.rows()) +
                            "x" + std::to_string(pred.labels.cols()) + " but table '" + t.table_id + "' is " +
                            std::to_string(t.n_rows()) + "x" + std::to_string(t.n_cols()));
    }
    if (t.header_rows != 1) throw ContractError("table '" + t.table_id + "' must have a single standardized header row");
}

}  // namespace

CellLabelGrid propagate_header_relevance(const CellLabelGrid& pred, const SingleCellTable& t) {
    require_shape(pred, t);
    CellLabelGrid out = pred;
    for (int c = 0; c < t.n_cols(); ++c) {
        bool any = false;
        for (int r = 1; r < t.n_rows(); ++r) any = any || pred.labels(r, c) == CellLabel::Relevant;
        out.labels(0, c) = any ? CellLabel::Relevant : CellLabel::Irrelevant;
    }
    return out;
}

std::vector<CellLabel> merge_to_spans(const CellLabelGrid& pred, const SingleCellTable& t, const RawTable& raw) {
    require_shape(pred, t);
    const int h = t.merged_header_rows;
    if (h < 1 || raw.n_rows != t.n_rows() - 1 + h || raw.n_cols != t.n_cols()) {
        throw ContractError("table '" + t.table_id + "' does not derive from raw table '" + raw.table_id + "' (shape)");
    }
    const Grid<int> cover = coverage_map(raw);
    std::vector<CellLabel> out(raw.cells.size(), CellLabel::Irrelevant);
    for (int c = 0; c < t.n_cols(); ++c) {
        if (pred.labels(0, c) == CellLabel::Relevant) {
            for (int r = 0; r < h; ++r) out[static_cast<std::size_t>(cover(r, c))] = CellLabel::Relevant;
        }
        for (int r = 1; r < t.n_rows(); ++r) {
            const int raw_r = r - 1 + h;
            const int origin = cover(raw_r, c);
            if (t.span_origin(r, c) != origin) {
                throw ContractError("table '" + t.table_id + "': position (" + std::to_string(r) + "," +
                                    std::to_string(c) + ") has span origin " + std::to_string(t.span_origin(r, c)) +
                                    " but the raw table places cell " + std::to_string(origin) + " there");
            }
            if (pred.labels(r, c) == CellLabel::Relevant) out[static_cast<std::size_t>(origin)] = CellLabel::Relevant;
        }
    }
    return out;
}

CellLabelGrid spans_to_raw_grid(const std::vector<CellLabel>& span_labels, const RawTable& raw,
                                std::string statement_id) {
    if (span_labels.size() != raw.cells.size()) {
        throw ContractError("table '" + raw.table_id + "' has " + std::to_string(raw.cells.size()) + " cells but " +
                            std::to_string(span_labels.size()) + " labels were given");
    }
    const Grid<int> cover = coverage_map(raw);
    CellLabelGrid out{std::move(statement_id), Grid<CellLabel>(raw.n_rows, raw.n_cols, CellLabel::Irrelevant)};
    for (int r = 0; r < raw.n_rows; ++r) {
        for (int c = 0; c < raw.n_cols; ++c) out.labels(r, c) = span_labels[static_cast<std::size_t>(cover(r, c))];
    }
    return out;
}

}  // namespace tabfact
