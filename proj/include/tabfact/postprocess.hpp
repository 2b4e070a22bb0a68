#pragma once

#include <vector>

#include "tabfact/table.hpp"

namespace tabfact {

/// Marks the header cell of every column holding a Relevant body cell as Relevant and every other
/// header cell as Irrelevant. Body labels pass through.
CellLabelGrid propagate_header_relevance(const CellLabelGrid& pred, const SingleCellTable& t);

/// One label per spanned cell of `raw` (same order as raw.cells): Relevant iff any grid position
/// it covers is Relevant in `pred`. The single standardized header row stands for all
/// `t.merged_header_rows` original header rows.
std::vector<CellLabel> merge_to_spans(const CellLabelGrid& pred, const SingleCellTable& t, const RawTable& raw);

/// Expands per-span labels onto the raw grid (every covered position takes its span's label).
CellLabelGrid spans_to_raw_grid(const std::vector<CellLabel>& span_labels, const RawTable& raw,
                                std::string statement_id);

}  // namespace tabfact
