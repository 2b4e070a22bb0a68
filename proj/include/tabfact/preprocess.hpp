#pragma once

#include <map>
#include <string>
#include <vector>

#include "tabfact/ingest.hpp"
#include "tabfact/table.hpp"

namespace tabfact {

/// Copies each spanned cell's text into every position it covers. header_rows starts at 0.
SingleCellTable expand_spans(const RawTable& t);

/// Number of header rows predicted by the two structural rules:
///  1. the longest run of top rows whose left-most cell is empty or equals the top-left text;
///  2. grow while two adjacent columns agree (trimmed) on every header row.
/// The result is clamped to [1, n_rows - 1]. Throws ContractError for single-row tables.
int predict_header_rows(const SingleCellTable& t);

/// Folds rows [0, h) into one header row; each column's non-empty header texts are joined with
/// '\n' and consecutive repeats from the same source span appear once.
SingleCellTable standardize_header(const SingleCellTable& t, int h);

/// Marks the first row as the only header row without merging anything.
SingleCellTable single_header(const SingleCellTable& t);

/// expand_spans + predict_header_rows + (optionally) standardize_header.
SingleCellTable prepare_table(const RawTable& t, bool standardize = true);

/// Per-span labels (indexed like `RawTable::cells`) broadcast onto the body of `t`; header
/// positions are always Excluded.
CellLabelGrid propagate_evidence_labels(const std::vector<CellLabel>& span_labels, const SingleCellTable& t,
                                        const std::string& statement_id = {});

/// Span labels for one statement: a span is Relevant iff its anchor is in any evidence variant.
std::vector<CellLabel> span_labels_from_evidence(const StatementRecord& s, const RawTable& t);

struct HeaderEvalRow {
    std::string corpus;
    int n_tables = 0;
    int exact_match = 0;
    int within_one = 0;
};

/// Compares predicted header counts (on expanded tables) against oracle counts. Tables without an
/// oracle entry are skipped; so are oracle entries with zero header rows.
HeaderEvalRow evaluate_header_predictions(const Dataset& d, const std::map<std::string, int>& oracle,
                                          std::string corpus_name);

/// TSV with a header line; counts followed by percentages with two decimals.
std::string format_header_eval(const std::vector<HeaderEvalRow>& rows);

}  // namespace tabfact
