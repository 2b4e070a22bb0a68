#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tabfact/table.hpp"

namespace tabfact {

/// Malformed input bytes (JSON, CSV, XML, HTML). `what()` carries line/offset information.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Well-formed input that violates the dataset schema (missing field, dangling reference, ...).
class SchemaError : public Error {
public:
    using Error::Error;
};

struct Dataset {
    std::map<std::string, RawTable> tables;
    std::vector<StatementRecord> statements;
    std::string split_name;

    [[nodiscard]] const RawTable& table_of(const StatementRecord& s) const;
    bool operator==(const Dataset&) const = default;
};

struct HeaderOracle {
    std::string table_id;
    int header_row_count = 0;
};

// Canonical dataset JSON.
Dataset parse_dataset_json(std::string_view text, std::string split_name = {});
Dataset load_dataset_json(const std::filesystem::path& path);
std::string dataset_to_json(const Dataset& d);
void save_dataset_json(const Dataset& d, const std::filesystem::path& path);

/// RFC-4180 CSV; ragged rows are padded with empty cells, all spans are 1x1.
RawTable parse_csv_table(std::string_view bytes, std::string table_id);

/// Minimal XML subset: <table [id=..]> with <caption>, <legend>, <row> and <cell row-span col-span>.
/// Cells are slotted left to right around spans from earlier rows; ragged rows are padded.
RawTable parse_xml_table(std::string_view bytes, std::string table_id = {});

/// Number of <tr> rows inside the (single) <thead> element; 0 when there is none.
HeaderOracle extract_header_oracle(std::string_view html_bytes, std::string table_id);

/// TSV manifest of `table_id<TAB>header_rows` lines ('#' comments allowed).
std::map<std::string, int> load_header_manifest(const std::filesystem::path& path);
void save_header_manifest(const std::map<std::string, int>& manifest, const std::filesystem::path& path);

struct VerdictPrediction {
    std::string statement_id;
    std::string table_id;
    Verdict verdict = Verdict::Unknown;
    std::array<double, kNumVerdicts> probs{};
    int length = 0;          // pre-truncation sequence length
    int truncated_rows = 0;
    std::string error;       // non-empty when the example could not be encoded
    bool operator==(const VerdictPrediction&) const = default;
};

/// Per-statement labels over the raw (pre-expansion) grid.
struct EvidencePrediction {
    std::string statement_id;
    std::string table_id;
    CellLabelGrid labels;
    int length = 0;
    int truncated_rows = 0;
    std::string error;
    bool operator==(const EvidencePrediction&) const = default;
};

void write_predictions(std::vector<VerdictPrediction> records, const std::filesystem::path& path);
void write_evidence_predictions(std::vector<EvidencePrediction> grids, const std::filesystem::path& path);

/// Reads a prediction array, or a dataset document whose statements are taken as predictions.
std::vector<VerdictPrediction> read_predictions(const std::filesystem::path& path);
std::vector<EvidencePrediction> read_evidence_predictions(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
/// Writes bytes verbatim, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace tabfact
