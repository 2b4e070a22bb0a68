#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "tabfact/ingest.hpp"
#include "tabfact/table.hpp"

namespace fixtures {

inline std::filesystem::path data_dir() { return TABFACT_TEST_DATA; }

/// Table A1 with its three-row header (span-level, as published).
inline tabfact::Dataset sample_a1() { return tabfact::load_dataset_json(data_dir() / "sample_a1.json"); }
inline tabfact::RawTable sample_table() { return sample_a1().tables.at("A1"); }

/// Table of 1x1 cells from row texts.
inline tabfact::RawTable simple_table(const std::vector<std::vector<std::string>>& rows, std::string id = "t") {
    tabfact::RawTable t;
    t.table_id = std::move(id);
    t.n_rows = static_cast<int>(rows.size());
    t.n_cols = rows.empty() ? 0 : static_cast<int>(rows.front().size());
    for (int r = 0; r < t.n_rows; ++r)
        for (int c = 0; c < t.n_cols; ++c) t.cells.push_back({r, c, {rows[r][c], 1, 1}});
    return t;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("tabfact-test-" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace fixtures
