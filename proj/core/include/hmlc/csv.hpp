#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace hmlc {

/// Minimal comma-separated table. No quoting or escaping: label CSVs and
/// feature sidecars never contain commas inside cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;       // throws if absent
    bool has_column(const std::string& name) const;
};

std::vector<std::string> split_csv_line(const std::string& line);

/// Throws ValidationError on missing/empty files or ragged rows.
CsvTable read_csv(const std::filesystem::path& path);

void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Trim ASCII whitespace from both ends.
std::string trim(const std::string& s);

} // namespace hmlc
