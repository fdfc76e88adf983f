#include "hmlc/csv.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "hmlc/errors.hpp"

namespace hmlc {

std::string trim(const std::string& s) {
    auto is_space = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    cells.push_back(cell);
    return cells;
}

std::size_t CsvTable::column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw ValidationError("csv: missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has_column(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open csv file: " + path.string());
    }
    CsvTable table;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!have_header) {
            for (auto& h : split_csv_line(line)) table.header.push_back(trim(h));
            have_header = true;
            continue;
        }
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != table.header.size()) {
            throw ValidationError("csv: row " + std::to_string(line_no) + " of " + path.string() +
                                  " has " + std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    if (!have_header || table.header.empty() || (table.header.size() == 1 && table.header[0].empty())) {
        throw ValidationError("csv: empty file: " + path.string());
    }
    return table;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write csv file: " + path.string());
    }
    auto emit_row = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << '\n';
    };
    emit_row(table.header);
    for (const auto& row : table.rows) emit_row(row);
}

} // namespace hmlc
