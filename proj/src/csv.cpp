#include "synthctl/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "synthctl/errors.hpp"

namespace synthctl {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

double parse_cell(const std::string& cell, const std::string& path, int row, int col) {
    if (cell.empty())
        throw ValidationError(path + ": missing value at data row " + std::to_string(row) +
                              ", column " + std::to_string(col));
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw ValidationError(path + ": cannot parse '" + cell + "' as a number at data row " +
                              std::to_string(row) + ", column " + std::to_string(col));
    return value;
}

}  // namespace

CsvTable read_unit_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
    auto header = split_line(strip_cr(line));
    if (header.size() < 2)
        throw ValidationError(path + ": header must name an id column and at least one data column");

    CsvTable table;
    table.id_header = header[0];
    table.column_labels.assign(header.begin() + 1, header.end());

    std::vector<std::vector<double>> rows;
    int row = 0;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;  // tolerate a trailing blank line
        ++row;
        auto cells = split_line(line);
        if (cells.size() != header.size())
            throw ValidationError(path + ": data row " + std::to_string(row) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(header.size()));
        if (cells[0].empty())
            throw ValidationError(path + ": empty unit id at data row " + std::to_string(row));
        table.row_ids.push_back(cells[0]);
        std::vector<double> values(cells.size() - 1);
        for (size_t c = 1; c < cells.size(); ++c)
            values[c - 1] = parse_cell(cells[c], path, row, static_cast<int>(c));
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw ValidationError(path + ": no data rows");

    table.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(table.column_labels.size()));
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < rows[r].size(); ++c)
            table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return table;
}

void write_unit_table(const std::string& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << table.id_header;
    for (const auto& label : table.column_labels) out << ',' << label;
    out << '\n';
    for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
        out << table.row_ids[static_cast<size_t>(r)];
        for (Eigen::Index c = 0; c < table.values.cols(); ++c)
            out << ',' << format_double(table.values(r, c));
        out << '\n';
    }
    if (!out) throw IoError("write failed for " + path);
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw IoError("number formatting failed");
    return std::string(buf, ptr);
}

}  // namespace synthctl
