#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace synthctl {

// Rectangular numeric CSV with a leading id column. Header row is
// "<id_header>,<c1>,...,<cM>", then one data row per unit. Strict format:
// UTF-8, comma separator, '.' decimal point, no quoting, no missing cells.
struct CsvTable {
    std::string id_header;
    std::vector<std::string> column_labels;
    std::vector<std::string> row_ids;
    Eigen::MatrixXd values;  // row_ids.size() x column_labels.size()
};

CsvTable read_unit_table(const std::string& path);
void write_unit_table(const std::string& path, const CsvTable& table);

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace synthctl
