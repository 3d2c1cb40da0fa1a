// io.hpp — locale-free number formatting and the two-column CSV format shared by the CLI and tests

#pragma once

#include <string>
#include <utility>
#include <vector>

namespace qdeph {

// 12 significant digits, C locale, no trailing noise ("%.12g").
std::string g12(double x);

// Reads a two-column CSV with the exact header expected_header.
// Throws invalid_input on a missing file, wrong header, or an unparseable row.
std::vector<std::pair<double, double>> read_csv_pairs(const std::string& path,
                                                      const std::string& expected_header);

// Writes header + g12-formatted rows with '\n' line endings.
void write_csv_pairs(const std::string& path, const std::string& header,
                     const std::vector<std::pair<double, double>>& rows);

} // namespace qdeph
