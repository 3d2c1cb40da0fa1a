// io.cpp — %.12g formatting and strict two-column CSV reading/writing

#include "qdeph/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "qdeph/errors.hpp"

namespace qdeph {

namespace {

double parse_number(std::string_view s, const std::string& path, std::size_t line_no) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw invalid_input(path + ":" + std::to_string(line_no) + ": not a number: '" + std::string(s) + "'");
    return x;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace

std::string g12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::vector<std::pair<double, double>> read_csv_pairs(const std::string& path,
                                                      const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || std::string(trim(line)) != expected_header)
        throw invalid_input(path + ": expected header '" + expected_header + "'");
    std::vector<std::pair<double, double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty()) continue;
        const auto comma = t.find(',');
        if (comma == std::string_view::npos)
            throw invalid_input(path + ":" + std::to_string(line_no) + ": expected two comma-separated columns");
        rows.emplace_back(parse_number(trim(t.substr(0, comma)), path, line_no),
                          parse_number(trim(t.substr(comma + 1)), path, line_no));
    }
    return rows;
}

void write_csv_pairs(const std::string& path, const std::string& header,
                     const std::vector<std::pair<double, double>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_input("cannot write '" + path + "'");
    out << header << '\n';
    for (const auto& [a, b] : rows) out << g12(a) << ',' << g12(b) << '\n';
}

} // namespace qdeph
