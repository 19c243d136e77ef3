#pragma once

#include <istream>
#include <string>
#include <vector>

namespace cobot::analytics::detail {

struct CsvRow {
    std::size_t line = 0;
    std::vector<std::string> cells;
};

/// Comma-separated, unquoted fields, whitespace trimmed, blank and '#' lines skipped.
/// The first non-blank row is returned as the header.
std::vector<CsvRow> read_csv(std::istream& in, std::vector<std::string>& header);

double to_number(const CsvRow& row, std::size_t col, const char* what);
int to_int(const CsvRow& row, std::size_t col, const char* what);

} // namespace cobot::analytics::detail
