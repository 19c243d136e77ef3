#include "csv.hpp"

#include <charconv>
#include <sstream>

#include "cobot/error.hpp"

namespace cobot::analytics::detail {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::string where(const CsvRow& row, std::size_t col) {
    return "line " + std::to_string(row.line) + ", column " + std::to_string(col + 1);
}

} // namespace

std::vector<CsvRow> read_csv(std::istream& in, std::vector<std::string>& header) {
    std::vector<CsvRow> rows;
    std::string line;
    std::size_t n = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++n;
        const auto t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        CsvRow row{n, {}};
        std::stringstream ss(t);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            row.cells.push_back(trim(cell));
        }
        if (t.back() == ',') {
            row.cells.emplace_back();
        }
        if (!have_header) {
            header = row.cells;
            have_header = true;
        } else {
            rows.push_back(std::move(row));
        }
    }
    if (!have_header) {
        throw Error("E_CSV", "empty CSV input");
    }
    return rows;
}

double to_number(const CsvRow& row, std::size_t col, const char* what) {
    if (col >= row.cells.size()) {
        throw Error("E_CSV", where(row, col) + ": missing " + what);
    }
    const auto& s = row.cells[col];
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw Error("E_CSV", where(row, col) + ": " + what + " '" + s + "' is not a number");
    }
    return v;
}

int to_int(const CsvRow& row, std::size_t col, const char* what) {
    if (col >= row.cells.size()) {
        throw Error("E_CSV", where(row, col) + ": missing " + what);
    }
    const auto& s = row.cells[col];
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw Error("E_CSV", where(row, col) + ": " + what + " '" + s + "' is not an integer");
    }
    return v;
}

} // namespace cobot::analytics::detail
