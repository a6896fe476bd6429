#include "sfwm/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace sfwm::csvio {

static std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

Table read_numeric_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open CSV file: " + path);
    Table table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_line(line);
        if (!have_header) {
            table.header = cells;
            have_header = true;
            continue;
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells) {
            if (cell.empty()) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            std::size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != cell.size())
                throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                            ": malformed numeric cell '" + cell + "'");
            row.push_back(v);
        }
        if (row.size() != table.header.size())
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": expected " + std::to_string(table.header.size()) +
                                        " columns, got " + std::to_string(row.size()));
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw std::invalid_argument(path + ": missing header row");
    return table;
}

int column(const Table& table, const std::string& name) {
    for (std::size_t i = 0; i < table.header.size(); ++i)
        if (table.header[i] == name) return static_cast<int>(i);
    return -1;
}

std::string format_double(double v) {
    char buf[40];
    if (v == static_cast<long long>(v) && std::abs(v) < 1e15) {
        std::snprintf(buf, sizeof buf, "%.0f", v);
        return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // trim to the shortest representation that round-trips
    for (int prec = 6; prec < 17; ++prec) {
        char t[40];
        std::snprintf(t, sizeof t, "%.*g", prec, v);
        if (std::stod(t) == v) return t;
    }
    return buf;
}

}  // namespace sfwm::csvio
