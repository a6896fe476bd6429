#pragma once

#include <string>
#include <vector>

namespace sfwm::csvio {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Read a comma-separated numeric table with a header row. Lines starting
/// with '#' are metadata comments and are skipped. Malformed cells raise
/// std::invalid_argument naming the 1-based line number.
Table read_numeric_csv(const std::string& path);

/// Column index by name, or -1.
int column(const Table& table, const std::string& name);

/// Shortest-round-trip formatting for CSV cells ('.' decimal, no locale).
std::string format_double(double v);

}  // namespace sfwm::csvio
