#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ptd::csv {

/// Comma-separated table with a header row. Cells are kept as strings;
/// numeric access parses on demand.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column, or -1 when absent.
    int column(const std::string& name) const;
    /// Parsed cell (row, named column); throws with row/column context.
    double number(std::size_t row, int col) const;
};

Table read_file(const std::string& path);

/// Shortest decimal representation that round-trips a double exactly.
std::string format(double value);

/// Write rows of preformatted cells under a header. Overwrites the file.
void write_file(const std::string& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows);

}  // namespace ptd::csv
