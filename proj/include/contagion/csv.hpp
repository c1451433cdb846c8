#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace contagion::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Reads a comma-separated file without quoting support. Blank lines are
/// skipped and trailing `\r` is stripped. Throws IoError if unreadable.
Table read(const std::filesystem::path& path);

/// Throws SchemaError unless `table.header` equals `expected` exactly.
void require_header(const Table& table, const std::vector<std::string>& expected,
                    const std::filesystem::path& path);

double parse_double(std::string_view field, std::size_t row, std::string_view column);
std::int64_t parse_int(std::string_view field, std::size_t row, std::string_view column);

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

/// Fixed-point with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

/// Opens `path` for writing, creating parent directories. Throws IoError.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace contagion::csv
