#include "contagion/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "contagion/errors.hpp"

namespace contagion::csv {

namespace {

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            return fields;
        }
        fields.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::string describe(std::string_view field, std::size_t row, std::string_view column) {
    std::ostringstream out;
    out << "cannot parse '" << field << "' in column '" << column << "' (row " << row << ")";
    return out.str();
}

}  // namespace

Table read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    Table table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = split(line);
        if (!have_header) {
            // Tolerate a UTF-8 byte order mark.
            if (fields[0].starts_with("\xEF\xBB\xBF")) fields[0].erase(0, 3);
            table.header = std::move(fields);
            have_header = true;
        } else {
            table.rows.push_back(std::move(fields));
        }
    }
    if (in.bad()) throw IoError("read failure on " + path.string());
    return table;
}

void require_header(const Table& table, const std::vector<std::string>& expected,
                    const std::filesystem::path& path) {
    if (table.header == expected) return;
    std::string want;
    for (const auto& column : expected) want += (want.empty() ? "" : ",") + column;
    throw SchemaError(path.string() + ": expected header '" + want + "'");
}

double parse_double(std::string_view field, std::size_t row, std::string_view column) {
    const auto text = trim(field);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(value))
        throw ParseError(describe(field, row, column));
    return value;
}

std::int64_t parse_int(std::string_view field, std::size_t row, std::string_view column) {
    const auto text = trim(field);
    std::int64_t value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || end != text.data() + text.size())
        throw ParseError(describe(field, row, column));
    return value;
}

std::string format_double(double value) {
    std::array<char, 32> buffer{};
    const auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return std::string(buffer.data(), end);
}

std::string format_fixed(double value, int decimals) {
    std::array<char, 64> buffer{};
    const auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value,
                                         std::chars_format::fixed, decimals);
    return std::string(buffer.data(), end);
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

}  // namespace contagion::csv
