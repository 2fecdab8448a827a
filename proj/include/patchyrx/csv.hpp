#ifndef PATCHYRX_CSV_HPP
#define PATCHYRX_CSV_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace patchyrx {

/// Numeric table with a mandatory header row and optional trailing comment
/// lines (written with a leading "# "). All values use '.' as the decimal
/// separator and LF line endings, independent of the process locale.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;  // each row matches header size
    std::vector<std::string> comments;      // without the "# " prefix
};

/// Shortest decimal representation that round-trips through double.
std::string format_double(double value);

std::string csv_to_string(const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Parses text produced by csv_to_string (or any comma-separated numeric
/// table with one header row; '#' lines are collected as comments wherever
/// they appear). Malformed rows raise std::runtime_error naming the
/// 1-based line number.
CsvTable parse_csv_string(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace patchyrx

#endif
