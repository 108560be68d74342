#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wavekin {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
/// Strict parse of a whole field; throws std::invalid_argument.
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

/// Comma-separated table with a header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column; throws std::runtime_error when missing.
    std::size_t column(std::string_view name) const;
};

/// Throws std::runtime_error on unreadable files or ragged rows.
CsvTable read_csv(const std::filesystem::path& path);

/// Writes via a temporary sibling and renames, so readers never see a
/// half-written file.
void write_text_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_text(const std::filesystem::path& path);

}  // namespace wavekin
