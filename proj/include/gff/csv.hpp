#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gff {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  friend bool operator==(const CsvTable&, const CsvTable&) = default;
};

/// Shortest-safe decimal: 17 significant digits, '.' separator.
std::string format_double(double v);

/// RFC 4180 style: header row, fields quoted when they contain ',', '"',
/// CR or LF, LF line endings. Throws precondition on ragged rows.
void write_csv(std::ostream& out, const CsvTable& table);
std::string to_csv(const CsvTable& table);

CsvTable parse_csv(std::string_view text);

/// Writes the table to `path`; io_error on failure.
void emit_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

} // namespace gff
