#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace neckflex {

// One parsed CSV file: a header row plus data rows of matching width.
// Files are UTF-8 with LF line endings and '.' decimal separators; a
// trailing CR is tolerated on read.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a named column; throws ParseError when the column is missing.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

// Strict field conversions; line is 1-based and lands in the ParseError.
double parse_double(const std::string& field, std::size_t line);
long parse_long(const std::string& field, std::size_t line);

// Shortest decimal form that round-trips through a double.
std::string format_double(double v);

}  // namespace neckflex
