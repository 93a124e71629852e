#include "neckflex/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "neckflex/errors.hpp"

namespace neckflex {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ParseError("missing column '" + name + "'");
}

bool CsvTable::has_column(const std::string& name) const {
  for (const auto& h : header) {
    if (h == name) return true;
  }
  return false;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());

  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      table.header = split_line(line);
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != table.header.size()) {
      throw ParseError("expected " + std::to_string(table.header.size()) +
                           " fields, got " + std::to_string(fields.size()),
                       lineno);
    }
    table.rows.push_back(std::move(fields));
  }
  if (lineno == 0) throw ParseError("empty file " + path.string());
  return table;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  auto emit_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << row[i];
    }
    out << '\n';
  };
  emit_row(table.header);
  for (const auto& row : table.rows) emit_row(row);
  if (!out) throw ParseError("write failed for " + path.string());
}

double parse_double(const std::string& field, std::size_t line) {
  double v = 0;
  const char* first = field.data();
  const char* last = first + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    // from_chars rejects "inf"/"nan" spellings on some platforms; accept the
    // common ones explicitly so written files read back.
    if (field == "inf") return INFINITY;
    if (field == "-inf") return -INFINITY;
    if (field == "nan") return NAN;
    throw ParseError("bad number '" + field + "'", line);
  }
  return v;
}

long parse_long(const std::string& field, std::size_t line) {
  long v = 0;
  const char* first = field.data();
  const char* last = first + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ParseError("bad integer '" + field + "'", line);
  }
  return v;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace neckflex
