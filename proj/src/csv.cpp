#include "dcqd/csv.hpp"

#include <cstdio>
#include <fstream>

#include "dcqd/error.hpp"

namespace dcqd {

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string csv_int(std::int64_t v) { return std::to_string(v); }

std::string csv_uint(std::uint64_t v) { return std::to_string(v); }

namespace {

std::string quoted_if_needed(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_row(std::ofstream& out, const std::vector<std::string>& row) {
  for (size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << quoted_if_needed(row[i]);
  }
  out << '\n';
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCategory::internal, "cannot write '" + path + "'");
  write_row(out, header);
  for (const auto& row : rows) {
    if (row.size() != header.size())
      fail(ErrorCategory::internal, "csv row width mismatch for '" + path + "'");
    write_row(out, row);
  }
  if (!out) fail(ErrorCategory::internal, "write failed for '" + path + "'");
}

}  // namespace dcqd
