#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "blocksampler/error.hpp"

namespace blocksampler::csv {

struct Row {
  std::size_t line = 0;  // 1-based line number in the file
  std::vector<std::string> fields;
};

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(first, last - first + 1));
}

inline std::vector<Row> read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<Row> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    Row row{number, {}};
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      row.fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

inline bool is_numeric_row(const Row& row) {
  double tmp = 0.0;
  for (const auto& f : row.fields) {
    if (!parse_double(f, tmp)) return false;
  }
  return true;
}

inline std::string where(const std::filesystem::path& path, const Row& row) {
  return path.filename().string() + ":" + std::to_string(row.line);
}

inline double number(const std::filesystem::path& path, const Row& row, std::size_t col) {
  double v = 0.0;
  if (col >= row.fields.size() || !parse_double(row.fields[col], v)) {
    throw InputError(where(path, row) + ": expected a number in column " + std::to_string(col + 1));
  }
  return v;
}

inline long long integer(const std::filesystem::path& path, const Row& row, std::size_t col) {
  const double v = number(path, row, col);
  if (v != std::floor(v) || std::fabs(v) > 9.0e15) {
    throw InputError(where(path, row) + ": non-integer value '" + row.fields[col] + "'");
  }
  return static_cast<long long>(v);
}

}  // namespace blocksampler::csv
