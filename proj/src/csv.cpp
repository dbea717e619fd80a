// SPDX-License-Identifier: Apache-2.0

#include "csv.hpp"

#include <charconv>
#include <cmath>

#include "qoe/error.hpp"

namespace qoe::csv {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::int64_t parse_int(const std::string& field, const std::string& what) {
  std::int64_t value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || field.empty()) {
    fail(ErrorKind::parse_error, "bad integer for " + what + ": '" + field + "'");
  }
  return value;
}

double parse_double(const std::string& field, const std::string& what) {
  try {
    std::size_t used = 0;
    const double value = std::stod(field, &used);
    if (used != field.size() || !std::isfinite(value)) throw std::invalid_argument(field);
    return value;
  } catch (const std::logic_error&) {
    fail(ErrorKind::parse_error, "bad number for " + what + ": '" + field + "'");
  }
}

void expect_header(const std::string& line, const std::string& expected) {
  if (line != expected) fail(ErrorKind::parse_error, "expected header '" + expected + "', got '" + line + "'");
}

}  // namespace qoe::csv
