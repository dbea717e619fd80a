// SPDX-License-Identifier: Apache-2.0

// Minimal comma-separated field handling for the flat files this toolkit
// writes. Fields never contain commas or quotes.

#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

namespace qoe::csv {

std::vector<std::string> split(const std::string& line);

/// Next line with any trailing '\r' removed; false at end of input.
bool next_line(std::istream& in, std::string& line);

std::int64_t parse_int(const std::string& field, const std::string& what);
double parse_double(const std::string& field, const std::string& what);

/// Throws parse_error unless `line` equals `expected`.
void expect_header(const std::string& line, const std::string& expected);

}  // namespace qoe::csv
