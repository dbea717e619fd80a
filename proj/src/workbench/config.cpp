// SPDX-License-Identifier: Apache-2.0

#include "qoe/workbench/config.hpp"

#include <charconv>
#include <fstream>

#include <fmt/format.h>

#include "qoe/error.hpp"

namespace qoe::workbench {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T number(const std::string& key, const std::string& text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(ErrorKind::parse_error, fmt::format("config {}: '{}' is not a valid number", key, text));
  }
  return value;
}

double real(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::logic_error&) {
  }
  fail(ErrorKind::parse_error, fmt::format("config {}: '{}' is not a valid number", key, text));
}

}  // namespace

Config parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  Config c;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::parse_error, fmt::format("config line {}: expected key = value", line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "seed") {
      c.seed = number<std::uint64_t>(key, value);
    } else if (key == "workers") {
      c.workers = number<unsigned>(key, value);
    } else if (key == "modes_per_video") {
      c.modes_per_video = number<int>(key, value);
    } else if (key == "crfs") {
      std::vector<int> crfs;
      std::size_t start = 0;
      while (start <= value.size()) {
        const auto comma = value.find(',', start);
        crfs.push_back(number<int>(key, trim(value.substr(start, comma - start))));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      c.crfs = std::move(crfs);
    } else if (key == "alpha") {
      c.alpha = real(key, value);
    } else if (key == "frames_root") {
      std::filesystem::path p(value);
      c.frames_root = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    } else if (key == "encoder_command") {
      c.encoder_command = value;
    } else if (key == "port") {
      c.port = number<int>(key, value);
    } else {
      fail(ErrorKind::parse_error, fmt::format("config line {}: unknown key '{}'", line_no, key));
    }
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io_error, "cannot read config " + path.string());
  return parse_config(in, path.parent_path());
}

Config merge(const Config& file, const Config& o) {
  Config c = file;
  if (o.seed) c.seed = o.seed;
  if (o.workers) c.workers = o.workers;
  if (o.modes_per_video) c.modes_per_video = o.modes_per_video;
  if (o.crfs) c.crfs = o.crfs;
  if (o.alpha) c.alpha = o.alpha;
  if (o.frames_root) c.frames_root = o.frames_root;
  if (o.encoder_command) c.encoder_command = o.encoder_command;
  if (o.port) c.port = o.port;
  return c;
}

std::string expand_template(const std::string& pattern,
                            const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < pattern.size()) {
    if (pattern[i] != '{') {
      out += pattern[i++];
      continue;
    }
    const auto close = pattern.find('}', i);
    if (close == std::string::npos) fail(ErrorKind::parse_error, "unterminated placeholder in '" + pattern + "'");
    const std::string name = pattern.substr(i + 1, close - i - 1);
    bool found = false;
    for (const auto& [k, v] : values) {
      if (k == name) {
        out += v;
        found = true;
        break;
      }
    }
    if (!found) fail(ErrorKind::parse_error, "unknown placeholder {" + name + "}");
    i = close + 1;
  }
  return out;
}

}  // namespace qoe::workbench
