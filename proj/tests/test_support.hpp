// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "qoe/sidecar.hpp"
#include "qoe/timeline.hpp"

namespace qoe::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / fmt::format("qoe-{}-{:x}", tag, rd());
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// 7 sources for each of 1080p/720p x 20/25/30 fps, 10 s each, plus the
// JSON-lines source manifest pointing at them.
inline std::filesystem::path write_sources(const std::filesystem::path& dir, int per_cell = 7) {
  std::filesystem::create_directories(dir / "src");
  std::ofstream manifest(dir / "sources.jsonl");
  const Resolution resolutions[] = {{1920, 1080}, {1280, 720}};
  const int rates[] = {20, 25, 30};
  int n = 0;
  for (const auto& res : resolutions) {
    for (int fps : rates) {
      for (int i = 0; i < per_cell; ++i) {
        const std::string id = fmt::format("S{:02}", ++n);
        const auto tl = uniform_timeline(static_cast<std::size_t>(10 * fps), Rational(fps), Timebase{1, 90000}, res);
        save_sidecar(dir / "src" / (id + ".csv"), tl);
        manifest << fmt::format(R"({{"source_id":"{}","sidecar":"src/{}.csv"}})", id, id) << '\n';
      }
    }
  }
  return dir / "sources.jsonl";
}

}  // namespace qoe::testing
