// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qoe::workbench {

// Plain text, one `key = value` per line, '#' starts a comment. Unknown keys
// are an error so typos do not silently fall back to defaults. Command-line
// flags override the file; nothing is read from the environment.
//
//   seed = 42
//   workers = 8
//   modes_per_video = 3
//   crfs = 15,22,27,32,37
//   alpha = 0.05
//   frames_root = frames
//   encoder_command = ffmpeg -i {input_frames}/%06d.png -crf {crf} {output_frames}/%06d.png
//   port = 8080
struct Config {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<int> modes_per_video;
  std::optional<std::vector<int>> crfs;
  std::optional<double> alpha;
  std::optional<std::filesystem::path> frames_root;
  std::optional<std::string> encoder_command;
  std::optional<int> port;
};

Config parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
Config load_config(const std::filesystem::path& path);

/// `overrides` wins wherever it has a value.
Config merge(const Config& file, const Config& overrides);

/// Replaces {name} placeholders; unknown placeholders are an error.
std::string expand_template(const std::string& pattern,
                            const std::vector<std::pair<std::string, std::string>>& values);

}  // namespace qoe::workbench
