// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qoe/distortion.hpp"
#include "qoe/timeline.hpp"

namespace qoe::workbench {

// Both manifests are JSON Lines, one object per line. Relative paths are
// resolved against the directory holding the manifest.

/// Input of `distort`: {"source_id": "...", "sidecar": "path/to/timing.csv"}
struct SourceRecord {
  std::string source_id;
  std::filesystem::path sidecar;
};

std::vector<SourceRecord> read_source_manifest(const std::filesystem::path& path);

/// One distorted (or clean) corpus video.
struct ManifestEntry {
  std::string video_id;
  std::string source_id;
  Resolution resolution;
  Rational framerate{25};
  int crf = 0;
  std::filesystem::path recipe;    // relative to the manifest directory
  std::filesystem::path sidecar;   // output PTS track
  std::filesystem::path schedule;  // written by `restructure`
  std::optional<Batch> batch;
};

struct CorpusManifest {
  std::filesystem::path directory;  // base for relative paths
  std::vector<ManifestEntry> entries;

  std::filesystem::path resolve(const std::filesystem::path& p) const;
  const ManifestEntry* find(const std::string& video_id) const;
};

void write_manifest(std::ostream& out, const CorpusManifest& manifest);
void save_manifest(const std::filesystem::path& path, const CorpusManifest& manifest);
CorpusManifest load_manifest(const std::filesystem::path& path);

/// Unique ids; every recipe and sidecar present, and every schedule when
/// `require_schedules`. Throws invalid_argument naming the first offender.
void validate_manifest(const CorpusManifest& manifest, bool require_schedules);

/// "25" for whole rates, "29.97" style otherwise.
std::string framerate_label(const Rational& framerate);

}  // namespace qoe::workbench
