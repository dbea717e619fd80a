// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qoe/workbench/config.hpp"

namespace qoe::workbench {

// Batch drivers behind the CLI. Each throws qoe::Error on failure; the caller
// maps the error kind to an exit code.

struct DistortOptions {
  std::filesystem::path sources;  // source manifest (JSON Lines)
  std::filesystem::path out;      // output directory
  std::uint64_t seed = 0;
  Config config;
};

struct DistortSummary {
  std::size_t entries = 0;
  std::size_t stalled = 0;
  std::size_t clean = 0;
  std::filesystem::path manifest;
};

/// Plans the corpus over the sources, draws one recipe per stalled video and
/// writes <out>/<video_id>.recipe.json, <out>/<video_id>.timing.csv and
/// <out>/manifest.jsonl. Output bytes depend only on the inputs and the seed.
DistortSummary run_distort(const DistortOptions& options);

/// Writes the render schedule of every manifest entry to its schedule path.
std::size_t run_restructure(const std::filesystem::path& manifest, unsigned workers);

struct MosSummary {
  std::size_t subjects = 0;
  std::size_t rejected = 0;
  std::size_t videos = 0;
};

/// Screening and MOS: writes the MOS CSV to `out` and the per-subject
/// screening log next to it (<stem>.screening.csv).
MosSummary run_mos(const std::filesystem::path& ratings, const std::filesystem::path& out);

struct EvaluateOptions {
  std::vector<std::filesystem::path> scores;  // one file per model
  std::filesystem::path ratings;
  std::filesystem::path out;
  double alpha = 0.05;
};

/// Correlation and pairwise-classification report for every model, plus the
/// model-vs-model significance matrix when there are at least two.
void run_evaluate(const EvaluateOptions& options);

/// MOS aggregates per factor, joined with the corpus manifest.
void run_summarize(const std::filesystem::path& mos, const std::filesystem::path& manifest,
                   const std::filesystem::path& out);

}  // namespace qoe::workbench
