// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qoe/rational.hpp"
#include "qoe/timeline.hpp"

namespace qoe {

enum class DurationCategory { short_stall, medium_stall, long_stall, extra_long_stall };

std::string to_string(DurationCategory category);        // "short", "medium", "long", "extra_long"
DurationCategory parse_duration_category(const std::string& text);

/// Stall durations (seconds) a category may take.
std::span<const double> category_durations(DurationCategory category);

struct StallEvent {
  double onset_seconds = 0.0;
  double duration_seconds = 0.0;
  DurationCategory category = DurationCategory::short_stall;

  friend bool operator==(const StallEvent&, const StallEvent&) = default;
};

/// Generation batch; selects the acceleration-rate distribution.
enum class Batch { hd1080_first, hd1080_second, hd720_first };

std::string to_string(Batch batch);  // "1080p_batch1", "1080p_batch2", "720p_batch1"
Batch parse_batch(const std::string& text);

struct WeightedRate {
  double rate;
  double probability;
};

std::span<const WeightedRate> acceleration_rate_distribution(Batch batch);

/// One row of the stalling-mode table. The single-stall modes occupy two slots each.
struct ModeTemplate {
  std::string label;  // "A1".."A4", "B1".."B8", "C1".."C5"
  int slot = 0;       // 1..21, position in enumerate_stall_modes()
  std::vector<DurationCategory> categories;
};

const std::vector<ModeTemplate>& enumerate_stall_modes();
const ModeTemplate& mode_by_label(const std::string& label);

inline constexpr const char* kCleanMode = "clean";
/// Hand-built recipes outside the corpus design: 1 to 3 stalls of any positive
/// duration, categories not checked.
inline constexpr const char* kCustomMode = "custom";

struct DistortionRecipe {
  std::string mode_id = kCleanMode;
  std::vector<StallEvent> stalls;  // sorted by onset
  double acceleration_rate = 1.0;
  std::optional<int> crf;  // recorded for the external encoder, never applied here
  std::uint64_t seed = 0;
  std::string source_id;
  std::optional<Batch> batch;

  friend bool operator==(const DistortionRecipe&, const DistortionRecipe&) = default;
};

/// Throws ErrorKind::invalid_recipe on the first broken recipe invariant.
/// A "clean" recipe carries no stalls.
void validate_recipe(const DistortionRecipe& recipe);

/// Acceleration rate as an exact fraction (1.1 -> 11/10).
Rational acceleration_rate_of(const DistortionRecipe& recipe);

/// Intermediate quantities of the output-PTS computation, all frame indices 1-based.
struct DistortionPlan {
  std::vector<std::size_t> stall_frame_indices;
  std::vector<std::int64_t> pts_delays;
  std::vector<std::int64_t> cumulative_delays;  // one per frame
  std::vector<std::int64_t> catchup_counts;
  std::vector<std::size_t> catchup_end_indices;
  std::vector<std::size_t> accelerated_frames;  // frames whose incoming interval is shortened
  std::vector<Rational> pre_delay_pts;           // one per frame, before the delays are added
};

/// round(onset * framerate) per stall, clamped to [1, frame_count].
std::vector<std::size_t> stall_frame_indices(const DistortionRecipe& recipe, const Rational& framerate,
                                             std::size_t frame_count);

/// Stall durations converted to ticks.
std::vector<std::int64_t> pts_delays(const DistortionRecipe& recipe, const Timebase& timebase);

/// Delay carried by each frame: the sum of d_k over stalls with sf_k < i.
std::vector<std::int64_t> cumulative_delays(std::span<const std::size_t> stall_frames,
                                            std::span<const std::int64_t> delays, std::size_t frame_count);

/// Frames played fast to regain the live edge after a stall of `duration_seconds`.
/// Zero when the rate is exactly 1 (playback never catches up).
std::int64_t catchup_frame_count(double duration_seconds, const Rational& acceleration_rate,
                                 const Rational& framerate);

struct SynthesisResult {
  FrameTimeline timeline;
  DistortionPlan plan;
};

/// Distorted PTS track for `recipe` applied to a uniform source timeline.
SynthesisResult synthesize_output_pts(const FrameTimeline& source, const DistortionRecipe& recipe);

/// Draws durations, onsets and the acceleration rate for one video. Pure in its arguments.
DistortionRecipe sample_recipe(const ModeTemplate& mode, Batch batch, std::uint64_t seed,
                               double video_duration_seconds);

/// Stable per-video seed: mixes the run seed with a hash of the video id.
std::uint64_t derive_seed(std::uint64_t base_seed, const std::string& key);

struct SourceVideo {
  std::string source_id;
  Resolution resolution;
  Rational framerate{25};
};

/// One video of the corpus before its recipe is drawn.
struct CorpusEntry {
  std::string video_id;
  std::string source_id;
  Resolution resolution;
  Rational framerate{25};
  int crf = 0;
  std::optional<Batch> batch;  // empty for clean videos
  int mode_slot = 0;           // 1..21, 0 for clean videos

  bool stalled() const noexcept { return batch.has_value(); }
};

struct CorpusPlan {
  std::vector<CorpusEntry> entries;
  std::size_t stalled_count = 0;
  std::size_t clean_count = 0;

  std::size_t total() const noexcept { return entries.size(); }
};

inline constexpr int kPaperSourcesPerCell = 7;
inline constexpr int kPaperModesPerVideo = 3;
std::vector<int> paper_crf_set();

/// Expands real source videos into the corpus: every source is encoded at every
/// CRF without stalls, and each source receives `modes_per_video` stalling modes
/// per batch (two batches for 1080p sources, one for 720p).
CorpusPlan plan_corpus(std::span<const SourceVideo> sources, std::span<const int> crf_set, int modes_per_video);

/// Same, over synthetic sources: `source_count_per_cell` for each of the six
/// resolution/framerate cells (1080p and 720p at 20, 25 and 30 fps).
CorpusPlan corpus_plan(int source_count_per_cell, std::span<const int> crf_set, int modes_per_video);

}  // namespace qoe
