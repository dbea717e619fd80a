// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qoe/ratings.hpp"

namespace qoe {

struct ZScores {
  std::vector<std::optional<double>> values;  // subject-major, same shape as the matrix
  std::vector<double> subject_mean;
  std::vector<double> subject_stddev;
  std::vector<std::size_t> degenerate_subjects;  // fewer than two ratings or zero variance
  std::size_t video_count = 0;

  std::optional<double> at(std::size_t subject, std::size_t video) const {
    return values[subject * video_count + video];
  }
};

/// Per-subject standardization with the sample standard deviation (N_i - 1).
/// Degenerate subjects get no z-scores.
ZScores zscore_normalize(const RatingsMatrix& ratings);

struct SubjectScreening {
  std::string subject_id;
  std::size_t above = 0;  // P_i
  std::size_t below = 0;  // Q_i
  std::size_t rated = 0;  // N_i
  bool rejected = false;
};

struct RejectionResult {
  std::vector<std::size_t> retained;  // subject indices, ascending
  std::vector<SubjectScreening> log;  // one per subject

  std::size_t rejected_count() const noexcept { return log.size() - retained.size(); }
};

/// Observer screening on raw scores.
///
/// For each video, the kurtosis of its scores picks the outlier bound: 2 sigma
/// when 2 <= beta2 <= 4 (roughly normal), sqrt(20) sigma otherwise. A subject
/// collects P for every score at or above mean + bound and Q for every score
/// at or below mean - bound, and is rejected when (P + Q) / N > 0.05 and
/// |P - Q| / (P + Q) < 0.3, i.e. frequent deviations in both directions.
/// Videos with fewer than two ratings or zero spread are skipped.
RejectionResult reject_subjects(const RatingsMatrix& ratings);

struct MosRow {
  std::string video_id;
  double mos = 0.0;
  std::size_t rater_count = 0;
  double stddev = 0.0;                 // of the rescaled scores, 0 for a single rater
  std::vector<double> rescaled_scores;  // z-scores mapped to [1, 5]
};

struct MosTable {
  std::vector<MosRow> rows;
  std::vector<std::string> excluded_subjects;  // degenerate for z-scoring
  std::vector<std::string> unrated_videos;     // no retained rating left
  std::string rescaling = "z' = 1 + 4 (z + 3) / 6, clamped to [1, 5]";

  const MosRow* find(const std::string& video_id) const;
};

/// Maps a z-score to the [1, 5] scale.
double rescale_zscore(double z) noexcept;

/// MOS of every video from an already screened matrix.
MosTable compute_mos(const RatingsMatrix& ratings);

struct MosPipelineResult {
  RejectionResult rejection;
  MosTable table;
};

/// Rejection, then z-scoring and averaging over the retained subjects.
MosPipelineResult screened_mos(const RatingsMatrix& ratings);

struct RaterRanking {
  std::string subject_id;
  double srcc = 0.0;  // NaN when undefined (constant scores)
};

/// SRCC of every subject against the all-candidate MOS, best first.
std::vector<RaterRanking> rank_raters(const RatingsMatrix& training);

/// The k subjects whose scores agree best with the MOS; ties go to the smaller id.
std::vector<std::string> screen_raters(const RatingsMatrix& training, std::size_t k);

void write_mos_csv(std::ostream& out, const MosTable& table);
void save_mos_csv(const std::filesystem::path& path, const MosTable& table);
/// Reads video_id,mos,rater_count,stddev rows (rescaled scores are not stored).
MosTable read_mos_csv(std::istream& in);
MosTable load_mos_csv(const std::filesystem::path& path);

/// Attributes of one video used to slice the MOS distribution.
struct VideoFactors {
  std::string video_id;
  std::string resolution;  // "1920x1080"
  std::string framerate;   // "25"
  int crf = 0;
  std::size_t stall_count = 0;
  double acceleration_rate = 1.0;
  std::string mode_id;
  double total_stall_seconds = 0.0;
};

struct FactorGroup {
  std::string factor;  // resolution, framerate, crf, stall_count, ar_mode, total_stall_duration
  std::string group;
  std::size_t count = 0;
  double mean = 0.0;
  std::vector<std::size_t> histogram;  // MOS bins [1,2) [2,3) [3,4) [4,5]
};

/// Grouped MOS aggregates. Every video of the table must have factors.
std::vector<FactorGroup> factor_summary(const MosTable& mos, std::span<const VideoFactors> factors);

void write_factor_csv(std::ostream& out, std::span<const FactorGroup> groups);

}  // namespace qoe
