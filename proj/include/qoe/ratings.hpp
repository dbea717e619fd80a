// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qoe {

/// One raw rating as it appears in a ratings file.
struct RatingRow {
  std::string subject_id;
  std::string video_id;
  double score = 0.0;
  std::string timestamp;  // ISO 8601, may be empty
};

/// Subject x video matrix of raw scores in [1, 5]; unrated cells are empty.
/// Subjects and videos keep the order of their first appearance.
class RatingsMatrix {
 public:
  RatingsMatrix() = default;
  RatingsMatrix(std::vector<std::string> subjects, std::vector<std::string> videos,
                std::vector<std::optional<double>> scores);

  /// Duplicate (subject, video) rows are rejected.
  static RatingsMatrix from_rows(std::span<const RatingRow> rows);

  std::size_t subject_count() const noexcept { return subjects_.size(); }
  std::size_t video_count() const noexcept { return videos_.size(); }
  const std::vector<std::string>& subjects() const noexcept { return subjects_; }
  const std::vector<std::string>& videos() const noexcept { return videos_; }

  std::optional<double> score(std::size_t subject, std::size_t video) const {
    return scores_[subject * videos_.size() + video];
  }

  /// Videos rated by the subject (N_i).
  std::size_t rated_by_subject(std::size_t subject) const;
  /// Subjects that rated the video (M_j).
  std::size_t raters_of_video(std::size_t video) const;

  /// Present scores of one subject / one video, in column / row order.
  std::vector<double> subject_scores(std::size_t subject) const;
  std::vector<double> video_scores(std::size_t video) const;

  /// Matrix restricted to the given subject rows, in the given order.
  RatingsMatrix select_subjects(std::span<const std::size_t> subject_indices) const;

  bool empty() const noexcept { return subjects_.empty() || videos_.empty(); }

 private:
  std::vector<std::string> subjects_;
  std::vector<std::string> videos_;
  std::vector<std::optional<double>> scores_;
};

// Ratings file: header subject_id,video_id,score,timestamp_iso8601 (the last
// column may be absent). Rows can be appended while the file is being read.
std::vector<RatingRow> read_rating_rows(std::istream& in);
std::vector<RatingRow> load_rating_rows(const std::filesystem::path& path);
void write_rating_header(std::ostream& out);
void write_rating_row(std::ostream& out, const RatingRow& row);

}  // namespace qoe
