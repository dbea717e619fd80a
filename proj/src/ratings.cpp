// SPDX-License-Identifier: Apache-2.0

#include "qoe/ratings.hpp"

#include <fstream>
#include <ostream>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "csv.hpp"
#include "qoe/error.hpp"

namespace qoe {
namespace {

void check_score(double score, const std::string& subject, const std::string& video) {
  if (!(score >= 1.0 && score <= 5.0)) {
    fail(ErrorKind::invalid_argument, fmt::format("score {} by {} for {} outside [1, 5]", score, subject, video));
  }
}

}  // namespace

RatingsMatrix::RatingsMatrix(std::vector<std::string> subjects, std::vector<std::string> videos,
                             std::vector<std::optional<double>> scores)
    : subjects_(std::move(subjects)), videos_(std::move(videos)), scores_(std::move(scores)) {
  if (scores_.size() != subjects_.size() * videos_.size()) {
    fail(ErrorKind::invalid_argument, "ratings matrix shape does not match its labels");
  }
  for (std::size_t s = 0; s < subjects_.size(); ++s) {
    for (std::size_t v = 0; v < videos_.size(); ++v) {
      if (const auto x = score(s, v)) check_score(*x, subjects_[s], videos_[v]);
    }
  }
}

RatingsMatrix RatingsMatrix::from_rows(std::span<const RatingRow> rows) {
  std::vector<std::string> subjects;
  std::vector<std::string> videos;
  std::unordered_map<std::string, std::size_t> subject_index;
  std::unordered_map<std::string, std::size_t> video_index;
  for (const auto& row : rows) {
    if (subject_index.emplace(row.subject_id, subjects.size()).second) subjects.push_back(row.subject_id);
    if (video_index.emplace(row.video_id, videos.size()).second) videos.push_back(row.video_id);
  }
  std::vector<std::optional<double>> scores(subjects.size() * videos.size());
  for (const auto& row : rows) {
    check_score(row.score, row.subject_id, row.video_id);
    auto& cell = scores[subject_index[row.subject_id] * videos.size() + video_index[row.video_id]];
    if (cell) fail(ErrorKind::invalid_argument, fmt::format("{} rated {} twice", row.subject_id, row.video_id));
    cell = row.score;
  }
  return RatingsMatrix(std::move(subjects), std::move(videos), std::move(scores));
}

std::size_t RatingsMatrix::rated_by_subject(std::size_t subject) const {
  std::size_t n = 0;
  for (std::size_t v = 0; v < videos_.size(); ++v) n += score(subject, v).has_value();
  return n;
}

std::size_t RatingsMatrix::raters_of_video(std::size_t video) const {
  std::size_t n = 0;
  for (std::size_t s = 0; s < subjects_.size(); ++s) n += score(s, video).has_value();
  return n;
}

std::vector<double> RatingsMatrix::subject_scores(std::size_t subject) const {
  std::vector<double> out;
  for (std::size_t v = 0; v < videos_.size(); ++v) {
    if (const auto x = score(subject, v)) out.push_back(*x);
  }
  return out;
}

std::vector<double> RatingsMatrix::video_scores(std::size_t video) const {
  std::vector<double> out;
  for (std::size_t s = 0; s < subjects_.size(); ++s) {
    if (const auto x = score(s, video)) out.push_back(*x);
  }
  return out;
}

RatingsMatrix RatingsMatrix::select_subjects(std::span<const std::size_t> subject_indices) const {
  std::vector<std::string> subjects;
  std::vector<std::optional<double>> scores;
  for (std::size_t s : subject_indices) {
    subjects.push_back(subjects_.at(s));
    for (std::size_t v = 0; v < videos_.size(); ++v) scores.push_back(score(s, v));
  }
  return RatingsMatrix(std::move(subjects), videos_, std::move(scores));
}

std::vector<RatingRow> read_rating_rows(std::istream& in) {
  std::vector<RatingRow> rows;
  std::string line;
  if (!csv::next_line(in, line)) return rows;
  if (line != "subject_id,video_id,score,timestamp_iso8601" && line != "subject_id,video_id,score") {
    fail(ErrorKind::parse_error, "unexpected ratings header '" + line + "'");
  }
  std::size_t line_no = 1;
  while (csv::next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() < 3 || f.size() > 4) fail(ErrorKind::parse_error, fmt::format("ratings line {}: '{}'", line_no, line));
    if (f[0].empty() || f[1].empty()) fail(ErrorKind::parse_error, fmt::format("ratings line {}: empty id", line_no));
    rows.push_back(RatingRow{f[0], f[1], csv::parse_double(f[2], "score"), f.size() == 4 ? f[3] : std::string{}});
  }
  return rows;
}

std::vector<RatingRow> load_rating_rows(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io_error, "cannot read " + path.string());
  return read_rating_rows(in);
}

void write_rating_header(std::ostream& out) { out << "subject_id,video_id,score,timestamp_iso8601\n"; }

void write_rating_row(std::ostream& out, const RatingRow& row) {
  fmt::print(out, "{},{},{},{}\n", row.subject_id, row.video_id, row.score, row.timestamp);
}

}  // namespace qoe
