// SPDX-License-Identifier: Apache-2.0

#include "qoe/subjective.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "csv.hpp"
#include "qoe/error.hpp"
#include "qoe/rank_stats.hpp"

namespace qoe {
namespace {

constexpr double kNormalKurtosisLow = 2.0;
constexpr double kNormalKurtosisHigh = 4.0;
constexpr double kNormalBound = 2.0;
const double kHeavyTailBound = std::sqrt(20.0);
constexpr double kDeviationShare = 0.05;
constexpr double kBalanceRatio = 0.3;

struct Moments {
  double mean = 0;
  double sample_stddev = 0;
  double kurtosis = 0;  // m4 / m2^2, population moments
};

Moments moments(std::span<const double> xs) {
  Moments out;
  const double n = static_cast<double>(xs.size());
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double m2 = 0;
  double m4 = 0;
  for (double x : xs) {
    const double d = (x - out.mean) * (x - out.mean);
    m2 += d;
    m4 += d * d;
  }
  out.sample_stddev = xs.size() > 1 ? std::sqrt(m2 / (n - 1)) : 0.0;
  m2 /= n;
  m4 /= n;
  out.kurtosis = m2 > 0 ? m4 / (m2 * m2) : 0.0;
  return out;
}

double sample_stddev(std::span<const double> xs) { return xs.size() > 1 ? moments(xs).sample_stddev : 0.0; }

double group_order_key(const std::string& group, bool& numeric) {
  try {
    std::size_t used = 0;
    const double v = std::stod(group, &used);
    numeric = used == group.size();
    return v;
  } catch (const std::logic_error&) {
    numeric = false;
    return 0;
  }
}

}  // namespace

ZScores zscore_normalize(const RatingsMatrix& ratings) {
  const std::size_t subjects = ratings.subject_count();
  const std::size_t videos = ratings.video_count();
  ZScores out;
  out.video_count = videos;
  out.values.assign(subjects * videos, std::nullopt);
  out.subject_mean.assign(subjects, std::numeric_limits<double>::quiet_NaN());
  out.subject_stddev.assign(subjects, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t s = 0; s < subjects; ++s) {
    const auto scores = ratings.subject_scores(s);
    if (scores.size() < 2) {
      out.degenerate_subjects.push_back(s);
      continue;
    }
    const Moments mo = moments(scores);
    out.subject_mean[s] = mo.mean;
    out.subject_stddev[s] = mo.sample_stddev;
    if (!(mo.sample_stddev > 0)) {
      out.degenerate_subjects.push_back(s);
      continue;
    }
    for (std::size_t v = 0; v < videos; ++v) {
      if (const auto x = ratings.score(s, v)) out.values[s * videos + v] = (*x - mo.mean) / mo.sample_stddev;
    }
  }
  return out;
}

RejectionResult reject_subjects(const RatingsMatrix& ratings) {
  if (ratings.subject_count() < 3) {
    fail(ErrorKind::invalid_argument,
         fmt::format("subject rejection needs at least 3 subjects, got {}", ratings.subject_count()));
  }
  const std::size_t subjects = ratings.subject_count();
  RejectionResult result;
  result.log.resize(subjects);
  for (std::size_t s = 0; s < subjects; ++s) {
    result.log[s].subject_id = ratings.subjects()[s];
    result.log[s].rated = ratings.rated_by_subject(s);
  }
  for (std::size_t v = 0; v < ratings.video_count(); ++v) {
    const auto scores = ratings.video_scores(v);
    if (scores.size() < 2) continue;
    const Moments mo = moments(scores);
    if (!(mo.sample_stddev > 0)) continue;
    const bool normal = mo.kurtosis >= kNormalKurtosisLow && mo.kurtosis <= kNormalKurtosisHigh;
    const double bound = (normal ? kNormalBound : kHeavyTailBound) * mo.sample_stddev;
    for (std::size_t s = 0; s < subjects; ++s) {
      const auto x = ratings.score(s, v);
      if (!x) continue;
      if (*x >= mo.mean + bound) ++result.log[s].above;
      if (*x <= mo.mean - bound) ++result.log[s].below;
    }
  }
  for (std::size_t s = 0; s < subjects; ++s) {
    auto& entry = result.log[s];
    const double deviations = static_cast<double>(entry.above + entry.below);
    if (entry.rated > 0 && deviations / static_cast<double>(entry.rated) > kDeviationShare &&
        std::abs(static_cast<double>(entry.above) - static_cast<double>(entry.below)) / deviations < kBalanceRatio) {
      entry.rejected = true;
    } else {
      result.retained.push_back(s);
    }
  }
  return result;
}

double rescale_zscore(double z) noexcept { return std::clamp(1.0 + 4.0 * (z + 3.0) / 6.0, 1.0, 5.0); }

const MosRow* MosTable::find(const std::string& video_id) const {
  const auto it = std::ranges::find(rows, video_id, &MosRow::video_id);
  return it == rows.end() ? nullptr : &*it;
}

MosTable compute_mos(const RatingsMatrix& ratings) {
  const ZScores z = zscore_normalize(ratings);
  MosTable table;
  for (std::size_t s : z.degenerate_subjects) table.excluded_subjects.push_back(ratings.subjects()[s]);
  for (std::size_t v = 0; v < ratings.video_count(); ++v) {
    MosRow row;
    row.video_id = ratings.videos()[v];
    for (std::size_t s = 0; s < ratings.subject_count(); ++s) {
      if (const auto value = z.at(s, v)) row.rescaled_scores.push_back(rescale_zscore(*value));
    }
    if (row.rescaled_scores.empty()) {
      table.unrated_videos.push_back(row.video_id);
      continue;
    }
    row.rater_count = row.rescaled_scores.size();
    row.mos = std::accumulate(row.rescaled_scores.begin(), row.rescaled_scores.end(), 0.0) /
              static_cast<double>(row.rater_count);
    row.stddev = sample_stddev(row.rescaled_scores);
    table.rows.push_back(std::move(row));
  }
  return table;
}

MosPipelineResult screened_mos(const RatingsMatrix& ratings) {
  MosPipelineResult out;
  out.rejection = reject_subjects(ratings);
  out.table = compute_mos(ratings.select_subjects(out.rejection.retained));
  return out;
}

std::vector<RaterRanking> rank_raters(const RatingsMatrix& training) {
  const MosTable table = compute_mos(training);
  std::vector<std::optional<double>> mos_by_video(training.video_count());
  for (std::size_t v = 0; v < training.video_count(); ++v) {
    if (const MosRow* row = table.find(training.videos()[v])) mos_by_video[v] = row->mos;
  }
  std::vector<RaterRanking> ranking;
  for (std::size_t s = 0; s < training.subject_count(); ++s) {
    std::vector<double> own;
    std::vector<double> reference;
    for (std::size_t v = 0; v < training.video_count(); ++v) {
      const auto x = training.score(s, v);
      if (x && mos_by_video[v]) {
        own.push_back(*x);
        reference.push_back(*mos_by_video[v]);
      }
    }
    const double rho = own.size() >= 2 ? spearman(own, reference) : std::numeric_limits<double>::quiet_NaN();
    ranking.push_back(RaterRanking{training.subjects()[s], rho});
  }
  std::ranges::stable_sort(ranking, [](const RaterRanking& a, const RaterRanking& b) {
    const bool a_nan = std::isnan(a.srcc);
    const bool b_nan = std::isnan(b.srcc);
    if (a_nan != b_nan) return b_nan;
    if (!a_nan && a.srcc != b.srcc) return a.srcc > b.srcc;
    return a.subject_id < b.subject_id;
  });
  return ranking;
}

std::vector<std::string> screen_raters(const RatingsMatrix& training, std::size_t k) {
  if (k > training.subject_count()) {
    fail(ErrorKind::invalid_argument, fmt::format("cannot keep {} of {} subjects", k, training.subject_count()));
  }
  const auto ranking = rank_raters(training);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(ranking[i].subject_id);
  return out;
}

void write_mos_csv(std::ostream& out, const MosTable& table) {
  out << "video_id,mos,rater_count,stddev\n";
  for (const auto& row : table.rows) fmt::print(out, "{},{:.6f},{},{:.6f}\n", row.video_id, row.mos, row.rater_count, row.stddev);
}

void save_mos_csv(const std::filesystem::path& path, const MosTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io_error, "cannot write " + path.string());
  write_mos_csv(out, table);
}

MosTable read_mos_csv(std::istream& in) {
  MosTable table;
  std::string line;
  if (!csv::next_line(in, line)) fail(ErrorKind::parse_error, "empty MOS file");
  csv::expect_header(line, "video_id,mos,rater_count,stddev");
  while (csv::next_line(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 4) fail(ErrorKind::parse_error, "MOS row needs 4 fields: '" + line + "'");
    MosRow row;
    row.video_id = f[0];
    row.mos = csv::parse_double(f[1], "mos");
    row.rater_count = static_cast<std::size_t>(csv::parse_int(f[2], "rater_count"));
    row.stddev = csv::parse_double(f[3], "stddev");
    table.rows.push_back(std::move(row));
  }
  return table;
}

MosTable load_mos_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io_error, "cannot read " + path.string());
  return read_mos_csv(in);
}

std::vector<FactorGroup> factor_summary(const MosTable& mos, std::span<const VideoFactors> factors) {
  std::unordered_map<std::string, const VideoFactors*> by_id;
  for (const auto& f : factors) by_id.emplace(f.video_id, &f);

  using Key = std::function<std::string(const VideoFactors&)>;
  const std::vector<std::pair<std::string, Key>> keys = {
      {"resolution", [](const VideoFactors& f) { return f.resolution; }},
      {"framerate", [](const VideoFactors& f) { return f.framerate; }},
      {"crf", [](const VideoFactors& f) { return std::to_string(f.crf); }},
      {"stall_count", [](const VideoFactors& f) { return std::to_string(f.stall_count); }},
      {"ar_mode", [](const VideoFactors& f) { return fmt::format("{}@{}", f.mode_id, f.acceleration_rate); }},
      {"total_stall_duration", [](const VideoFactors& f) { return fmt::format("{}", f.total_stall_seconds); }},
  };

  std::vector<std::pair<const MosRow*, const VideoFactors*>> joined;
  for (const auto& row : mos.rows) {
    const auto it = by_id.find(row.video_id);
    if (it == by_id.end()) fail(ErrorKind::invalid_argument, "no factors for video " + row.video_id);
    joined.emplace_back(&row, it->second);
  }

  std::vector<FactorGroup> out;
  for (const auto& [factor, key] : keys) {
    std::map<std::string, FactorGroup> groups;
    for (const auto& [row, f] : joined) {
      const std::string g = key(*f);
      auto [it, inserted] = groups.try_emplace(g);
      FactorGroup& group = it->second;
      if (inserted) {
        group.factor = factor;
        group.group = g;
        group.histogram.assign(4, 0);
      }
      ++group.count;
      group.mean += row->mos;
      const auto bin = static_cast<std::size_t>(std::clamp(std::floor(row->mos - 1.0), 0.0, 3.0));
      ++group.histogram[bin];
    }
    std::vector<FactorGroup> sorted;
    for (auto& [_, g] : groups) {
      g.mean /= static_cast<double>(g.count);
      sorted.push_back(std::move(g));
    }
    std::ranges::stable_sort(sorted, [](const FactorGroup& a, const FactorGroup& b) {
      bool a_num = false;
      bool b_num = false;
      const double ka = group_order_key(a.group, a_num);
      const double kb = group_order_key(b.group, b_num);
      if (a_num && b_num && ka != kb) return ka < kb;
      if (a_num != b_num) return a_num;
      return a.group < b.group;
    });
    out.insert(out.end(), sorted.begin(), sorted.end());
  }
  return out;
}

void write_factor_csv(std::ostream& out, std::span<const FactorGroup> groups) {
  out << "factor,group,count,mean,hist_1_2,hist_2_3,hist_3_4,hist_4_5\n";
  for (const auto& g : groups) {
    fmt::print(out, "{},{},{},{:.6f},{},{},{},{}\n", g.factor, g.group, g.count, g.mean, g.histogram[0], g.histogram[1],
               g.histogram[2], g.histogram[3]);
  }
}

}  // namespace qoe
