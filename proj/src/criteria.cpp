// SPDX-License-Identifier: Apache-2.0

#include "qoe/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "qoe/error.hpp"
#include "qoe/rank_stats.hpp"

namespace qoe {
namespace {

double two_sided_normal_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

double covariance(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
  double acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += (a[i] - ma) * (b[i] - mb);
  return acc / static_cast<double>(n - 1);
}

}  // namespace

CorrelationReport correlations(std::span<const double> predictions, std::span<const double> mos) {
  CorrelationReport report;
  report.fit = fit_logistic(predictions, mos);
  const auto mapped = report.fit.params.map(predictions);
  report.samples = predictions.size();
  report.plcc = pearson(mapped, mos);
  report.srcc = spearman(predictions, mos);
  report.krcc = kendall_tau_b(predictions, mos);
  report.rmse = rmse(mapped, mos);
  return report;
}

std::vector<VideoStats> video_stats(const MosTable& table) {
  std::vector<VideoStats> out;
  for (const auto& row : table.rows) out.push_back(VideoStats{row.video_id, row.mos, row.stddev, row.rater_count});
  return out;
}

std::vector<VideoStats> video_stats(const RatingsMatrix& ratings) {
  std::vector<VideoStats> out;
  for (std::size_t v = 0; v < ratings.video_count(); ++v) {
    const auto scores = ratings.video_scores(v);
    VideoStats s;
    s.video_id = ratings.videos()[v];
    s.count = scores.size();
    if (!scores.empty()) s.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(s.count);
    if (scores.size() > 1) {
      double acc = 0;
      for (double x : scores) acc += (x - s.mean) * (x - s.mean);
      s.stddev = std::sqrt(acc / static_cast<double>(s.count - 1));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string to_string(Significance significance) {
  return significance == Significance::different ? "different" : "similar";
}

std::string to_string(Direction direction) {
  switch (direction) {
    case Direction::a_better: return "a_better";
    case Direction::b_better: return "b_better";
    case Direction::none: break;
  }
  return "none";
}

std::string to_string(ModelOrder order) {
  switch (order) {
    case ModelOrder::better: return "better";
    case ModelOrder::worse: return "worse";
    case ModelOrder::indistinguishable: break;
  }
  return "indistinguishable";
}

WelchResult welch_test(const VideoStats& a, const VideoStats& b) {
  if (a.count < 2 || b.count < 2) {
    fail(ErrorKind::invalid_argument,
         fmt::format("significance test needs two ratings per video ({}: {}, {}: {})", a.video_id, a.count, b.video_id,
                     b.count));
  }
  const double na = static_cast<double>(a.count);
  const double nb = static_cast<double>(b.count);
  const double va = a.stddev * a.stddev / na;
  const double vb = b.stddev * b.stddev / nb;
  const double diff = a.mean - b.mean;
  WelchResult r;
  if (!(va + vb > 0)) {
    r.df = na + nb - 2;
    if (diff == 0) {
      r.t = 0;
      r.p_value = 1;
    } else {
      r.t = std::copysign(std::numeric_limits<double>::infinity(), diff);
      r.p_value = 0;
    }
    return r;
  }
  r.t = diff / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) / (va * va / (na - 1) + vb * vb / (nb - 1));
  const boost::math::students_t dist(r.df);
  r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))));
  return r;
}

std::size_t PairPartition::different_count() const {
  return static_cast<std::size_t>(
      std::ranges::count(pairs, Significance::different, &PairRecord::significance));
}

PairPartition partition_pairs(std::span<const VideoStats> stats, double alpha) {
  if (!(alpha > 0 && alpha < 1)) fail(ErrorKind::invalid_argument, fmt::format("alpha must lie in (0, 1), got {}", alpha));
  for (const auto& s : stats) {
    if (s.count < 2) {
      fail(ErrorKind::invalid_argument, fmt::format("video {} has {} rater(s); pairs need at least 2", s.video_id, s.count));
    }
  }
  PairPartition out;
  out.alpha = alpha;
  for (const auto& s : stats) out.video_ids.push_back(s.video_id);
  out.pairs.reserve(stats.size() * (stats.size() - (stats.empty() ? 0 : 1)) / 2);
  for (std::size_t a = 0; a < stats.size(); ++a) {
    for (std::size_t b = a + 1; b < stats.size(); ++b) {
      PairRecord rec;
      rec.a = a;
      rec.b = b;
      rec.delta_mos = stats[a].mean - stats[b].mean;
      if (welch_test(stats[a], stats[b]).p_value < alpha) {
        rec.significance = Significance::different;
        rec.direction = rec.delta_mos > 0 ? Direction::a_better : Direction::b_better;
      }
      out.pairs.push_back(rec);
    }
  }
  return out;
}

PairPartition with_predictions(const PairPartition& partition, std::span<const double> predictions) {
  if (predictions.size() != partition.video_ids.size()) {
    fail(ErrorKind::invalid_argument, fmt::format("{} predictions for {} videos", predictions.size(),
                                                  partition.video_ids.size()));
  }
  PairPartition out = partition;
  for (auto& p : out.pairs) p.delta_pred = predictions[p.a] - predictions[p.b];
  return out;
}

DelongComponents delong_components(std::span<const double> positives, std::span<const double> negatives) {
  const std::size_t m = positives.size();
  const std::size_t n = negatives.size();
  if (m == 0 || n == 0) {
    fail(ErrorKind::undefined_auc, fmt::format("AUC needs both classes ({} positives, {} negatives)", m, n));
  }
  std::vector<double> all(positives.begin(), positives.end());
  all.insert(all.end(), negatives.begin(), negatives.end());
  const auto combined = midranks(all);
  const auto pos_ranks = midranks(positives);
  const auto neg_ranks = midranks(negatives);
  DelongComponents c;
  c.v10.resize(m);
  c.v01.resize(n);
  double sum = 0;
  for (std::size_t i = 0; i < m; ++i) {
    c.v10[i] = (combined[i] - pos_ranks[i]) / static_cast<double>(n);
    sum += c.v10[i];
  }
  for (std::size_t j = 0; j < n; ++j) c.v01[j] = 1.0 - (combined[m + j] - neg_ranks[j]) / static_cast<double>(m);
  c.auc = sum / static_cast<double>(m);
  return c;
}

double auc(std::span<const double> positives, std::span<const double> negatives, const std::string& task) {
  if (positives.empty() || negatives.empty()) {
    fail(ErrorKind::undefined_auc, fmt::format("{}: AUC undefined with {} positive and {} negative samples", task,
                                               positives.size(), negatives.size()));
  }
  return delong_components(positives, negatives).auc;
}

AucSamples different_vs_similar_samples(const PairPartition& partition) {
  AucSamples s;
  for (const auto& p : partition.pairs) {
    (p.significance == Significance::different ? s.positives : s.negatives).push_back(std::abs(p.delta_pred));
  }
  return s;
}

AucSamples better_vs_worse_samples(const PairPartition& partition) {
  AucSamples s;
  for (const auto& p : partition.pairs) {
    if (p.significance != Significance::different) continue;
    const double oriented = p.direction == Direction::a_better ? p.delta_pred : -p.delta_pred;
    s.positives.push_back(oriented);
    s.negatives.push_back(-oriented);
  }
  return s;
}

AucReport auc_analysis(const PairPartition& partition) {
  AucReport r;
  r.different_pairs = partition.different_count();
  r.similar_pairs = partition.pairs.size() - r.different_pairs;
  const auto dvs = different_vs_similar_samples(partition);
  r.auc_different_vs_similar = auc(dvs.positives, dvs.negatives, kTaskDifferentSimilar);
  const auto bvw = better_vs_worse_samples(partition);
  r.auc_better_vs_worse = auc(bvw.positives, bvw.negatives, kTaskBetterWorse);
  return r;
}

namespace {

// Video pair behind every positive and negative sample of a task, in sample order.
struct SampleOrigins {
  std::vector<std::size_t> positive_pairs;
  std::vector<std::size_t> negative_pairs;
};

SampleOrigins origins(const PairPartition& partition, bool better_vs_worse) {
  SampleOrigins o;
  for (std::size_t k = 0; k < partition.pairs.size(); ++k) {
    const bool different = partition.pairs[k].significance == Significance::different;
    if (better_vs_worse) {
      if (!different) continue;
      o.positive_pairs.push_back(k);
      o.negative_pairs.push_back(k);
    } else {
      (different ? o.positive_pairs : o.negative_pairs).push_back(k);
    }
  }
  return o;
}

// Variance of AUC_r - AUC_c from the linearized (DeLong) contributions of the
// samples. Samples are pairs of videos, so two samples that share a video are
// not independent: every product of contributions that share at least one
// video is kept (dyadic clustering), i.e. sum_v T_v^2 - sum_p U_p^2 with T_v
// the summed contributions touching video v and U_p those of video pair p.
// Falls back to the independent-sample DeLong variance if that is not positive.
double difference_variance(const PairPartition& partition, const SampleOrigins& o, const DelongComponents& r,
                           const DelongComponents& c) {
  const double m = static_cast<double>(r.v10.size());
  const double n = static_cast<double>(r.v01.size());
  std::vector<double> per_video(partition.video_ids.size(), 0.0);
  std::vector<double> per_pair(partition.pairs.size(), 0.0);
  auto add = [&](std::size_t pair, double w) {
    per_video[partition.pairs[pair].a] += w;
    per_video[partition.pairs[pair].b] += w;
    per_pair[pair] += w;
  };
  for (std::size_t i = 0; i < r.v10.size(); ++i) add(o.positive_pairs[i], ((r.v10[i] - r.auc) - (c.v10[i] - c.auc)) / m);
  for (std::size_t j = 0; j < r.v01.size(); ++j) add(o.negative_pairs[j], ((r.v01[j] - r.auc) - (c.v01[j] - c.auc)) / n);
  double shared = 0;
  double within = 0;
  for (double t : per_video) shared += t * t;
  for (double u : per_pair) within += u * u;
  const double clustered = shared - within;
  if (clustered > 0) return clustered;
  return (covariance(r.v10, r.v10) + covariance(c.v10, c.v10) - 2 * covariance(r.v10, c.v10)) / m +
         (covariance(r.v01, r.v01) + covariance(c.v01, c.v01) - 2 * covariance(r.v01, c.v01)) / n;
}

TaskComparison compare_task(const std::string& task, const PairPartition& partition, const SampleOrigins& o,
                            const std::vector<DelongComponents>& comps, double alpha) {
  TaskComparison out;
  out.task = task;
  const std::size_t k = comps.size();
  for (const auto& c : comps) out.aucs.push_back(c.auc);
  out.matrix.assign(k, std::vector<AucComparison>(k));
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      if (r == c) continue;
      const double diff = comps[r].auc - comps[c].auc;
      const double var = difference_variance(partition, o, comps[r], comps[c]);
      AucComparison cmp;
      if (var > 0) {
        cmp.z = diff / std::sqrt(var);
        cmp.p_value = two_sided_normal_p(cmp.z);
      } else if (diff != 0) {
        cmp.z = std::copysign(std::numeric_limits<double>::infinity(), diff);
        cmp.p_value = 0;
      }
      if (cmp.p_value < alpha) cmp.order = diff > 0 ? ModelOrder::better : ModelOrder::worse;
      out.matrix[r][c] = cmp;
    }
  }
  return out;
}

}  // namespace

ModelComparison compare_models(const PairPartition& partition, std::span<const ModelScores> models, double alpha) {
  if (models.size() < 2) fail(ErrorKind::invalid_argument, "model comparison needs at least two models");
  ModelComparison out;
  out.alpha = alpha;
  std::vector<DelongComponents> dvs;
  std::vector<DelongComponents> bvw;
  for (const auto& model : models) {
    if (model.predictions.size() != partition.video_ids.size()) {
      fail(ErrorKind::invalid_argument, fmt::format("model {} has {} predictions for {} videos", model.name,
                                                    model.predictions.size(), partition.video_ids.size()));
    }
    out.models.push_back(model.name);
    const PairPartition scored = with_predictions(partition, model.predictions);
    const auto s1 = different_vs_similar_samples(scored);
    if (s1.positives.empty() || s1.negatives.empty()) {
      fail(ErrorKind::undefined_auc, std::string(kTaskDifferentSimilar) + ": one class is empty");
    }
    dvs.push_back(delong_components(s1.positives, s1.negatives));
    const auto s2 = better_vs_worse_samples(scored);
    if (s2.positives.empty()) fail(ErrorKind::undefined_auc, std::string(kTaskBetterWorse) + ": no different pairs");
    bvw.push_back(delong_components(s2.positives, s2.negatives));
  }
  out.different_vs_similar = compare_task(kTaskDifferentSimilar, partition, origins(partition, false), dvs, alpha);
  out.better_vs_worse = compare_task(kTaskBetterWorse, partition, origins(partition, true), bvw, alpha);
  return out;
}

}  // namespace qoe
