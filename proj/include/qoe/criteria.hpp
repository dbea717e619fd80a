// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "qoe/logistic.hpp"
#include "qoe/ratings.hpp"
#include "qoe/subjective.hpp"

namespace qoe {

struct CorrelationReport {
  double plcc = 0.0;  // mapped predictions vs MOS
  double srcc = 0.0;  // raw predictions vs MOS
  double krcc = 0.0;  // raw predictions vs MOS, tau-b
  double rmse = 0.0;  // mapped predictions vs MOS, MOS units
  std::size_t samples = 0;
  LogisticFit fit;
};

/// VQEG-style correlations. Rank correlations use the raw predictions, PLCC and
/// RMSE the logistic-mapped ones. Same preconditions as fit_logistic.
CorrelationReport correlations(std::span<const double> predictions, std::span<const double> mos);

/// Per-video summary feeding the pairwise significance test.
struct VideoStats {
  std::string video_id;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  std::size_t count = 0;
};

std::vector<VideoStats> video_stats(const MosTable& table);
/// Raw-score statistics straight from the matrix.
std::vector<VideoStats> video_stats(const RatingsMatrix& ratings);

enum class Significance { different, similar };
enum class Direction { a_better, b_better, none };

std::string to_string(Significance significance);
std::string to_string(Direction direction);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;  // two-sided
};

/// Welch's unequal-variance t test from summary statistics. Two zero-variance
/// samples give p = 1 when the means agree and p = 0 otherwise.
WelchResult welch_test(const VideoStats& a, const VideoStats& b);

struct PairRecord {
  std::size_t a = 0;  // index into PairPartition::video_ids, a < b
  std::size_t b = 0;
  Significance significance = Significance::similar;
  Direction direction = Direction::none;
  double delta_mos = 0.0;   // mean_a - mean_b
  double delta_pred = 0.0;  // pred_a - pred_b, zero until predictions are attached
};

struct PairPartition {
  std::vector<std::string> video_ids;
  std::vector<PairRecord> pairs;
  std::string test = "welch_t_two_sided";
  double alpha = 0.05;

  std::size_t different_count() const;
};

/// Labels every unordered video pair different/similar with a two-sided Welch
/// test at level alpha; different pairs are oriented by the sign of delta MOS.
/// Throws invalid_argument when a video has fewer than two raters.
PairPartition partition_pairs(std::span<const VideoStats> stats, double alpha = 0.05);

/// Copy of the partition with delta_pred filled from per-video predictions
/// (aligned with partition.video_ids).
PairPartition with_predictions(const PairPartition& partition, std::span<const double> predictions);

/// Normalized Mann-Whitney statistic: P(pos > neg) + P(pos == neg) / 2.
/// Throws undefined_auc naming `task` when either class is empty.
double auc(std::span<const double> positives, std::span<const double> negatives,
           const std::string& task = "auc");

/// Classifier samples for the two tasks.
struct AucSamples {
  std::vector<double> positives;
  std::vector<double> negatives;
};

/// Different vs similar: |delta_pred|, different pairs positive.
AucSamples different_vs_similar_samples(const PairPartition& partition);
/// Better vs worse over different pairs: each pair contributes its oriented
/// delta_pred as a positive and the negated value as a negative.
AucSamples better_vs_worse_samples(const PairPartition& partition);

inline constexpr const char* kTaskDifferentSimilar = "different_vs_similar";
inline constexpr const char* kTaskBetterWorse = "better_vs_worse";

struct AucReport {
  double auc_different_vs_similar = 0.5;
  double auc_better_vs_worse = 0.5;
  std::size_t different_pairs = 0;
  std::size_t similar_pairs = 0;
};

AucReport auc_analysis(const PairPartition& partition);

/// DeLong structural components of one AUC estimate.
struct DelongComponents {
  double auc = 0.5;
  std::vector<double> v10;  // per positive
  std::vector<double> v01;  // per negative
};

DelongComponents delong_components(std::span<const double> positives, std::span<const double> negatives);

enum class ModelOrder { better, worse, indistinguishable };
std::string to_string(ModelOrder order);

struct ModelScores {
  std::string name;
  std::vector<double> predictions;  // aligned with PairPartition::video_ids
};

struct AucComparison {
  double z = 0.0;
  double p_value = 1.0;
  ModelOrder order = ModelOrder::indistinguishable;  // of the row model relative to the column model
};

struct TaskComparison {
  std::string task;
  std::vector<double> aucs;                         // per model
  std::vector<std::vector<AucComparison>> matrix;  // [row][column]
};

struct ModelComparison {
  std::vector<std::string> models;
  TaskComparison different_vs_similar;
  TaskComparison better_vs_worse;
  std::string test = "correlated_auc_z_delong_video_clustered";
  double alpha = 0.05;
};

/// Two-sided z test on the difference of correlated AUCs (same pairs, two
/// models). The variance of the difference comes from DeLong's structural
/// components, summed over all sample products that share a video, since pairs
/// built from the same video are dependent.
/// Throws invalid_argument when a model's predictions do not match the
/// partition, or when fewer than two models are given.
ModelComparison compare_models(const PairPartition& partition, std::span<const ModelScores> models,
                               double alpha = 0.05);

/// Everything needed to reproduce one evaluation.
struct EvaluationReport {
  std::string model;
  CorrelationReport correlations;
  AucReport auc;
  std::size_t video_count = 0;
  std::string pair_test;
  double alpha = 0.05;
  std::string mos_rescaling;
};

}  // namespace qoe
