// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qoe/criteria.hpp"
#include "qoe/error.hpp"

using namespace qoe;

namespace {

// Two-sided p of Student's t by Simpson integration of the density.
double t_pvalue_oracle(double t, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI);
  auto f = [&](double x) { return c * std::pow(1 + x * x / df, -(df + 1) / 2); };
  const int n = 20000;
  const double b = std::abs(t), h = b / n;
  double s = f(0) + f(b);
  for (int i = 1; i < n; ++i) s += f(i * h) * (i % 2 ? 4 : 2);
  return 1 - 2 * s * h / 3;
}

double brute_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0;
  for (double p : pos)
    for (double q : neg) wins += p > q ? 1.0 : p == q ? 0.5 : 0.0;
  return wins / (pos.size() * neg.size());
}

std::vector<VideoStats> stats_from(const std::vector<double>& means, double sd, std::size_t count) {
  std::vector<VideoStats> out;
  for (std::size_t i = 0; i < means.size(); ++i) out.push_back({"v" + std::to_string(i), means[i], sd, count});
  return out;
}

}  // namespace

TEST(Correlations, MappedAndRankMetrics) {
  std::vector<double> pred, mos;
  for (int i = 0; i < 30; ++i) {
    pred.push_back(i);
    mos.push_back(1 + 4 / (1 + std::exp(-0.3 * (i - 15))));
  }
  const auto r = correlations(pred, mos);
  EXPECT_EQ(r.samples, 30u);
  EXPECT_NEAR(r.srcc, 1.0, 1e-12);
  EXPECT_NEAR(r.krcc, 1.0, 1e-12);
  EXPECT_GT(r.plcc, 0.999999);
  EXPECT_LT(r.rmse, 1e-5);
}

TEST(Welch, MatchesQuadratureOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 60; ++trial) {
    const VideoStats a{"a", 1 + 4 * u(rng), 0.2 + u(rng), 2 + rng() % 30};
    const VideoStats b{"b", 1 + 4 * u(rng), 0.2 + u(rng), 2 + rng() % 30};
    const auto r = welch_test(a, b);
    const double va = a.stddev * a.stddev / a.count, vb = b.stddev * b.stddev / b.count;
    const double t = (a.mean - b.mean) / std::sqrt(va + vb);
    const double df = std::pow(va + vb, 2) / (va * va / (a.count - 1) + vb * vb / (b.count - 1));
    EXPECT_NEAR(r.t, t, 1e-12);
    EXPECT_NEAR(r.df, df, 1e-9);
    EXPECT_NEAR(r.p_value, t_pvalue_oracle(t, df), 1e-7) << "t=" << t << " df=" << df;
  }
}

TEST(Welch, ZeroVariance) {
  EXPECT_EQ(welch_test({"a", 3, 0, 5}, {"b", 3, 0, 5}).p_value, 1.0);
  EXPECT_EQ(welch_test({"a", 5, 0, 20}, {"b", 1, 0, 20}).p_value, 0.0);
}

TEST(Pairs, IdenticalAndSeparated) {
  const auto same = partition_pairs(stats_from({3.0, 3.0}, 1.0, 10));
  EXPECT_EQ(same.pairs.at(0).significance, Significance::similar);
  EXPECT_EQ(same.pairs.at(0).direction, Direction::none);
  const auto apart = partition_pairs(stats_from({5.0, 1.0}, 0.0, 20));
  EXPECT_EQ(apart.pairs.at(0).significance, Significance::different);
  EXPECT_EQ(apart.pairs.at(0).direction, Direction::a_better);
  EXPECT_EQ(apart.test, "welch_t_two_sided");
}

TEST(Pairs, FromRawMatrix) {
  std::vector<std::optional<double>> cells;
  for (int s = 0; s < 20; ++s) cells.insert(cells.end(), {5.0, 1.0});
  std::vector<std::string> subjects;
  for (int s = 0; s < 20; ++s) subjects.push_back("s" + std::to_string(s));
  const RatingsMatrix m(subjects, {"A", "B"}, cells);
  const auto p = partition_pairs(video_stats(m));
  EXPECT_EQ(p.pairs[0].direction, Direction::a_better);
}

TEST(Pairs, LabelsMatchIndependentTest) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<VideoStats> stats;
  for (int i = 0; i < 25; ++i) stats.push_back({"v" + std::to_string(i), 1 + 4 * u(rng), 0.3 + u(rng), 5 + rng() % 20});
  const auto part = partition_pairs(stats);
  ASSERT_EQ(part.pairs.size(), 300u);
  for (const auto& p : part.pairs) {
    const auto& a = stats[p.a];
    const auto& b = stats[p.b];
    const double va = a.stddev * a.stddev / a.count, vb = b.stddev * b.stddev / b.count;
    const double t = (a.mean - b.mean) / std::sqrt(va + vb);
    const double df = std::pow(va + vb, 2) / (va * va / (a.count - 1) + vb * vb / (b.count - 1));
    const bool different = t_pvalue_oracle(t, df) < 0.05;
    EXPECT_EQ(p.significance == Significance::different, different);
    EXPECT_EQ(p.direction != Direction::none, different);
  }
}

TEST(Pairs, NeedTwoRaters) {
  EXPECT_THROW(partition_pairs(stats_from({1, 2}, 1.0, 1)), Error);
}

TEST(Auc, MatchesMannWhitneyCount) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> pos(1 + rng() % 100), neg(1 + rng() % 100);
    const int levels = trial % 2 ? 5 : 1000000;
    for (auto& x : pos) x = static_cast<double>(rng() % levels) + 1;
    for (auto& x : neg) x = static_cast<double>(rng() % levels);
    EXPECT_NEAR(auc(pos, neg), brute_auc(pos, neg), 1e-12);
  }
}

TEST(Auc, ReversalComplements) {
  std::mt19937_64 rng(13);
  std::vector<double> pos(40), neg(30);
  for (auto& x : pos) x = std::uniform_real_distribution<>(0, 1)(rng);
  for (auto& x : neg) x = std::uniform_real_distribution<>(0, 1)(rng);
  std::vector<double> rp, rn;
  for (double x : pos) rp.push_back(-x);
  for (double x : neg) rn.push_back(-x);
  EXPECT_NEAR(auc(rp, rn), 1 - auc(pos, neg), 1e-12);
}

TEST(Auc, EmptyClassNamesTask) {
  try {
    auc({}, std::vector<double>{1.0}, "better_vs_worse");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::undefined_auc);
    EXPECT_NE(std::string(e.what()).find("better_vs_worse"), std::string::npos);
  }
}

TEST(Auc, DelongComponentsMatchPairwiseKernel) {
  std::mt19937_64 rng(17);
  std::vector<double> pos(25), neg(35);
  for (auto& x : pos) x = static_cast<double>(rng() % 8);
  for (auto& x : neg) x = static_cast<double>(rng() % 6);
  const auto c = delong_components(pos, neg);
  for (std::size_t i = 0; i < pos.size(); ++i) EXPECT_NEAR(c.v10[i], brute_auc({pos[i]}, neg), 1e-12);
  for (std::size_t j = 0; j < neg.size(); ++j) EXPECT_NEAR(c.v01[j], brute_auc(pos, {neg[j]}), 1e-12);
}

TEST(Auc, MosItselfAndConstantPredictor) {
  std::vector<double> means;
  for (int i = 0; i < 20; ++i) means.push_back(1 + 0.2 * i);
  const auto part = partition_pairs(stats_from(means, 0.5, 20));
  const auto perfect = auc_analysis(with_predictions(part, means));
  EXPECT_DOUBLE_EQ(perfect.auc_better_vs_worse, 1.0);
  EXPECT_EQ(perfect.different_pairs + perfect.similar_pairs, 190u);
  const auto flat = auc_analysis(with_predictions(part, std::vector<double>(20, 2.0)));
  EXPECT_DOUBLE_EQ(flat.auc_different_vs_similar, 0.5);
  EXPECT_DOUBLE_EQ(flat.auc_better_vs_worse, 0.5);
}

TEST(Auc, SimilarOnlyPartitionIsUndefined) {
  const auto part = partition_pairs(stats_from({3, 3, 3}, 1, 10));
  try {
    auc_analysis(with_predictions(part, std::vector<double>{1, 2, 3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::undefined_auc);
  }
}

TEST(CompareModels, SelfAndPerfectVsConstant) {
  std::vector<double> means;
  for (int i = 0; i < 30; ++i) means.push_back(1 + 4.0 * ((i * 7) % 30) / 29.0);
  const auto part = partition_pairs(stats_from(means, 0.6, 20));
  const std::vector<ModelScores> models{{"oracle", means}, {"same", means}, {"flat", std::vector<double>(30, 1.0)}};
  const auto cmp = compare_models(part, models);
  EXPECT_EQ(cmp.different_vs_similar.matrix[0][1].order, ModelOrder::indistinguishable);
  EXPECT_EQ(cmp.better_vs_worse.matrix[0][2].order, ModelOrder::better);
  EXPECT_EQ(cmp.better_vs_worse.matrix[2][0].order, ModelOrder::worse);
  EXPECT_EQ(cmp.different_vs_similar.matrix[0][2].order, ModelOrder::better);
  EXPECT_THROW(compare_models(part, std::span(models).first(1)), Error);
  const std::vector<ModelScores> short_model{{"a", means}, {"b", {1.0, 2.0}}};
  EXPECT_THROW(compare_models(part, short_model), Error);
}

TEST(CompareModels, EqualModelsRarelySeparated) {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> noise(0.0, 0.6);
  std::uniform_real_distribution<double> u(1.0, 5.0);
  int indistinguishable = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> means(32);
    for (auto& m : means) m = u(rng);
    const auto part = partition_pairs(stats_from(means, 0.8, 20));  // 496 pairs
    std::vector<double> a, b;
    for (double m : means) a.push_back(m + noise(rng)), b.push_back(m + noise(rng));
    const std::vector<ModelScores> models{{"a", a}, {"b", b}};
    const auto cmp = compare_models(part, models);
    indistinguishable += cmp.different_vs_similar.matrix[0][1].order == ModelOrder::indistinguishable &&
                         cmp.better_vs_worse.matrix[0][1].order == ModelOrder::indistinguishable;
  }
  EXPECT_GE(indistinguishable, 90);
}
