// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "qoe/rank_stats.hpp"

using namespace qoe;

namespace {

struct PairCount {
  double concordant = 0, discordant = 0, tx = 0, ty = 0;
};

// O(n^2) reference over every pair.
PairCount brute_pairs(const std::vector<double>& x, const std::vector<double>& y) {
  PairCount c;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0) c.tx += 1;
      if (dy == 0) c.ty += 1;
      if (dx * dy > 0) c.concordant += 1;
      if (dx * dy < 0) c.discordant += 1;
    }
  return c;
}

double brute_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  const auto c = brute_pairs(x, y);
  const double n0 = x.size() * (x.size() - 1) / 2.0;
  return (c.concordant - c.discordant) / std::sqrt((n0 - c.tx) * (n0 - c.ty));
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, int levels) {
  std::vector<double> v(n);
  for (auto& x : v) x = levels > 0 ? static_cast<double>(rng() % levels) : std::uniform_real_distribution<>(-5, 5)(rng);
  return v;
}

}  // namespace

TEST(Midranks, TiesShareAverage) {
  EXPECT_EQ(midranks(std::vector<double>{10, 20, 20, 5}), (std::vector<double>{2, 3.5, 3.5, 1}));
  EXPECT_EQ(midranks(std::vector<double>{1, 1, 1}), (std::vector<double>{2, 2, 2}));
}

TEST(Correlation, PerfectAndReversed) {
  const std::vector<double> p{1, 2, 3};
  EXPECT_DOUBLE_EQ(spearman(p, std::vector<double>{10, 20, 30}), 1.0);
  EXPECT_DOUBLE_EQ(kendall_tau_b(p, std::vector<double>{10, 20, 30}), 1.0);
  EXPECT_DOUBLE_EQ(spearman(p, std::vector<double>{30, 20, 10}), -1.0);
  EXPECT_DOUBLE_EQ(kendall_tau_b(p, std::vector<double>{30, 20, 10}), -1.0);
}

TEST(Correlation, ConstantSideIsUndefined) {
  const std::vector<double> c{2, 2, 2, 2};
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_TRUE(std::isnan(pearson(c, v)));
  EXPECT_TRUE(std::isnan(spearman(v, c)));
  EXPECT_TRUE(std::isnan(kendall_tau_b(c, v)));
}

TEST(Kendall, CountsMatchBruteForce) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 120;
    const int levels = trial % 3 == 0 ? 0 : 2 + static_cast<int>(rng() % 6);
    const auto x = random_vector(rng, n, levels);
    const auto y = random_vector(rng, n, trial % 2 ? levels : 0);
    const auto c = kendall_counts(x, y);
    const auto b = brute_pairs(x, y);
    EXPECT_EQ(static_cast<double>(c.concordant()), b.concordant);
    EXPECT_EQ(static_cast<double>(c.discordant), b.discordant);
    EXPECT_EQ(static_cast<double>(c.tied_x), b.tx);
    EXPECT_EQ(static_cast<double>(c.tied_y), b.ty);
    const double tau = kendall_tau_b(x, y);
    const double ref = brute_tau_b(x, y);
    if (std::isnan(ref)) {
      EXPECT_TRUE(std::isnan(tau));
    } else {
      EXPECT_NEAR(tau, ref, 1e-12);
    }
  }
}

TEST(Spearman, MonotoneTransformInvariance) {
  std::mt19937_64 rng(43);
  const auto x = random_vector(rng, 150, 0);
  const auto y = random_vector(rng, 150, 7);
  const double rho = spearman(x, y);
  const double tau = kendall_tau_b(x, y);
  for (int k = 0; k < 20; ++k) {
    const double a = 0.1 + static_cast<double>(rng() % 100) / 10.0;
    std::vector<double> tx;
    for (double v : x) tx.push_back(k % 2 ? std::exp(v / a) : a * v * v * v + v);
    EXPECT_NEAR(spearman(tx, y), rho, 1e-12);
    EXPECT_NEAR(kendall_tau_b(tx, y), tau, 1e-12);
  }
}

TEST(Spearman, PermutationEquivariance) {
  std::mt19937_64 rng(47);
  auto x = random_vector(rng, 60, 0);
  auto y = random_vector(rng, 60, 0);
  const double rho = spearman(x, y);
  const double r = pearson(x, y);
  std::vector<std::size_t> perm(60);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> px, py;
  for (auto i : perm) px.push_back(x[i]), py.push_back(y[i]);
  EXPECT_NEAR(spearman(px, py), rho, 1e-12);
  EXPECT_NEAR(pearson(px, py), r, 1e-12);
}

TEST(Summary, RmseAndMedian) {
  EXPECT_DOUBLE_EQ(rmse(std::vector<double>{1, 2}, std::vector<double>{2, 4}), std::sqrt(2.5));
  EXPECT_DOUBLE_EQ(median(std::vector<double>{3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median(std::vector<double>{4, 1, 2, 3}), 2.5);
  EXPECT_THROW(rmse(std::vector<double>{1}, std::vector<double>{1, 2}), std::exception);
}
