// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qoe {

/// 1-based ranks; tied values share the average of their positions.
std::vector<double> midranks(std::span<const double> values);

/// NaN when either side is constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of the midranks.
double spearman(std::span<const double> x, std::span<const double> y);

/// Pair counts behind Kendall's tau.
struct KendallCounts {
  std::int64_t pairs = 0;       // n (n - 1) / 2
  std::int64_t tied_x = 0;      // pairs tied in x (including joint ties)
  std::int64_t tied_y = 0;      // pairs tied in y (including joint ties)
  std::int64_t tied_xy = 0;     // pairs tied in both
  std::int64_t discordant = 0;  // pairs ordered oppositely

  std::int64_t concordant() const noexcept { return pairs - tied_x - tied_y + tied_xy - discordant; }
};

/// O(n log n) counting: sort by (x, y), then count inversions of y by merge sort.
KendallCounts kendall_counts(std::span<const double> x, std::span<const double> y);

/// Tie-corrected tau-b; NaN when either side is constant.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

double rmse(std::span<const double> x, std::span<const double> y);

double median(std::span<const double> values);

}  // namespace qoe
