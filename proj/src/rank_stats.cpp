// SPDX-License-Identifier: Apache-2.0

#include "qoe/rank_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "qoe/error.hpp"

namespace qoe {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_paired(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    fail(ErrorKind::invalid_argument, fmt::format("paired samples differ in length ({} vs {})", x.size(), y.size()));
  }
}

std::int64_t tie_pairs(std::int64_t run) { return run * (run - 1) / 2; }

// Sorts v in place and returns the number of inversions (strict).
std::int64_t merge_count(std::vector<double>& v, std::vector<double>& scratch, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(v, scratch, lo, mid) + merge_count(v, scratch, mid, hi);
  std::size_t i = lo;
  std::size_t j = mid;
  std::size_t k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      scratch[k++] = v[j++];
    } else {
      scratch[k++] = v[i++];
    }
  }
  while (i < mid) scratch[k++] = v[i++];
  while (j < hi) scratch[k++] = v[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo), scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

std::vector<double> midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  require_paired(x, y);
  if (x.size() < 2) return kNaN;
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0;
  double sxx = 0;
  double syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0) || !(syy > 0)) return kNaN;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  require_paired(x, y);
  const auto rx = midranks(x);
  const auto ry = midranks(y);
  return pearson(rx, ry);
}

KendallCounts kendall_counts(std::span<const double> x, std::span<const double> y) {
  require_paired(x, y);
  const std::size_t n = x.size();
  KendallCounts c;
  c.pairs = tie_pairs(static_cast<std::int64_t>(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::ranges::sort(order, [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  std::int64_t run_x = 1;
  std::int64_t run_xy = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    const bool same_x = i < n && x[order[i]] == x[order[i - 1]];
    const bool same_xy = same_x && y[order[i]] == y[order[i - 1]];
    if (same_x) {
      ++run_x;
    } else {
      c.tied_x += tie_pairs(run_x);
      run_x = 1;
    }
    if (same_xy) {
      ++run_xy;
    } else {
      c.tied_xy += tie_pairs(run_xy);
      run_xy = 1;
    }
  }

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  std::vector<double> scratch(n);
  c.discordant = merge_count(ys, scratch, 0, n);

  std::int64_t run_y = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && ys[i] == ys[i - 1]) {
      ++run_y;
    } else {
      c.tied_y += tie_pairs(run_y);
      run_y = 1;
    }
  }
  if (n == 0) c.tied_x = c.tied_y = c.tied_xy = 0;
  return c;
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  const KendallCounts c = kendall_counts(x, y);
  const double n1 = static_cast<double>(c.pairs - c.tied_x);
  const double n2 = static_cast<double>(c.pairs - c.tied_y);
  if (!(n1 > 0) || !(n2 > 0)) return kNaN;
  const double num = static_cast<double>(c.concordant() - c.discordant);
  return std::clamp(num / std::sqrt(n1 * n2), -1.0, 1.0);
}

double rmse(std::span<const double> x, std::span<const double> y) {
  require_paired(x, y);
  if (x.empty()) return kNaN;
  double acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(acc / static_cast<double>(x.size()));
}

double median(std::span<const double> values) {
  if (values.empty()) return kNaN;
  std::vector<double> v(values.begin(), values.end());
  std::ranges::sort(v);
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

}  // namespace qoe
