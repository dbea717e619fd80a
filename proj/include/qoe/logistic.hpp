// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace qoe {

/// f(p) = xi1 (1/2 - 1 / (1 + exp(xi2 (p - xi3)))) + xi4 p + xi5
struct LogisticParams {
  std::array<double, 5> xi{};

  double operator()(double prediction) const noexcept;
  std::vector<double> map(std::span<const double> predictions) const;
};

struct FitDiagnostics {
  int iterations = 0;        // summed over all starts
  int starts = 0;
  double residual_norm = 0;  // sqrt(sum of squared residuals) at the solution
  double gradient_norm = 0;  // |J^T r| at the solution, in normalized coordinates
  bool converged = false;    // gradient tolerance reached
  std::string stop_reason;
};

struct LogisticFit {
  LogisticParams params;
  FitDiagnostics diagnostics;
};

struct FitOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-8;
  int restarts = 5;
};

/// Least-squares fit of the five-parameter logistic mapping from predictions to
/// MOS by Levenberg-Marquardt.
///
/// Predictions are standardized before fitting and the parameters mapped back.
/// The primary start is xi3 = median(pred), xi2 = 4 / range(pred),
/// xi1 = range(mos) with xi4, xi5 from the least-squares line. If it stops
/// short of the gradient tolerance, up to `restarts` further starts jitter xi2
/// (sign flips and rescaling). The pure line (xi1 = 0) is always tried as well,
/// so the result is never worse than the best affine map. Lowest cost wins.
///
/// Throws invalid_argument for fewer than six samples, mismatched lengths or
/// non-finite input, degenerate_fit for constant predictions.
LogisticFit fit_logistic(std::span<const double> predictions, std::span<const double> mos,
                         const FitOptions& options = {});

}  // namespace qoe
