// SPDX-License-Identifier: Apache-2.0

#include "qoe/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "qoe/error.hpp"
#include "qoe/rank_stats.hpp"

namespace qoe {
namespace {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

double sigmoid(double x) noexcept {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Model in standardized prediction coordinates.
double model(const Vec5& a, double u) noexcept { return a[0] * (sigmoid(a[1] * (u - a[2])) - 0.5) + a[3] * u + a[4]; }

struct Problem {
  std::vector<double> u;
  std::vector<double> y;

  double cost(const Vec5& a) const {
    double c = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double r = model(a, u[i]) - y[i];
      c += r * r;
    }
    return 0.5 * c;
  }

  // Normal equations J^T J and gradient J^T r.
  void linearize(const Vec5& a, Mat5& jtj, Vec5& grad) const {
    jtj.setZero();
    grad.setZero();
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double d = u[i] - a[2];
      const double s = sigmoid(a[1] * d);
      const double ds = s * (1.0 - s);
      Vec5 j;
      j << s - 0.5, a[0] * ds * d, -a[0] * ds * a[1], u[i], 1.0;
      const double r = model(a, u[i]) - y[i];
      jtj.noalias() += j * j.transpose();
      grad.noalias() += j * r;
    }
  }
};

struct Run {
  Vec5 a;
  double cost = std::numeric_limits<double>::infinity();
  double gradient = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
};

bool converged_at(double gradient, double cost, double tol) { return gradient <= tol * (1.0 + cost); }

Run levenberg_marquardt(const Problem& p, Vec5 a, const FitOptions& options) {
  Run run;
  double lambda = 1e-3;
  double cost = p.cost(a);
  Mat5 jtj;
  Vec5 grad;
  p.linearize(a, jtj, grad);
  run.stop_reason = "iteration limit";
  for (int it = 0; it < options.max_iterations; ++it) {
    run.iterations = it + 1;
    if (converged_at(grad.lpNorm<Eigen::Infinity>(), cost, options.gradient_tolerance)) {
      run.stop_reason = "gradient tolerance";
      break;
    }
    bool improved = false;
    while (lambda < 1e16) {
      Mat5 damped = jtj;
      for (int k = 0; k < 5; ++k) damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      const Vec5 step = damped.ldlt().solve(-grad);
      const Vec5 trial = a + step;
      const double trial_cost = step.allFinite() ? p.cost(trial) : std::numeric_limits<double>::infinity();
      if (std::isfinite(trial_cost) && trial_cost < cost) {
        const bool tiny = step.norm() <= 1e-15 * (1.0 + a.norm());
        a = trial;
        cost = trial_cost;
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = !tiny;
        break;
      }
      lambda *= 4.0;
    }
    p.linearize(a, jtj, grad);
    if (!improved) {
      run.stop_reason = "no further decrease";
      break;
    }
  }
  run.a = a;
  run.cost = cost;
  run.gradient = grad.lpNorm<Eigen::Infinity>();
  run.converged = converged_at(run.gradient, cost, options.gradient_tolerance);
  if (run.converged) run.stop_reason = "gradient tolerance";
  return run;
}

// Least-squares line y = slope * u + intercept.
std::pair<double, double> ols_line(const Problem& p) {
  const double n = static_cast<double>(p.u.size());
  const double mu = std::accumulate(p.u.begin(), p.u.end(), 0.0) / n;
  const double my = std::accumulate(p.y.begin(), p.y.end(), 0.0) / n;
  double suy = 0;
  double suu = 0;
  for (std::size_t i = 0; i < p.u.size(); ++i) {
    suy += (p.u[i] - mu) * (p.y[i] - my);
    suu += (p.u[i] - mu) * (p.u[i] - mu);
  }
  const double slope = suy / suu;
  return {slope, my - slope * mu};
}

}  // namespace

double LogisticParams::operator()(double prediction) const noexcept {
  return xi[0] * (0.5 - 1.0 / (1.0 + std::exp(xi[1] * (prediction - xi[2])))) + xi[3] * prediction + xi[4];
}

std::vector<double> LogisticParams::map(std::span<const double> predictions) const {
  std::vector<double> out;
  out.reserve(predictions.size());
  for (double p : predictions) out.push_back((*this)(p));
  return out;
}

LogisticFit fit_logistic(std::span<const double> predictions, std::span<const double> mos, const FitOptions& options) {
  if (predictions.size() != mos.size()) {
    fail(ErrorKind::invalid_argument,
         fmt::format("{} predictions for {} MOS values", predictions.size(), mos.size()));
  }
  if (predictions.size() < 6) {
    fail(ErrorKind::invalid_argument, fmt::format("logistic fit needs at least 6 samples, got {}", predictions.size()));
  }
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::ranges::all_of(predictions, finite) || !std::ranges::all_of(mos, finite)) {
    fail(ErrorKind::invalid_argument, "logistic fit input contains non-finite values");
  }
  const double n = static_cast<double>(predictions.size());
  const double mu = std::accumulate(predictions.begin(), predictions.end(), 0.0) / n;
  double var = 0;
  for (double p : predictions) var += (p - mu) * (p - mu);
  const double sd = std::sqrt(var / n);
  if (!(sd > 0)) fail(ErrorKind::degenerate_fit, "predictions are constant; the logistic mapping is not identifiable");

  Problem prob;
  for (double p : predictions) prob.u.push_back((p - mu) / sd);
  prob.y.assign(mos.begin(), mos.end());

  const auto [ulo, uhi] = std::ranges::minmax(prob.u);
  const auto [ylo, yhi] = std::ranges::minmax(prob.y);
  const auto [slope, intercept] = ols_line(prob);

  Vec5 primary;
  primary << std::max(yhi - ylo, 1e-3), 4.0 / (uhi - ulo), median(prob.u), slope * 0.1, intercept;

  FitDiagnostics diag;
  Run best = levenberg_marquardt(prob, primary, options);
  diag.iterations = best.iterations;
  diag.starts = 1;

  static constexpr double kJitter[] = {-1.0, 2.0, 0.5, -2.0, 4.0, -0.5, 8.0, 0.25};
  for (int r = 0; r < options.restarts && !best.converged; ++r) {
    Vec5 start = primary;
    start[1] *= kJitter[static_cast<std::size_t>(r) % std::size(kJitter)];
    const Run run = levenberg_marquardt(prob, start, options);
    diag.iterations += run.iterations;
    ++diag.starts;
    if (run.cost < best.cost) best = run;
  }

  // The straight line is exact without iteration and bounds the result.
  Vec5 affine;
  affine << 0.0, primary[1], primary[2], slope, intercept;
  const double affine_cost = prob.cost(affine);
  ++diag.starts;
  if (affine_cost < best.cost) {
    Mat5 jtj;
    Vec5 grad;
    prob.linearize(affine, jtj, grad);
    best.a = affine;
    best.cost = affine_cost;
    best.gradient = grad.lpNorm<Eigen::Infinity>();
    best.converged = converged_at(best.gradient, affine_cost, options.gradient_tolerance);
    best.stop_reason = "affine least squares";
  }

  LogisticFit fit;
  const Vec5& a = best.a;
  fit.params.xi = {a[0], a[1] / sd, mu + sd * a[2], a[3] / sd, a[4] - a[3] * mu / sd};
  diag.residual_norm = std::sqrt(2.0 * best.cost);
  diag.gradient_norm = best.gradient;
  diag.converged = best.converged;
  diag.stop_reason = best.stop_reason;
  fit.diagnostics = diag;
  return fit;
}

}  // namespace qoe
