#include "coalgene/infer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coalgene/theory.hpp"

namespace coalgene {

namespace {

struct ProfileFit {
  double theta = 0.0;
  double gc = 0.0;
  bool clamped = false;
  double sse = 0.0;
};

// Optimal (theta, gc) and objective for a fixed rho.
ProfileFit profile_at_rho(const std::vector<double>& observed,
                          const std::vector<double>& weights, double rho) {
  const int n = static_cast<int>(observed.size());
  std::vector<double> shape(observed.size());
  for (int k = 1; k <= n; ++k) {
    shape[static_cast<std::size_t>(k) - 1] = theory::spectrum_mean(n, k, 1.0, rho);
  }

  const auto theta_over = [&](int classes) {
    double num = 0.0, den = 0.0;
    for (int k = 0; k < classes; ++k) {
      num += weights[static_cast<std::size_t>(k)] * shape[static_cast<std::size_t>(k)] *
             observed[static_cast<std::size_t>(k)];
      den += weights[static_cast<std::size_t>(k)] * shape[static_cast<std::size_t>(k)] *
             shape[static_cast<std::size_t>(k)];
    }
    return den > 0.0 ? num / den : 0.0;
  };

  ProfileFit fit;
  // The core size can absorb the full-sample class exactly, so theta is
  // first fit to the segregating classes alone.
  fit.theta = theta_over(n - 1);
  fit.gc = observed.back() - fit.theta * shape.back();
  if (fit.gc < 0.0) {
    fit.clamped = true;
    fit.gc = 0.0;
    fit.theta = theta_over(n);
  }
  fit.sse = 0.0;
  for (int k = 0; k < n; ++k) {
    const double predicted = fit.theta * shape[static_cast<std::size_t>(k)] +
                             (k == n - 1 ? fit.gc : 0.0);
    const double r = observed[static_cast<std::size_t>(k)] - predicted;
    fit.sse += weights[static_cast<std::size_t>(k)] * r * r;
  }
  return fit;
}

}  // namespace

FitResult fit_params(const SpectrumCounts& observed, const FitOptions& options) {
  if (static_cast<int>(observed.counts.size()) != observed.sample_size) {
    throw std::invalid_argument("fit_params: malformed spectrum");
  }
  return fit_params(std::vector<double>(observed.counts.begin(), observed.counts.end()),
                    options);
}

FitResult fit_params(const std::vector<double>& y, const FitOptions& options) {
  const int n = static_cast<int>(y.size());
  if (n < 3) {
    throw std::invalid_argument("fit_params: need a spectrum over at least 3 individuals");
  }
  if (!(options.rho_min > 0.0) || !(options.rho_max > options.rho_min) ||
      options.grid_points < 2) {
    throw std::invalid_argument("fit_params: invalid rho search interval");
  }
  int nonzero = 0;
  for (double c : y) {
    if (c < 0.0) throw std::invalid_argument("fit_params: negative class count");
    nonzero += c > 0.0 ? 1 : 0;
  }
  if (nonzero < 2) {
    throw FitError("fit_params: spectrum has fewer than two nonzero classes");
  }

  std::vector<double> w(y.size(), 1.0);
  if (options.weighted) {
    for (std::size_t k = 0; k < y.size(); ++k) w[k] = 1.0 / std::max(y[k], 1.0);
  }

  const auto objective = [&](double rho) { return profile_at_rho(y, w, rho).sse; };

  // Coarse pass: log-spaced grid, smallest rho wins ties.
  const double log_lo = std::log(options.rho_min);
  const double log_hi = std::log(options.rho_max);
  std::vector<double> grid(static_cast<std::size_t>(options.grid_points));
  for (int i = 0; i < options.grid_points; ++i) {
    grid[static_cast<std::size_t>(i)] =
        std::exp(log_lo + (log_hi - log_lo) * i / (options.grid_points - 1));
  }
  int best = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i < options.grid_points; ++i) {
    const double sse = objective(grid[static_cast<std::size_t>(i)]);
    if (sse < best_sse) {
      best_sse = sse;
      best = i;
    }
  }

  // Golden-section refinement on the bracketing grid cell pair.
  double lo = grid[static_cast<std::size_t>(std::max(0, best - 1))];
  double hi = grid[static_cast<std::size_t>(std::min(options.grid_points - 1, best + 1))];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > options.refine_tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    }
  }
  double rho_hat = 0.5 * (lo + hi);
  // Refinement must never lose to the coarse grid.
  if (objective(rho_hat) > best_sse) {
    rho_hat = grid[static_cast<std::size_t>(best)];
  }

  const ProfileFit fit = profile_at_rho(y, w, rho_hat);
  FitResult result;
  result.theta_hat = fit.theta;
  result.rho_hat = rho_hat;
  result.gc_hat = fit.gc;
  result.gc_rounded = static_cast<std::int64_t>(std::llround(fit.gc));
  result.gc_clamped = fit.clamped;
  result.sse = fit.sse;
  result.predicted = predicted_spectrum(
      n, ModelParams{.theta = fit.theta, .rho = rho_hat, .core_size = 0});
  result.predicted.back() += fit.gc;
  result.residuals.resize(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    result.residuals[k] = y[k] - result.predicted[k];
  }
  return result;
}

std::vector<double> predicted_spectrum(int n, const ModelParams& params) {
  params.validate();
  if (!(params.rho > 0.0)) {
    throw std::invalid_argument("predicted_spectrum: rho must be > 0");
  }
  std::vector<double> expected(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    expected[static_cast<std::size_t>(k) - 1] =
        theory::spectrum_mean(n, k, params.theta, params.rho);
  }
  expected.back() += static_cast<double>(params.core_size);
  return expected;
}

}  // namespace coalgene
