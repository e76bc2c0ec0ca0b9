#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "coalgene/gene_process.hpp"
#include "coalgene/spectrum.hpp"

namespace coalgene {

struct FitOptions {
  double rho_min = 0.01;
  double rho_max = 100.0;
  int grid_points = 64;      // log-spaced coarse grid over [rho_min, rho_max]
  double refine_tol = 1e-6;  // golden-section bracket width on rho
  bool weighted = false;     // weight class k by 1/max(observed_k, 1)
};

struct FitResult {
  double theta_hat = 0.0;
  double rho_hat = 0.0;
  double gc_hat = 0.0;        // core genome size, fitted as a real
  std::int64_t gc_rounded = 0;
  bool gc_clamped = false;    // the unconstrained gc was negative and was pinned at 0
  double sse = 0.0;
  std::vector<double> residuals;  // observed - predicted, classes 1..n
  std::vector<double> predicted;  // expected spectrum at the fit, core included
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Least-squares fit of (theta, rho, core size) to an observed gene
/// frequency spectrum, matching class k counts against their expectations.
///
/// For fixed rho the objective is linear in theta and the core size, so
/// both are profiled out: the core size zeroes the full-sample class
/// residual (clamped at 0, in which case theta is refit over all classes)
/// and theta has a closed-form optimum over the remaining classes. The
/// outer one-dimensional problem in rho is solved on a log-spaced grid
/// followed by golden-section refinement; ties prefer the smallest rho.
///
/// Requires n >= 3 and at least two nonzero classes.
FitResult fit_params(const SpectrumCounts& observed, const FitOptions& options = {});

/// Same fit for a real-valued spectrum (classes 1..n), e.g. exact
/// expectations in self-consistency checks.
FitResult fit_params(const std::vector<double>& observed, const FitOptions& options = {});

/// Expected spectrum (classes 1..n) at the given parameters; the
/// full-sample class includes the core genome.
std::vector<double> predicted_spectrum(int n, const ModelParams& params);

}  // namespace coalgene
