#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coalgene/gene_process.hpp"

namespace coalgene {

struct VerifyOptions {
  double mean_threshold = 4.0;      // |z| bound for mean checks
  double variance_threshold = 6.0;  // |z| bound for variance/covariance checks
  int bootstrap_resamples = 1000;   // resamples behind variance-type standard errors
  int jobs = 1;                     // worker threads over replicates
  /// The incongruence statistic costs O(m^2) per replicate; disable it for
  /// parameter sets with thousands of genes per sample.
  bool with_incongruence = true;
};

enum class CheckKind { kMean, kVariance, kCovariance };

struct MomentCheck {
  std::string name;
  CheckKind kind = CheckKind::kMean;
  double theoretical = 0.0;
  double estimate = 0.0;
  double standard_error = 0.0;
  double z = 0.0;
  bool pass = false;
};

struct VerificationReport {
  int n = 0;
  double theta = 0.0;
  double rho = 0.0;
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  double seconds = 0.0;
  std::vector<MomentCheck> checks;

  bool all_pass() const;
};

/// Simulates `replicates` independent samples and compares the empirical
/// moments of every implemented statistic (per-individual average, pairwise
/// differences, pangenome size, each spectrum class, incongruence, and the
/// gene-count / one-sided-difference moments over the fixed leaf tuples
/// (1,2), (1,2,3), (1,2,3,4)) against their closed forms. Mean checks use
/// the plain standard error; variance and covariance checks use a bootstrap
/// standard error. Results are identical for a given (seed, replicates)
/// regardless of the worker count: replicate r always consumes the stream
/// derived from (seed, r), and reductions run in index order.
///
/// Requires replicates >= 100, rho > 0 and core_size = 0 (the closed forms
/// describe the dispensable genome).
VerificationReport verify_moments(int n, const ModelParams& params,
                                  std::uint64_t replicates, std::uint64_t seed,
                                  const VerifyOptions& options = {});

/// Report as tab-separated rows (name, kind, theory, estimate, se, z, pass).
std::string report_tsv(const VerificationReport& report);
/// Report as an aligned human-readable table with a PASS/FAIL verdict line.
std::string report_text(const VerificationReport& report);

}  // namespace coalgene
