#include "coalgene/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include "coalgene/stats.hpp"
#include "coalgene/theory.hpp"

namespace coalgene {

bool VerificationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const MomentCheck& c) { return c.pass; });
}

namespace {

struct ReplicateTable {
  std::vector<double> average, pairwise, pangenome, incongruence;
  std::vector<double> size0, size1;
  std::vector<double> x01, x10, x02, x20, x12, x21, x23, quad;
  std::vector<std::vector<double>> spectrum;  // [class-1][replicate]
};

double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

// Plain moment estimators; at the replicate counts used here the n/(n-1)
// correction is far below the Monte Carlo noise floor.
double cov_of(const std::vector<double>& xs, const std::vector<double>& ys) {
  double sx = 0.0, sy = 0.0, sxy = 0.0;
  const auto r = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxy += xs[i] * ys[i];
  }
  return sxy / r - (sx / r) * (sy / r);
}

MomentCheck mean_check(std::string name, const std::vector<double>& xs, double target,
                       double threshold) {
  MomentCheck check;
  check.name = std::move(name);
  check.kind = CheckKind::kMean;
  check.theoretical = target;
  check.estimate = mean_of(xs);
  check.standard_error = std::sqrt(cov_of(xs, xs) / static_cast<double>(xs.size()));
  if (check.standard_error > 0.0) {
    check.z = (check.estimate - target) / check.standard_error;
    check.pass = std::fabs(check.z) <= threshold;
  } else {
    check.z = check.estimate == target ? 0.0 : std::numeric_limits<double>::infinity();
    check.pass = check.estimate == target;
  }
  return check;
}

struct BootstrapTarget {
  std::string name;
  CheckKind kind = CheckKind::kVariance;
  const std::vector<double>* x = nullptr;
  const std::vector<double>* y = nullptr;  // equal to x for variances
  double theoretical = 0.0;
};

}  // namespace

VerificationReport verify_moments(int n, const ModelParams& params,
                                  std::uint64_t replicates, std::uint64_t seed,
                                  const VerifyOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  params.validate();
  if (n < 1) throw std::invalid_argument("verify_moments: need n >= 1");
  if (!(params.rho > 0.0)) {
    throw std::invalid_argument("verify_moments: rho must be > 0");
  }
  if (params.core_size != 0) {
    throw std::invalid_argument(
        "verify_moments: closed forms describe the dispensable genome; core_size must be 0");
  }
  if (replicates < 100) {
    throw std::invalid_argument("verify_moments: need at least 100 replicates");
  }
  if (options.bootstrap_resamples < 1000) {
    throw std::invalid_argument("verify_moments: need at least 1000 bootstrap resamples");
  }

  const std::size_t r_count = replicates;
  const bool track_p = options.with_incongruence && n >= 4;
  ReplicateTable table;
  table.average.resize(r_count);
  table.pangenome.resize(r_count);
  table.size0.resize(r_count);
  table.spectrum.assign(static_cast<std::size_t>(n), std::vector<double>(r_count));
  if (n >= 2) {
    table.pairwise.resize(r_count);
    table.size1.resize(r_count);
    table.x01.resize(r_count);
    table.x10.resize(r_count);
  }
  if (n >= 3) {
    table.x02.resize(r_count);
    table.x20.resize(r_count);
    table.x12.resize(r_count);
    table.x21.resize(r_count);
  }
  if (n >= 4) {
    table.x23.resize(r_count);
    table.quad.resize(r_count);
  }
  if (track_p) table.incongruence.resize(r_count);

  const int jobs = std::clamp(options.jobs, 1, 256);
  const auto worker = [&](std::size_t begin, std::size_t end) {
    PresenceMatrix matrix(n);
    for (std::size_t r = begin; r < end; ++r) {
      Rng rng = Rng::for_replicate(seed, r);
      const Genealogy tree = sample_kingman(n, rng);
      simulate_genes_into(tree, params, rng, matrix);
      const SpectrumCounts spec = gene_frequency_spectrum(matrix);
      for (int k = 0; k < n; ++k) {
        table.spectrum[static_cast<std::size_t>(k)][r] =
            static_cast<double>(spec.counts[static_cast<std::size_t>(k)]);
      }
      table.average[r] = average_gene_number(matrix);
      table.pangenome[r] = static_cast<double>(pangenome_size(matrix));
      table.size0[r] = static_cast<double>(gene_count_of(matrix, 0));
      if (n >= 2) {
        table.pairwise[r] = mean_pairwise_differences(matrix);
        table.size1[r] = static_cast<double>(gene_count_of(matrix, 1));
        table.x01[r] = static_cast<double>(one_sided_difference(matrix, 0, 1));
        table.x10[r] = static_cast<double>(one_sided_difference(matrix, 1, 0));
      }
      if (n >= 3) {
        table.x02[r] = static_cast<double>(one_sided_difference(matrix, 0, 2));
        table.x20[r] = static_cast<double>(one_sided_difference(matrix, 2, 0));
        table.x12[r] = static_cast<double>(one_sided_difference(matrix, 1, 2));
        table.x21[r] = static_cast<double>(one_sided_difference(matrix, 2, 1));
      }
      if (n >= 4) {
        table.x23[r] = static_cast<double>(one_sided_difference(matrix, 2, 3));
        table.quad[r] = static_cast<double>(quadruple_difference(matrix, 0, 1, 2, 3));
      }
      if (track_p) table.incongruence[r] = incongruence_statistic(matrix);
    }
  };

  if (jobs == 1) {
    worker(0, r_count);
  } else {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) {
      const std::size_t begin = r_count * static_cast<std::size_t>(t) /
                                static_cast<std::size_t>(jobs);
      const std::size_t end = r_count * (static_cast<std::size_t>(t) + 1) /
                              static_cast<std::size_t>(jobs);
      threads.emplace_back([&, t, begin, end] {
        try {
          worker(begin, end);
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    }
    for (auto& thread : threads) thread.join();
    for (const auto& error : errors) {
      if (error) std::rethrow_exception(error);
    }
  }

  VerificationReport report;
  report.n = n;
  report.theta = params.theta;
  report.rho = params.rho;
  report.replicates = replicates;
  report.seed = seed;

  const theory::Moments a = theory::moments_A(n, params.theta, params.rho);
  const theory::Moments g = theory::moments_G(n, params.theta, params.rho);
  const theory::MomentSet ms =
      n >= 2 ? theory::covariances(n, params.theta, params.rho) : theory::MomentSet{};

  report.checks.push_back(
      mean_check("E[A]", table.average, a.mean, options.mean_threshold));
  if (n >= 2) {
    const theory::Moments d = theory::moments_D(n, params.theta, params.rho);
    report.checks.push_back(
        mean_check("E[D]", table.pairwise, d.mean, options.mean_threshold));
  }
  report.checks.push_back(
      mean_check("E[G]", table.pangenome, g.mean, options.mean_threshold));
  for (int k = 1; k <= n; ++k) {
    report.checks.push_back(mean_check(
        "E[G_" + std::to_string(k) + "]", table.spectrum[static_cast<std::size_t>(k) - 1],
        theory::spectrum_mean(n, k, params.theta, params.rho), options.mean_threshold));
  }
  if (track_p) {
    report.checks.push_back(mean_check("E[P]", table.incongruence,
                                       theory::mean_P(params.theta, params.rho),
                                       options.mean_threshold));
  }
  if (n >= 2) {
    report.checks.push_back(mean_check("E[|G1\\G2|]", table.x01, ms.one_sided_mean,
                                       options.mean_threshold));
  }
  if (n >= 4) {
    report.checks.push_back(mean_check("E[D_1234]", table.quad, ms.quadruple_mean,
                                       options.mean_threshold));
  }

  std::vector<BootstrapTarget> targets;
  targets.push_back({"V[A]", CheckKind::kVariance, &table.average, &table.average,
                     a.variance});
  if (n >= 2) {
    const theory::Moments d = theory::moments_D(n, params.theta, params.rho);
    targets.push_back({"V[D]", CheckKind::kVariance, &table.pairwise, &table.pairwise,
                       d.variance});
  }
  targets.push_back({"V[G]", CheckKind::kVariance, &table.pangenome, &table.pangenome,
                     g.variance});
  targets.push_back({"V[|G1|]", CheckKind::kVariance, &table.size0, &table.size0,
                     n >= 2 ? ms.gene_count_variance : params.theta / params.rho});
  if (n >= 2) {
    targets.push_back({"COV[|G1|,|G2|]", CheckKind::kCovariance, &table.size0,
                       &table.size1, ms.gene_count_covariance});
    targets.push_back({"V[|G1\\G2|]", CheckKind::kVariance, &table.x01, &table.x01,
                       ms.one_sided_variance});
    targets.push_back({"COV[|G1\\G2|,|G2\\G1|]", CheckKind::kCovariance, &table.x01,
                       &table.x10, ms.cov_exchanged});
  }
  if (n >= 3) {
    targets.push_back({"COV[|G1\\G2|,|G1\\G3|]", CheckKind::kCovariance, &table.x01,
                       &table.x02, ms.cov_same_minuend});
    targets.push_back({"COV[|G1\\G2|,|G3\\G1|]", CheckKind::kCovariance, &table.x01,
                       &table.x20, ms.cov_cyclic});
    targets.push_back({"COV[|G1\\G2|,|G2\\G3|]", CheckKind::kCovariance, &table.x01,
                       &table.x12, ms.cov_chain});
    targets.push_back({"COV[|G1\\G2|,|G3\\G2|]", CheckKind::kCovariance, &table.x01,
                       &table.x21, ms.cov_same_subtrahend});
  }
  if (n >= 4) {
    targets.push_back({"COV[|G1\\G2|,|G3\\G4|]", CheckKind::kCovariance, &table.x01,
                       &table.x23, ms.cov_disjoint});
  }

  // One shared bootstrap: each resample draws indices once and feeds every
  // variance/covariance target, so the whole pass stays O(B * R).
  const auto b_count = static_cast<std::size_t>(options.bootstrap_resamples);
  std::vector<std::vector<double>> resampled(targets.size(),
                                             std::vector<double>(b_count));
  Rng boot_rng = Rng::for_replicate(seed, 0xB005'7A9ull);
  std::vector<double> sx(targets.size()), sy(targets.size()), sxy(targets.size());
  for (std::size_t b = 0; b < b_count; ++b) {
    std::fill(sx.begin(), sx.end(), 0.0);
    std::fill(sy.begin(), sy.end(), 0.0);
    std::fill(sxy.begin(), sxy.end(), 0.0);
    for (std::size_t draw = 0; draw < r_count; ++draw) {
      const std::uint64_t idx = boot_rng.uniform_below(r_count);
      for (std::size_t t = 0; t < targets.size(); ++t) {
        const double xv = (*targets[t].x)[idx];
        const double yv = (*targets[t].y)[idx];
        sx[t] += xv;
        sy[t] += yv;
        sxy[t] += xv * yv;
      }
    }
    const auto r = static_cast<double>(r_count);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      resampled[t][b] = sxy[t] / r - (sx[t] / r) * (sy[t] / r);
    }
  }

  for (std::size_t t = 0; t < targets.size(); ++t) {
    MomentCheck check;
    check.name = targets[t].name;
    check.kind = targets[t].kind;
    check.theoretical = targets[t].theoretical;
    check.estimate = cov_of(*targets[t].x, *targets[t].y);
    check.standard_error = std::sqrt(cov_of(resampled[t], resampled[t]));
    if (check.standard_error > 0.0) {
      check.z = (check.estimate - check.theoretical) / check.standard_error;
      check.pass = std::fabs(check.z) <= options.variance_threshold;
    } else {
      check.z = check.estimate == check.theoretical
                    ? 0.0
                    : std::numeric_limits<double>::infinity();
      check.pass = check.estimate == check.theoretical;
    }
    report.checks.push_back(std::move(check));
  }

  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

namespace {

const char* kind_name(CheckKind kind) {
  switch (kind) {
    case CheckKind::kMean: return "mean";
    case CheckKind::kVariance: return "variance";
    case CheckKind::kCovariance: return "covariance";
  }
  return "?";
}

}  // namespace

std::string report_tsv(const VerificationReport& report) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "# n=" << report.n << " theta=" << report.theta << " rho=" << report.rho
     << " replicates=" << report.replicates << " seed=" << report.seed << '\n';
  os << "statistic\tkind\ttheory\testimate\tse\tz\tpass\n";
  for (const auto& c : report.checks) {
    os << c.name << '\t' << kind_name(c.kind) << '\t' << c.theoretical << '\t'
       << c.estimate << '\t' << c.standard_error << '\t' << c.z << '\t'
       << (c.pass ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string report_text(const VerificationReport& report) {
  std::ostringstream os;
  os << "verify: n=" << report.n << " theta=" << report.theta << " rho=" << report.rho
     << " replicates=" << report.replicates << " seed=" << report.seed << " ("
     << std::fixed << std::setprecision(1) << report.seconds << "s)\n";
  os.unsetf(std::ios::fixed);
  os << std::setprecision(6);
  for (const auto& c : report.checks) {
    os << (c.pass ? "  ok   " : "  FAIL ") << std::left << std::setw(26) << c.name
       << std::right << " theory=" << std::setw(12) << c.theoretical
       << " estimate=" << std::setw(12) << c.estimate << " z=" << std::setw(8)
       << std::setprecision(2) << std::fixed << c.z << '\n';
    os.unsetf(std::ios::fixed);
    os << std::setprecision(6);
  }
  os << (report.all_pass() ? "all checks passed" : "SOME CHECKS FAILED") << '\n';
  return os.str();
}

}  // namespace coalgene
