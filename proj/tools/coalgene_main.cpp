// coalgene: simulate gene gain/loss along coalescent genealogies, compute
// pangenome statistics, evaluate the matching closed-form moments, verify
// them by Monte Carlo, and fit model parameters to gene frequency spectra.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or input errors.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "coalgene/gene_process.hpp"
#include "coalgene/infer.hpp"
#include "coalgene/io.hpp"
#include "coalgene/montecarlo.hpp"
#include "coalgene/stats.hpp"
#include "coalgene/theory.hpp"

namespace {

using namespace coalgene;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

std::string format_double(double value) {
  std::ostringstream os;
  os << std::setprecision(17) << value;
  return os.str();
}

// "matrix.csv" -> "matrix.rep3.csv" for multi-replicate runs.
std::filesystem::path replicate_path(const std::filesystem::path& base,
                                     std::uint64_t replicate, std::uint64_t total) {
  if (total <= 1) return base;
  std::filesystem::path out = base;
  const std::string ext = out.extension().string();
  out.replace_extension();
  out += ".rep" + std::to_string(replicate) + ext;
  return out;
}

struct SimulateArgs {
  int n = 0;
  double theta = 0.0;
  double rho = 0.0;
  std::uint64_t gc = 0;
  std::uint64_t seed = 0;
  std::uint64_t replicates = 1;
  int jobs = 1;
  std::string out;
  std::string spectrum_out;
  std::string newick_out;
  bool segregating_only = false;
};

int run_simulate(const SimulateArgs& args) {
  const ModelParams params{.theta = args.theta, .rho = args.rho, .core_size = args.gc};
  const auto one_replicate = [&](std::uint64_t r) {
    Rng rng = Rng::for_replicate(args.seed, r);
    const Genealogy tree = sample_kingman(args.n, rng);
    const PresenceMatrix matrix =
        simulate_genes(tree, params, rng, args.segregating_only);
    if (!args.newick_out.empty()) {
      write_text_file(replicate_path(args.newick_out, r, args.replicates),
                      tree.to_newick() + "\n");
    }
    if (!args.out.empty()) {
      std::vector<std::string> comments = {
          "coalgene simulate: n=" + std::to_string(args.n) +
          " theta=" + format_double(args.theta) + " rho=" + format_double(args.rho) +
          " gc=" + std::to_string(args.gc) + " seed=" + std::to_string(args.seed) +
          " replicate=" + std::to_string(r)};
      if (matrix.segregating_only()) {
        comments.push_back(
            "segregating-only: rho=0 run; the infinite pool of genes shared by "
            "everyone is omitted");
      }
      write_matrix_csv(replicate_path(args.out, r, args.replicates), matrix, comments);
    }
    if (!args.spectrum_out.empty()) {
      write_spectrum_tsv(replicate_path(args.spectrum_out, r, args.replicates),
                         gene_frequency_spectrum(matrix));
    }
  };

  // Replicates are independent (one rng stream each) and write distinct
  // files, so outputs do not depend on the worker count.
  const int jobs = std::clamp<int>(args.jobs, 1,
                                   static_cast<int>(std::min<std::uint64_t>(
                                       args.replicates, 256)));
  if (jobs <= 1) {
    for (std::uint64_t r = 0; r < args.replicates; ++r) one_replicate(r);
    return kExitOk;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
  for (int t = 0; t < jobs; ++t) {
    const std::uint64_t begin = args.replicates * static_cast<std::uint64_t>(t) / jobs;
    const std::uint64_t end =
        args.replicates * (static_cast<std::uint64_t>(t) + 1) / jobs;
    workers.emplace_back([&, t, begin, end] {
      try {
        for (std::uint64_t r = begin; r < end; ++r) one_replicate(r);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& worker : workers) worker.join();
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  return kExitOk;
}

void print_stat_rows(std::ostream& os, const StatReport& report,
                     const std::optional<StatReport>& tilde) {
  os << "statistic\tvalue\n";
  os << "n\t" << report.sample_size << '\n';
  os << "A\t" << format_double(report.average_genes) << '\n';
  if (report.pairwise_differences) {
    os << "D\t" << format_double(*report.pairwise_differences) << '\n';
  }
  if (report.incongruence) {
    os << "P\t" << format_double(*report.incongruence) << '\n';
  }
  os << "G\t" << report.pangenome << '\n';
  if (tilde) {
    os << "A_tilde\t" << format_double(tilde->average_genes) << '\n';
    os << "G_tilde\t" << tilde->pangenome << '\n';
  }
  os << '\n';
  os << (tilde ? "k\tcount\tcount_tilde\n" : "k\tcount\n");
  for (int k = 1; k <= report.sample_size; ++k) {
    os << k << '\t' << report.spectrum.at(k);
    if (tilde) os << '\t' << tilde->spectrum.at(k);
    os << '\n';
  }
}

int run_stats(const std::string& in, std::optional<std::uint64_t> gc) {
  const PresenceMatrix matrix = read_matrix_csv(std::filesystem::path(in));
  const StatReport report = compute_stats(matrix);
  std::optional<StatReport> tilde;
  if (gc) tilde = with_core(report, *gc);
  print_stat_rows(std::cout, report, tilde);
  return kExitOk;
}

int run_spectrum(const std::string& in, const std::string& out) {
  const PresenceMatrix matrix = read_matrix_csv(std::filesystem::path(in));
  write_spectrum_tsv(std::filesystem::path(out), gene_frequency_spectrum(matrix));
  return kExitOk;
}

int run_theory(int n, double theta, double rho, std::optional<std::uint64_t> gc) {
  std::ostream& os = std::cout;
  os << "statistic\tn\ttheta\trho\tmean\tvariance\n";
  const auto row = [&](const std::string& name, double mean,
                       std::optional<double> variance) {
    os << name << '\t' << n << '\t' << format_double(theta) << '\t'
       << format_double(rho) << '\t' << format_double(mean) << '\t'
       << (variance ? format_double(*variance) : "na") << '\n';
  };
  const auto a = theory::moments_A(n, theta, rho);
  row("A", a.mean, a.variance);
  if (n >= 2) {
    const auto d = theory::moments_D(n, theta, rho);
    row("D", d.mean, d.variance);
  }
  row("P", theory::mean_P(theta, rho), std::nullopt);
  const auto g = theory::moments_G(n, theta, rho);
  row("G", g.mean, g.variance);
  for (int k = 1; k <= n; ++k) {
    row("G_" + std::to_string(k), theory::spectrum_mean(n, k, theta, rho), std::nullopt);
  }
  if (n >= 2) {
    const auto ms = theory::covariances(n, theta, rho);
    row("COV[|G1|,|G2|]", ms.gene_count_covariance, std::nullopt);
    row("E[|G1\\G2|]", ms.one_sided_mean, ms.one_sided_variance);
    row("COV[|G1\\G2|,|G2\\G1|]", ms.cov_exchanged, std::nullopt);
    if (n >= 3) {
      row("COV[|G1\\G2|,|G1\\G3|]", ms.cov_same_minuend, std::nullopt);
      row("COV[|G1\\G2|,|G3\\G1|]", ms.cov_cyclic, std::nullopt);
      row("COV[|G1\\G2|,|G2\\G3|]", ms.cov_chain, std::nullopt);
      row("COV[|G1\\G2|,|G3\\G2|]", ms.cov_same_subtrahend, std::nullopt);
    }
    if (n >= 4) {
      row("E[D_1234]", ms.quadruple_mean, std::nullopt);
      row("COV[|G1\\G2|,|G3\\G4|]", ms.cov_disjoint, std::nullopt);
    }
  }
  if (gc) {
    row("A_tilde", a.mean + static_cast<double>(*gc), a.variance);
    row("G_tilde", g.mean + static_cast<double>(*gc), g.variance);
    row("G_tilde_" + std::to_string(n),
        theory::spectrum_mean(n, n, theta, rho) + static_cast<double>(*gc),
        std::nullopt);
  }
  return kExitOk;
}

int run_fit(const std::string& in, const FitOptions& options) {
  const SpectrumCounts observed = read_spectrum_tsv(std::filesystem::path(in));
  const FitResult fit = fit_params(observed, options);
  std::cout << "parameter\testimate\n";
  std::cout << "theta\t" << format_double(fit.theta_hat) << '\n';
  std::cout << "rho\t" << format_double(fit.rho_hat) << '\n';
  std::cout << "gc\t" << format_double(fit.gc_hat) << '\n';
  std::cout << "gc_rounded\t" << fit.gc_rounded << '\n';
  std::cout << "sse\t" << format_double(fit.sse) << '\n';
  std::cout << "gc_clamped\t" << (fit.gc_clamped ? 1 : 0) << '\n';
  std::cout << '\n';
  std::cout << "k\tobserved\tpredicted\tresidual\n";
  for (int k = 1; k <= observed.sample_size; ++k) {
    const auto i = static_cast<std::size_t>(k) - 1;
    std::cout << k << '\t' << observed.counts[i] << '\t'
              << format_double(fit.predicted[i]) << '\t'
              << format_double(fit.residuals[i]) << '\n';
  }
  return kExitOk;
}

struct VerifyArgs {
  int n = 0;
  double theta = 0.0;
  double rho = 0.0;
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  VerifyOptions options;
  std::string tsv_out;
  bool skip_incongruence = false;
};

int run_verify(VerifyArgs args) {
  args.options.with_incongruence = !args.skip_incongruence;
  const ModelParams params{.theta = args.theta, .rho = args.rho, .core_size = 0};
  const VerificationReport report =
      verify_moments(args.n, params, args.replicates, args.seed, args.options);
  std::cout << report_text(report);
  if (!args.tsv_out.empty()) {
    write_text_file(std::filesystem::path(args.tsv_out), report_tsv(report));
  }
  return report.all_pass() ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "gene gain/loss on coalescent genealogies: simulation, pangenome "
      "statistics, closed-form moments, Monte Carlo verification, spectrum fits"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "simulate presence/absence matrices");
  simulate->add_option("--n", sim.n, "sample size")->required();
  simulate->add_option("--theta", sim.theta, "gene gain rate")->required();
  simulate->add_option("--rho", sim.rho, "gene loss rate")->required();
  simulate->add_option("--gc", sim.gc, "core genome size")->default_val(0);
  simulate->add_option("--seed", sim.seed, "random seed (required: runs are reproducible)")
      ->required();
  simulate->add_option("--replicates", sim.replicates, "independent replicates")
      ->default_val(1);
  simulate->add_option("--jobs", sim.jobs, "worker threads over replicates")
      ->default_val(1);
  simulate->add_option("--out", sim.out, "matrix CSV path (.repN inserted when replicates > 1)");
  simulate->add_option("--spectrum-out", sim.spectrum_out, "spectrum TSV path");
  simulate->add_option("--newick-out", sim.newick_out, "genealogy Newick path");
  simulate->add_flag("--segregating-only", sim.segregating_only,
                     "rho=0 mode: simulate tree-gained genes only");

  std::string stats_in;
  std::optional<std::uint64_t> stats_gc;
  auto* stats = app.add_subcommand("stats", "statistics of a matrix CSV");
  stats->add_option("--in", stats_in, "matrix CSV")->required();
  stats->add_option("--gc", stats_gc, "report core-inclusive variants for this core size");

  std::string spec_in, spec_out;
  auto* spectrum = app.add_subcommand("spectrum", "extract the gene frequency spectrum");
  spectrum->add_option("--in", spec_in, "matrix CSV")->required();
  spectrum->add_option("--out", spec_out, "spectrum TSV")->required();

  int theory_n = 0;
  double theory_theta = 0.0, theory_rho = 0.0;
  std::optional<std::uint64_t> theory_gc;
  auto* theory_cmd = app.add_subcommand("theory", "closed-form moments as TSV");
  theory_cmd->add_option("--n", theory_n, "sample size")->required();
  theory_cmd->add_option("--theta", theory_theta, "gene gain rate")->required();
  theory_cmd->add_option("--rho", theory_rho, "gene loss rate")->required();
  theory_cmd->add_option("--gc", theory_gc, "core genome size for tilde rows");

  std::string fit_in;
  FitOptions fit_options;
  auto* fit = app.add_subcommand("fit", "least-squares fit to a spectrum TSV");
  fit->add_option("--in", fit_in, "spectrum TSV")->required();
  fit->add_option("--rho-min", fit_options.rho_min, "search interval lower end")
      ->default_val(0.01);
  fit->add_option("--rho-max", fit_options.rho_max, "search interval upper end")
      ->default_val(100.0);
  fit->add_option("--grid", fit_options.grid_points, "coarse grid points")
      ->default_val(64);
  fit->add_option("--refine-tol", fit_options.refine_tol, "rho refinement tolerance")
      ->default_val(1e-6);
  fit->add_flag("--weighted", fit_options.weighted,
                "weight classes by 1/max(observed count, 1)");

  VerifyArgs verify;
  auto* verify_cmd =
      app.add_subcommand("verify", "Monte Carlo check of every closed form");
  verify_cmd->add_option("--n", verify.n, "sample size")->required();
  verify_cmd->add_option("--theta", verify.theta, "gene gain rate")->required();
  verify_cmd->add_option("--rho", verify.rho, "gene loss rate")->required();
  verify_cmd->add_option("--replicates", verify.replicates, "replicates")->required();
  verify_cmd->add_option("--seed", verify.seed, "random seed")->required();
  verify_cmd->add_option("--threshold", verify.options.mean_threshold,
                         "|z| bound for mean checks")
      ->default_val(4.0);
  verify_cmd->add_option("--variance-threshold", verify.options.variance_threshold,
                         "|z| bound for variance/covariance checks")
      ->default_val(6.0);
  verify_cmd->add_option("--bootstrap", verify.options.bootstrap_resamples,
                         "bootstrap resamples behind variance SEs")
      ->default_val(1000);
  verify_cmd->add_option("--jobs", verify.options.jobs, "worker threads")->default_val(1);
  verify_cmd->add_option("--tsv-out", verify.tsv_out, "also write the report as TSV");
  verify_cmd->add_flag("--skip-incongruence", verify.skip_incongruence,
                       "skip the O(genes^2) incongruence check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (stats->parsed()) return run_stats(stats_in, stats_gc);
    if (spectrum->parsed()) return run_spectrum(spec_in, spec_out);
    if (theory_cmd->parsed()) return run_theory(theory_n, theory_theta, theory_rho, theory_gc);
    if (fit->parsed()) return run_fit(fit_in, fit_options);
    if (verify_cmd->parsed()) return run_verify(verify);
  } catch (const ParseError& e) {
    std::cerr << "coalgene: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "coalgene: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
