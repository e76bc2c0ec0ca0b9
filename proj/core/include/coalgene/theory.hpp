#pragma once

#include <cstdint>
#include <vector>

namespace coalgene {
namespace theory {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of A, the per-individual average gene count:
/// E = theta/rho, V = theta/(n(1+rho)) + theta/(rho(1+rho)).
/// Requires n >= 1, theta >= 0, rho > 0.
Moments moments_A(int n, double theta, double rho);

/// Mean and variance of D, the average one-sided gene difference over
/// ordered pairs: E = theta/(1+rho); the variance is a rational function
/// with terms in 1, 1/n and 2/(n(n-1)). Requires n >= 2 and rho >= 0
/// (rho = 0 evaluates the same expressions; simulation at rho = 0 covers
/// segregating genes only and does not follow this value).
Moments moments_D(int n, double theta, double rho);

/// Expected incongruence statistic P. Zero at rho = 0 (incongruent pairs
/// need gene loss), of order theta^2 rho / 72 for small rho, and decaying
/// like 1/rho^3 for large rho.
double mean_P(double theta, double rho);

/// h_k = 2 * sum_{i=0}^{k-1} 1/(rho+i): expected total length of the
/// not-yet-lost lines of the killed coalescent started from k lines.
/// h_0 = 0. Requires rho > 0.
double h_function(int k, double rho);

/// Expected product of the total lengths carried by two independent loss
/// processes on a shared genealogy, as a function of the joint line counts
/// (k1: unlost in both, k2: unlost in the first only, k3: unlost in the
/// second only). Evaluated by first-step decomposition of the joint jump
/// chain; values are memoized for a fixed rho.
///
/// k1+k2+k3 never grows along a transition, so all states reachable from a
/// query fit in the simplex {sum <= S}; the memo is a flat table over that
/// simplex, sized on first use.
class UnlostLengthProduct {
 public:
  explicit UnlostLengthProduct(double rho);
  double operator()(int k1, int k2, int k3);

 private:
  double& slot(int k1, int k2, int k3);
  void grow(int total);
  double h(int k);  // h_function with a lazily extended prefix cache

  double rho_;
  int capacity_ = -1;              // largest k1+k2+k3 the table covers
  std::vector<std::size_t> base_;  // per-k1 block offsets
  std::vector<double> table_;      // NaN marks unevaluated states
  std::vector<double> h_cache_{0.0};
};

/// One-shot convenience wrapper around UnlostLengthProduct.
double g_recursion(int k1, int k2, int k3, double rho);

/// Mean and variance of G, the number of distinct genes in the sample:
/// E = theta * sum_{i=0}^{n-1} 1/(rho+i),
/// V = E - E^2 + (theta^2/4) * g(n,0,0). Requires rho > 0.
Moments moments_G(int n, double theta, double rho);

/// Expected number of genes carried by exactly k of n individuals:
/// (theta/k) * n...(n-k+1) / ((n-1+rho)...(n-k+rho)), evaluated in log
/// space. Requires 1 <= k <= n and rho > 0; rho = 0 is accepted for k < n
/// and returns theta/k, the segregating-genes convention matching the
/// rho = 0 simulation mode (the rho -> 0 limit of the expression itself is
/// theta*n/(k(n-k)) instead).
double spectrum_mean(int n, int k, double theta, double rho);

/// The same expectation through the stationary frequency-density route:
/// binom(n,k) * theta * B(k, n-k+rho) with B the Beta function, evaluated
/// via log-Gamma. Shares no code path with spectrum_mean, which is what
/// makes the pair an internal consistency check. Requires rho > 0.
double spectrum_mean_beta(int n, int k, double theta, double rho);

/// Closed-form first and second moments for small tuples of individuals,
/// used by the Monte Carlo verification harness. Written for sample size
/// n >= 2; entries involving three (four) individuals are meaningful when
/// n >= 3 (4). All formulas are n-free.
struct MomentSet {
  int n = 0;
  double theta = 0.0;
  double rho = 0.0;

  double gene_count_mean = 0.0;       // E|G_i|, Poisson mean theta/rho
  double gene_count_variance = 0.0;   // = the mean (Poisson)
  double gene_count_covariance = 0.0; // Cov(|G_i|, |G_j|), i != j

  double one_sided_mean = 0.0;      // E|G_i \ G_j|
  double one_sided_variance = 0.0;  // V|G_i \ G_j|

  // Covariances of one-sided differences over tuples of distinct
  // individuals, keyed by how the pairs overlap.
  double cov_exchanged = 0.0;        // (i\j, j\i)
  double cov_same_minuend = 0.0;     // (i\j, i\k)
  double cov_cyclic = 0.0;           // (i\j, k\i)
  double cov_chain = 0.0;            // (i\j, j\k)
  double cov_same_subtrahend = 0.0;  // (i\j, k\j)
  double cov_disjoint = 0.0;         // (i\j, k\l)

  double quadruple_mean = 0.0;  // E of quadruple_difference(i,j,k,l)
};

MomentSet covariances(int n, double theta, double rho);

}  // namespace theory
}  // namespace coalgene
