#include "coalgene/theory.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace coalgene {
namespace theory {

namespace {

void require_positive_rho(double rho, const char* where) {
  if (!(rho > 0.0)) {
    throw std::invalid_argument(std::string(where) + ": rho must be > 0");
  }
}

void require_nonneg_theta(double theta, const char* where) {
  if (!(theta >= 0.0)) {
    throw std::invalid_argument(std::string(where) + ": theta must be >= 0");
  }
}

}  // namespace

Moments moments_A(int n, double theta, double rho) {
  if (n < 1) throw std::invalid_argument("moments_A: need n >= 1");
  require_nonneg_theta(theta, "moments_A");
  require_positive_rho(rho, "moments_A");
  Moments m;
  m.mean = theta / rho;
  m.variance = theta / (n * (1.0 + rho)) + theta / (rho * (1.0 + rho));
  return m;
}

Moments moments_D(int n, double theta, double rho) {
  if (n < 2) throw std::invalid_argument("moments_D: need n >= 2");
  require_nonneg_theta(theta, "moments_D");
  if (!(rho >= 0.0)) throw std::invalid_argument("moments_D: rho must be >= 0");
  const double r = rho, t = theta;
  const double c_const =
      3 + 14 * r + 23 * r * r + 16 * r * r * r + 4 * r * r * r * r + 4 * t + 2 * r * t;
  const double c_inv_n =
      6 + 19 * r + 19 * r * r + 12 * r * r * r + 4 * r * r * r * r + 8 * t + 4 * r * t;
  const double c_inv_pairs =
      3 + 11 * r + 12 * r * r + 4 * r * r * r + 10 * t + 9 * r * t + 2 * r * r * t;
  const double shared = (1 + r) * (2 + r) * (3 + r) * (1 + 2 * r) * (3 + 2 * r);
  Moments m;
  m.mean = theta / (1.0 + rho);
  m.variance = theta * (c_const / ((1 + r) * shared) + c_inv_n / shared / n +
                        c_inv_pairs / shared * 2.0 / (static_cast<double>(n) * (n - 1)));
  return m;
}

double mean_P(double theta, double rho) {
  require_nonneg_theta(theta, "mean_P");
  if (!(rho >= 0.0)) throw std::invalid_argument("mean_P: rho must be >= 0");
  const double x = rho / 2.0;
  const double numerator = 18 + 117 * x + 203 * x * x + 105 * x * x * x;
  const double denominator = (1 + x) * (1 + x) * (1 + 2 * x) * (1 + 4 * x) *
                             (3 + 4 * x) * (3 + 5 * x) * (6 + 5 * x) * (6 + 7 * x);
  return theta * theta * rho / 4.0 * numerator / denominator;
}

double h_function(int k, double rho) {
  if (k < 0) throw std::invalid_argument("h_function: need k >= 0");
  require_positive_rho(rho, "h_function");
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += 1.0 / (rho + i);
  return 2.0 * sum;
}

UnlostLengthProduct::UnlostLengthProduct(double rho) : rho_(rho) {
  require_positive_rho(rho, "UnlostLengthProduct");
}

void UnlostLengthProduct::grow(int total) {
  capacity_ = total;
  base_.assign(static_cast<std::size_t>(total) + 2, 0);
  std::size_t offset = 0;
  for (int k1 = 0; k1 <= total; ++k1) {
    base_[static_cast<std::size_t>(k1)] = offset;
    const std::size_t m = static_cast<std::size_t>(total - k1);
    offset += (m + 1) * (m + 2) / 2;
  }
  base_[static_cast<std::size_t>(total) + 1] = offset;
  table_.assign(offset, std::numeric_limits<double>::quiet_NaN());
}

double UnlostLengthProduct::h(int k) {
  while (static_cast<int>(h_cache_.size()) <= k) {
    h_cache_.push_back(h_cache_.back() +
                       2.0 / (rho_ + static_cast<double>(h_cache_.size()) - 1.0));
  }
  return h_cache_[static_cast<std::size_t>(k)];
}

double& UnlostLengthProduct::slot(int k1, int k2, int k3) {
  // Row-major triangle over (k2, k3) with k2 + k3 <= capacity_ - k1.
  const std::size_t m = static_cast<std::size_t>(capacity_ - k1);
  const auto a = static_cast<std::size_t>(k2);
  const std::size_t row_start = a * (m + 1) - a * (a - 1) / 2;
  return table_[base_[static_cast<std::size_t>(k1)] + row_start +
                static_cast<std::size_t>(k3)];
}

double UnlostLengthProduct::operator()(int k1, int k2, int k3) {
  if (k1 < 0 || k2 < 0 || k3 < 0) {
    throw std::invalid_argument("UnlostLengthProduct: counts must be >= 0");
  }
  if (k1 + k2 + k3 > capacity_) {
    // Resizing reindexes the table, so previously computed values are
    // recomputed on demand; queries normally grow once and stay put.
    grow(k1 + k2 + k3);
  }
  double& memo = slot(k1, k2, k3);
  if (!std::isnan(memo)) return memo;

  double value = 0.0;
  if (k1 + k3 == 1) {
    // A single line carries the second process; its killing time is
    // independent of everything else, so the product factorizes.
    value = (2.0 / rho_) * h(k1 + k2);
  } else if (k1 + k2 == 1) {
    value = (2.0 / rho_) * h(k1 + k3);
  } else if (k1 + k2 == 0 || k1 + k3 == 0) {
    // One process has no unlost lines left; its length integrand is zero
    // from here on.
    value = 0.0;
  } else {
    const int primed[6][3] = {{k1 - 1, k2, k3},     {k1, k2 - 1, k3},
                              {k1, k2, k3 - 1},     {k1 + 1, k2 - 1, k3 - 1},
                              {k1 - 1, k2 + 1, k3}, {k1 - 1, k2, k3 + 1}};
    const double rates[6] = {
        0.5 * k1 * (k1 - 1),
        0.5 * k2 * (k2 - 1) + static_cast<double>(k1) * k2 + 0.5 * rho_ * k2,
        0.5 * k3 * (k3 - 1) + static_cast<double>(k1) * k3 + 0.5 * rho_ * k3,
        static_cast<double>(k2) * k3,
        0.5 * rho_ * k1,
        0.5 * rho_ * k1};
    double total_rate = 0.0;
    for (double r : rates) total_rate += r;
    const double a = k1 + k2;  // lines counted by the first length
    const double b = k1 + k3;  // lines counted by the second
    value = a * b * 2.0 / (total_rate * total_rate);
    for (int i = 0; i < 6; ++i) {
      if (rates[i] == 0.0) continue;
      const int p1 = primed[i][0], p2 = primed[i][1], p3 = primed[i][2];
      const double cross =
          (a * h(p1 + p3) + b * h(p1 + p2)) / total_rate;
      value += rates[i] / total_rate * (cross + (*this)(p1, p2, p3));
    }
  }
  // Transitions never increase k1+k2+k3, so the recursion cannot regrow the
  // table; the refetch just keeps this independent of reference lifetime.
  slot(k1, k2, k3) = value;
  return value;
}

double g_recursion(int k1, int k2, int k3, double rho) {
  UnlostLengthProduct g(rho);
  return g(k1, k2, k3);
}

Moments moments_G(int n, double theta, double rho) {
  if (n < 1) throw std::invalid_argument("moments_G: need n >= 1");
  require_nonneg_theta(theta, "moments_G");
  require_positive_rho(rho, "moments_G");
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += 1.0 / (rho + i);
  Moments m;
  m.mean = theta * sum;
  m.variance =
      m.mean - theta * theta * sum * sum + theta * theta / 4.0 * g_recursion(n, 0, 0, rho);
  return m;
}

double spectrum_mean(int n, int k, double theta, double rho) {
  if (n < 1 || k < 1 || k > n) {
    throw std::invalid_argument("spectrum_mean: need 1 <= k <= n");
  }
  require_nonneg_theta(theta, "spectrum_mean");
  if (rho == 0.0) {
    if (k == n) {
      throw std::invalid_argument(
          "spectrum_mean: the full-sample class diverges at rho = 0");
    }
    return theta / k;  // segregating-genes convention
  }
  require_positive_rho(rho, "spectrum_mean");
  if (theta == 0.0) return 0.0;
  double log_value = std::log(theta) - std::log(static_cast<double>(k));
  for (int i = 0; i < k; ++i) {
    log_value += std::log(static_cast<double>(n - i)) - std::log(n - 1.0 - i + rho);
  }
  return std::exp(log_value);
}

double spectrum_mean_beta(int n, int k, double theta, double rho) {
  if (n < 1 || k < 1 || k > n) {
    throw std::invalid_argument("spectrum_mean_beta: need 1 <= k <= n");
  }
  require_nonneg_theta(theta, "spectrum_mean_beta");
  require_positive_rho(rho, "spectrum_mean_beta");
  if (theta == 0.0) return 0.0;
  const double log_choose =
      std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  const double log_beta =
      std::lgamma(static_cast<double>(k)) + std::lgamma(n - k + rho) - std::lgamma(n + rho);
  return theta * std::exp(log_choose + log_beta);
}

MomentSet covariances(int n, double theta, double rho) {
  if (n < 2) throw std::invalid_argument("covariances: need n >= 2");
  require_nonneg_theta(theta, "covariances");
  require_positive_rho(rho, "covariances");
  const double t = theta, r = rho;
  MomentSet s;
  s.n = n;
  s.theta = theta;
  s.rho = rho;
  s.gene_count_mean = t / r;
  s.gene_count_variance = t / r;
  s.gene_count_covariance = t / (r * (1 + r));

  const double pair_sq = t * t / ((1 + r) * (1 + r) * (1 + 2 * r));
  s.one_sided_mean = t / (1 + r);
  s.one_sided_variance = pair_sq + t / (1 + r);
  s.cov_exchanged = pair_sq;

  const double triple_sq = pair_sq / (3 + 2 * r);
  s.cov_same_minuend = triple_sq + t / (2 + r);
  s.cov_cyclic = triple_sq;
  s.cov_chain = triple_sq;
  s.cov_same_subtrahend = triple_sq + t / ((1 + r) * (2 + r));

  s.quadruple_mean = t / ((3 + r) * (2 + r));
  s.cov_disjoint = s.quadruple_mean +
                   2 * t * t / ((1 + r) * (1 + r) * (3 + r) * (1 + 2 * r) * (3 + 2 * r));
  return s;
}

}  // namespace theory
}  // namespace coalgene
