#include <doctest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>

#include "coalgene/theory.hpp"

using namespace coalgene;
namespace th = coalgene::theory;
using Rational = boost::multiprecision::cpp_rational;

namespace {

// Variance of D assembled from the pair/triple/quadruple covariances; an
// independent route that must coincide with the transcribed closed form.
double variance_D_assembled(int n, double theta, double rho) {
  const th::MomentSet s = th::covariances(std::max(n, 4), theta, rho);
  const double nn = n;
  double total = nn * (nn - 1) * (s.one_sided_variance + s.cov_exchanged);
  if (n >= 3) {
    total += nn * (nn - 1) * (nn - 2) *
             (s.cov_same_minuend + s.cov_cyclic + s.cov_chain + s.cov_same_subtrahend);
  }
  if (n >= 4) {
    total += nn * (nn - 1) * (nn - 2) * (nn - 3) * s.cov_disjoint;
  }
  return total / (nn * nn * (nn - 1) * (nn - 1));
}

// Exact-rational transcription of the D variance, written term by term.
Rational variance_D_rational(int n, const Rational& t, const Rational& r) {
  const Rational c1 = 3 + 14 * r + 23 * r * r + 16 * r * r * r + 4 * r * r * r * r +
                      4 * t + 2 * r * t;
  const Rational c2 = 6 + 19 * r + 19 * r * r + 12 * r * r * r + 4 * r * r * r * r +
                      8 * t + 4 * r * t;
  const Rational c3 =
      3 + 11 * r + 12 * r * r + 4 * r * r * r + 10 * t + 9 * r * t + 2 * r * r * t;
  const Rational base = (1 + r) * (2 + r) * (3 + r) * (1 + 2 * r) * (3 + 2 * r);
  return t * (c1 / ((1 + r) * base) + c2 / base / n +
              c3 / base * Rational(2) / (Rational(n) * (n - 1)));
}

Rational mean_P_rational(const Rational& t, const Rational& r) {
  const Rational x = r / 2;
  const Rational num = 18 + 117 * x + 203 * x * x + 105 * x * x * x;
  const Rational den = (1 + x) * (1 + x) * (1 + 2 * x) * (1 + 4 * x) * (3 + 4 * x) *
                       (3 + 5 * x) * (6 + 5 * x) * (6 + 7 * x);
  return t * t * r / 4 * num / den;
}

}  // namespace

TEST_CASE("per-individual average: closed form and edge behavior") {
  const th::Moments m = th::moments_A(5, 2.0, 1.0);
  CHECK(m.mean == doctest::Approx(2.0));
  // One individual: the count is Poisson, so the variance equals the mean.
  CHECK(th::moments_A(1, 1.0, 1.0).variance == doctest::Approx(1.0).epsilon(1e-15));
  // The variance floor persists for huge samples (shared ancestry).
  CHECK(th::moments_A(100000000, 1.0, 1.0).variance ==
        doctest::Approx(1.0 / (1.0 * 2.0)).epsilon(1e-6));
  CHECK_THROWS_AS(th::moments_A(0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(th::moments_A(2, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("pairwise difference moments: mean, frozen value, assembled identity") {
  CHECK(th::moments_D(4, 3.0, 2.0).mean == doctest::Approx(1.0));
  // n=2, theta=rho=1: assembling the two-individual moments gives exactly 1/3.
  CHECK(th::moments_D(2, 1.0, 1.0).variance == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  for (const int n : {2, 3, 5, 9, 20}) {
    for (const double theta : {0.5, 1.0, 1142.17}) {
      for (const double rho : {0.1, 1.0, 2.03, 10.0}) {
        CHECK(th::moments_D(n, theta, rho).variance ==
              doctest::Approx(variance_D_assembled(n, theta, rho)).epsilon(1e-11));
      }
    }
  }
  CHECK_THROWS_AS(th::moments_D(1, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("pairwise difference variance agrees with the exact-rational transcription") {
  for (const int n : {2, 5, 9}) {
    for (const auto& [tn, td] : {std::pair{1, 2}, std::pair{1, 1}, std::pair{5, 1}}) {
      for (const auto& [rn, rd] :
           {std::pair{1, 10}, std::pair{1, 2}, std::pair{1, 1}, std::pair{5, 1}}) {
        const Rational exact =
            variance_D_rational(n, Rational(tn, td), Rational(rn, rd));
        const double expected = static_cast<double>(exact);
        const double actual = th::moments_D(n, static_cast<double>(tn) / td,
                                            static_cast<double>(rn) / rd)
                                  .variance;
        CHECK(actual == doctest::Approx(expected).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("incongruence mean is nonnegative over the loss-rate range") {
  for (double rho = 0.0; rho < 50.0; rho += 0.37) {
    CHECK(th::mean_P(2.0, rho) >= 0.0);
  }
}

TEST_CASE("incongruence mean: boundary behavior and rational transcription") {
  CHECK(th::mean_P(5.0, 0.0) == 0.0);
  // Leading order theta^2 * rho / 72 for small rho.
  const double tiny = 1e-9;
  CHECK(th::mean_P(1.0, tiny) / (tiny / 72.0) == doctest::Approx(1.0).epsilon(1e-6));
  // Decays for large rho.
  CHECK(th::mean_P(1.0, 1e7) < 1e-12);
  // Frozen value at theta=2, rho=1.
  CHECK(th::mean_P(2.0, 1.0) == doctest::Approx(0.0046825322367118035).epsilon(1e-13));
  for (const auto& [rn, rd] : {std::pair{1, 10}, std::pair{1, 1}, std::pair{7, 2}}) {
    const double expected =
        static_cast<double>(mean_P_rational(Rational(3), Rational(rn, rd)));
    CHECK(th::mean_P(3.0, static_cast<double>(rn) / rd) ==
          doctest::Approx(expected).epsilon(1e-13));
  }
  CHECK(th::mean_P(0.0, 3.0) == 0.0);
  CHECK_THROWS_AS(th::mean_P(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("unlost-line length sums") {
  CHECK(th::h_function(0, 2.0) == 0.0);
  CHECK(th::h_function(1, 2.0) == doctest::Approx(1.0));
  const double rho = 0.7;
  CHECK(th::h_function(2, rho) ==
        doctest::Approx(2.0 * (1.0 + 2.0 * rho) / (rho * (1.0 + rho))).epsilon(1e-14));
  CHECK_THROWS_AS(th::h_function(2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(th::h_function(-1, 1.0), std::invalid_argument);
}

TEST_CASE("length-product recursion: base states and the closed 2-line form") {
  for (const double rho : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    CHECK(th::g_recursion(1, 0, 0, rho) ==
          doctest::Approx(4.0 / (rho * rho)).epsilon(1e-13));
    const double g110 = 4.0 * (1.0 + 2.0 * rho) / (rho * rho * (1.0 + rho));
    CHECK(th::g_recursion(1, 1, 0, rho) == doctest::Approx(g110).epsilon(1e-13));
    CHECK(th::g_recursion(1, 0, 1, rho) == doctest::Approx(g110).epsilon(1e-13));
    const double s = 1.0 / rho + 1.0 / (1.0 + rho);
    const double g200 =
        4.0 * s * s + 4.0 / ((1.0 + rho) * (1.0 + rho) * (1.0 + 2.0 * rho));
    CHECK(th::g_recursion(2, 0, 0, rho) == doctest::Approx(g200).epsilon(1e-13));
  }
  CHECK(th::g_recursion(2, 0, 0, 1.0) == doctest::Approx(28.0 / 3.0).epsilon(1e-13));
  CHECK_THROWS_AS(th::g_recursion(1, 0, 0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(th::g_recursion(-1, 0, 0, 1.0), std::invalid_argument);
}

TEST_CASE("length-product recursion is symmetric in the two loss processes") {
  for (const double rho : {0.3, 1.0, 4.0}) {
    for (int k1 = 0; k1 <= 4; ++k1) {
      for (int k2 = 0; k2 <= 4; ++k2) {
        for (int k3 = 0; k3 <= k2; ++k3) {
          CHECK(th::g_recursion(k1, k2, k3, rho) ==
                doctest::Approx(th::g_recursion(k1, k3, k2, rho)).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("pangenome size moments") {
  const th::Moments m = th::moments_G(2, 1.0, 1.0);
  CHECK(m.mean == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(m.variance == doctest::Approx(19.0 / 12.0).epsilon(1e-13));

  for (const double rho : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    for (const double theta : {1.0, 2.5}) {
      const double v2 = th::moments_G(2, theta, rho).variance;
      const double closed2 =
          theta * (1.0 + 2.0 * rho) / (rho * (1.0 + rho)) +
          theta * theta / ((1.0 + rho) * (1.0 + rho) * (1.0 + 2.0 * rho));
      CHECK(v2 == doctest::Approx(closed2).epsilon(1e-11));

      const double v3 = th::moments_G(3, theta, rho).variance;
      const double poly = 90 + 249 * rho + 275 * rho * rho + 145 * rho * rho * rho +
                          30 * rho * rho * rho * rho;
      const double closed3 =
          theta / rho + theta / (1 + rho) + theta / (2 + rho) +
          theta * theta * poly /
              ((1 + rho) * (1 + rho) * (2 + rho) * (2 + rho) * (1 + 2 * rho) *
               (3 + 2 * rho) * (6 + 5 * rho));
      CHECK(v3 == doctest::Approx(closed3).epsilon(1e-11));
    }
  }
  CHECK_THROWS_AS(th::moments_G(2, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("spectrum means: special values, conventions, limits") {
  CHECK(th::spectrum_mean(1, 1, 4.0, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
  // rho = 0 uses the segregating-genes convention for k < n.
  CHECK(th::spectrum_mean(6, 3, 4.0, 0.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(th::spectrum_mean(6, 6, 4.0, 0.0), std::invalid_argument);
  // The rho -> 0 limit of the expression itself differs from the convention.
  CHECK(th::spectrum_mean(6, 3, 1.0, 1e-10) ==
        doctest::Approx(6.0 / (3.0 * 3.0)).epsilon(1e-8));
  CHECK_THROWS_AS(th::spectrum_mean(5, 0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(th::spectrum_mean(5, 6, 1.0, 1.0), std::invalid_argument);
  CHECK(th::spectrum_mean(7, 3, 0.0, 1.0) == 0.0);
}

TEST_CASE("spectrum means agree with the frequency-density route") {
  CHECK(th::spectrum_mean_beta(2, 2, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  for (const double rho : {0.1, 1.0, 2.03, 10.0}) {
    for (int n = 1; n <= 30; ++n) {
      for (int k = 1; k <= n; ++k) {
        const double a = th::spectrum_mean(n, k, 1.0, rho);
        const double b = th::spectrum_mean_beta(n, k, 1.0, rho);
        CHECK(std::fabs(a - b) <= 1e-10 * std::fabs(a));
      }
    }
  }
  CHECK_THROWS_AS(th::spectrum_mean_beta(5, 3, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("spectrum means sum to the pangenome expectation") {
  for (const int n : {2, 9, 50}) {
    for (const double rho : {0.1, 1.0, 2.03, 10.0}) {
      double sum = 0.0;
      for (int k = 1; k <= n; ++k) sum += th::spectrum_mean(n, k, 1.0, rho);
      const double expected = th::moments_G(n, 1.0, rho).mean;
      CHECK(std::fabs(sum - expected) <= 1e-10 * expected);
    }
  }
}

TEST_CASE("tuple moment set: values and symmetries") {
  const th::MomentSet s = th::covariances(4, 2.0, 1.0);
  CHECK(s.gene_count_covariance == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.gene_count_mean == doctest::Approx(2.0));
  CHECK(s.one_sided_mean == doctest::Approx(1.0));
  // The two fully-disjoint three-individual overlaps share one value.
  for (const double theta : {0.5, 2.0}) {
    for (const double rho : {0.2, 1.0, 7.0}) {
      const th::MomentSet ms = th::covariances(5, theta, rho);
      CHECK(ms.cov_cyclic == ms.cov_chain);
      CHECK(ms.cov_same_minuend > ms.cov_cyclic);
      CHECK(ms.cov_same_subtrahend > ms.cov_chain);
    }
  }
  // Quadruple-difference mean: theta/((3+rho)(2+rho)) approaches 1/6 as the
  // loss rate vanishes.
  CHECK(th::covariances(4, 1.0, 1e-12).quadruple_mean ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-9));
  CHECK_THROWS_AS(th::covariances(4, 1.0, 0.0), std::invalid_argument);
}
