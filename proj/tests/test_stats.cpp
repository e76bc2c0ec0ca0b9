#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coalgene/gene_process.hpp"
#include "coalgene/stats.hpp"
#include "test_helpers.hpp"

using namespace coalgene;
using coalgene::testing::make_matrix;

namespace {

// Direct pair-loop evaluation of the mean one-sided difference; oracle for
// the spectrum-identity implementation.
double pairwise_direct(const PresenceMatrix& m) {
  const int n = m.sample_size();
  std::uint64_t sum = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) sum += one_sided_difference(m, i, j);
    }
  }
  return static_cast<double>(sum) / (static_cast<double>(n) * (n - 1));
}

PresenceMatrix random_matrix(Rng& rng, int max_n, int max_genes) {
  const int n = 4 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(max_n - 3)));
  const auto genes = rng.uniform_below(static_cast<std::uint64_t>(max_genes) + 1);
  PresenceMatrix m(n);
  std::vector<std::uint64_t> mask(m.words_per_gene());
  std::uint64_t id = 0;
  for (std::uint64_t g = 0; g < genes; ++g) {
    mask[0] = 0;
    for (int i = 0; i < n; ++i) {
      if (rng.bernoulli(0.4)) mask[0] |= std::uint64_t{1} << i;
    }
    if (mask[0] == 0) mask[0] = std::uint64_t{1} << rng.uniform_below(static_cast<std::uint64_t>(n));
    m.add_gene(id++, GeneOrigin::kExternal, mask);
  }
  return m;
}

}  // namespace

TEST_CASE("average gene number") {
  CHECK(average_gene_number(make_matrix(3, {})) == 0.0);
  CHECK(average_gene_number(make_matrix(2, {{0}, {0, 1}})) == doctest::Approx(1.5));
}

TEST_CASE("mean pairwise differences: hand values and the direct-loop oracle") {
  CHECK(mean_pairwise_differences(make_matrix(3, {{0, 1, 2}, {0, 1, 2}})) == 0.0);
  CHECK(mean_pairwise_differences(make_matrix(2, {{0}, {0, 1}})) == doctest::Approx(0.5));
  CHECK_THROWS_AS(mean_pairwise_differences(make_matrix(1, {{0}})),
                  std::invalid_argument);

  Rng rng(2025);
  for (int rep = 0; rep < 100; ++rep) {
    const PresenceMatrix m = random_matrix(rng, 8, 40);
    CHECK(mean_pairwise_differences(m) == doctest::Approx(pairwise_direct(m)).epsilon(1e-12));
  }
}

TEST_CASE("quadruple difference") {
  CHECK(quadruple_difference(make_matrix(4, {}), 0, 1, 2, 3) == 0);
  const PresenceMatrix m = make_matrix(4, {{0, 1}});
  CHECK(quadruple_difference(m, 0, 1, 2, 3) == 1);
  CHECK(quadruple_difference(m, 0, 2, 1, 3) == 0);
  CHECK_THROWS_AS(quadruple_difference(m, 0, 0, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(quadruple_difference(m, 0, 1, 2, 4), std::invalid_argument);
}

TEST_CASE("incongruence: hand count on the minimal example") {
  // Two genes with carriers {1,2} and {1,3} (1-based) show all four
  // presence/absence patterns across the four individuals.
  const PresenceMatrix m = make_matrix(4, {{0, 1}, {0, 2}});
  CHECK(incongruence_numerator(m) == 2);
  CHECK(incongruence_statistic(m) == doctest::Approx(1.0 / 12.0));
  CHECK(incongruence_bruteforce_numerator(m) == 2);
  CHECK(incongruence_bruteforce(m) == doctest::Approx(1.0 / 12.0));
}

TEST_CASE("incongruence vanishes on identical rows") {
  const PresenceMatrix m = make_matrix(5, {{0, 1, 2, 3, 4}, {0, 1, 2, 3, 4}});
  CHECK(incongruence_numerator(m) == 0);
  CHECK(incongruence_bruteforce_numerator(m) == 0);
}

TEST_CASE("incongruence gene-pair identity equals brute force exactly") {
  Rng rng(77);
  for (int rep = 0; rep < 200; ++rep) {
    const PresenceMatrix m = random_matrix(rng, 6, 30);
    CHECK(incongruence_numerator(m) == incongruence_bruteforce_numerator(m));
  }
  CHECK_THROWS_AS(incongruence_statistic(make_matrix(3, {{0}})), std::invalid_argument);
}

TEST_CASE("gene frequency spectrum and pangenome size") {
  const SpectrumCounts empty = gene_frequency_spectrum(make_matrix(3, {}));
  CHECK(empty.total_genes() == 0);

  const PresenceMatrix m = make_matrix(3, {{0}, {0, 1}, {0, 1, 2}});
  const SpectrumCounts spec = gene_frequency_spectrum(m);
  CHECK(spec.at(1) == 1);
  CHECK(spec.at(2) == 1);
  CHECK(spec.at(3) == 1);
  CHECK(pangenome_size(m) == 3);
  CHECK(spec.total_genes() == pangenome_size(m));
}

TEST_CASE("core-inclusive report") {
  const PresenceMatrix m = make_matrix(3, {{0}, {0, 1}, {0, 1, 2}});
  const StatReport report = compute_stats(m);

  const StatReport same = with_core(report, 0);
  CHECK(same.average_genes == report.average_genes);
  CHECK(same.pangenome == report.pangenome);
  CHECK(same.spectrum == report.spectrum);

  const StatReport tilde = with_core(report, 2);
  CHECK(tilde.average_genes == doctest::Approx(report.average_genes + 2.0));
  CHECK(tilde.pangenome == report.pangenome + 2);
  CHECK(tilde.spectrum.at(3) == 3);
  CHECK(tilde.spectrum.at(1) == 1);
  CHECK(tilde.pairwise_differences == report.pairwise_differences);

  const StatReport big = with_core(StatReport{.sample_size = 2,
                                              .average_genes = 1.5,
                                              .pangenome = 3,
                                              .spectrum = SpectrumCounts(2)},
                                   1270);
  CHECK(big.average_genes == doctest::Approx(1271.5));
}

TEST_CASE("spectrum identities hold exactly on random matrices") {
  Rng rng(31337);
  for (int rep = 0; rep < 100; ++rep) {
    const PresenceMatrix m = random_matrix(rng, 9, 60);
    const int n = m.sample_size();
    const SpectrumCounts spec = gene_frequency_spectrum(m);

    double weighted = 0.0, pair_weighted = 0.0;
    std::uint64_t total = 0;
    for (int k = 1; k <= n; ++k) {
      const auto count = static_cast<double>(spec.at(k));
      weighted += k * count;
      pair_weighted += static_cast<double>(k) * (n - k) * count;
      total += spec.at(k);
    }
    CHECK(average_gene_number(m) == doctest::Approx(weighted / n).epsilon(1e-12));
    CHECK(pangenome_size(m) == total);
    CHECK(mean_pairwise_differences(m) ==
          doctest::Approx(pair_weighted / (static_cast<double>(n) * (n - 1)))
              .epsilon(1e-12));
  }
}

TEST_CASE("statistics are invariant under permuting individuals") {
  Rng rng(4242);
  const PresenceMatrix m = random_matrix(rng, 6, 40);
  const int n = m.sample_size();
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    std::swap(perm[static_cast<std::size_t>(i)],
              perm[rng.uniform_below(static_cast<std::uint64_t>(i) + 1)]);
  }
  PresenceMatrix permuted(n);
  std::vector<std::uint64_t> mask(m.words_per_gene());
  for (std::size_t g = 0; g < m.gene_count(); ++g) {
    mask[0] = 0;
    for (int i = 0; i < n; ++i) {
      if (m.carried(g, i)) mask[0] |= std::uint64_t{1} << perm[static_cast<std::size_t>(i)];
    }
    permuted.add_gene(m.gene_id(g), m.origin(g), mask);
  }
  CHECK(average_gene_number(permuted) == average_gene_number(m));
  CHECK(mean_pairwise_differences(permuted) == mean_pairwise_differences(m));
  CHECK(incongruence_numerator(permuted) == incongruence_numerator(m));
  CHECK(pangenome_size(permuted) == pangenome_size(m));
  CHECK(gene_frequency_spectrum(permuted) == gene_frequency_spectrum(m));
}

TEST_CASE("adding a gene never shrinks A or G") {
  PresenceMatrix m = make_matrix(4, {{0, 2}, {1}});
  const double a_before = average_gene_number(m);
  const std::uint64_t g_before = pangenome_size(m);
  const std::uint64_t one = 0b1000;
  m.add_gene(99, GeneOrigin::kExternal, std::vector<std::uint64_t>{one});
  CHECK(average_gene_number(m) > a_before);
  CHECK(pangenome_size(m) == g_before + 1);
}

TEST_CASE("presence matrix rejects malformed genes") {
  PresenceMatrix m(3);
  const std::vector<std::uint64_t> empty_mask{0};
  CHECK_THROWS_AS(m.add_gene(0, GeneOrigin::kExternal, empty_mask),
                  std::invalid_argument);
  const std::vector<std::uint64_t> stray{std::uint64_t{1} << 5};
  CHECK_THROWS_AS(m.add_gene(0, GeneOrigin::kExternal, stray), std::invalid_argument);
  CHECK_THROWS_AS(PresenceMatrix(0), std::invalid_argument);
}
