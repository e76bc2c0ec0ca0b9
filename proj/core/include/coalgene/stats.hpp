#pragma once

#include <cstdint>
#include <optional>

#include "coalgene/gene_process.hpp"
#include "coalgene/spectrum.hpp"

namespace coalgene {

/// A: mean number of genes per individual.
double average_gene_number(const PresenceMatrix& m);

/// D: average over ordered pairs (i, j) of |genes of i absent from j|.
/// Computed through the spectrum identity sum_k k(n-k) G_k / (n(n-1)).
/// Requires n >= 2.
double mean_pairwise_differences(const PresenceMatrix& m);

/// Number of genes carried by the i-th individual.
std::uint64_t gene_count_of(const PresenceMatrix& m, int individual);

/// |genes of i absent from j|, one ordered pair.
std::uint64_t one_sided_difference(const PresenceMatrix& m, int i, int j);

/// Genes present in both i and j and absent from both k and l. The four
/// indices must be distinct and in range.
std::uint64_t quadruple_difference(const PresenceMatrix& m, int i, int j, int k, int l);

/// P: average of quadruple_difference(i,j,k,l) * quadruple_difference(i,k,j,l)
/// over ordered quadruples of distinct individuals. A pair of genes
/// contributes whenever four individuals show all four presence/absence
/// combinations, which cannot happen without gene loss.
///
/// Evaluated by the gene-pair identity: the quadruple sum equals
/// sum over ordered gene pairs (u, v), u != v, of n11*n10*n01*n00 where the
/// four counts split the individuals by carrying u and/or v. Integer
/// arithmetic throughout, one division at the end. O(m^2 * n/64) instead of
/// O(n^4 * m^2). Requires n >= 4.
double incongruence_statistic(const PresenceMatrix& m);
std::uint64_t incongruence_numerator(const PresenceMatrix& m);

/// Same statistic by direct summation over ordered quadruples; O(n^4 * m).
/// Test oracle for the gene-pair identity, sensible for n <= 8, m <= 50.
double incongruence_bruteforce(const PresenceMatrix& m);
std::uint64_t incongruence_bruteforce_numerator(const PresenceMatrix& m);

/// Histogram of carrier counts (classes 1..n).
SpectrumCounts gene_frequency_spectrum(const PresenceMatrix& m);

/// G: number of distinct genes in the sample.
std::uint64_t pangenome_size(const PresenceMatrix& m);

struct StatReport {
  int sample_size = 0;
  double average_genes = 0.0;                       // A
  std::optional<double> pairwise_differences;       // D, defined for n >= 2
  std::optional<double> incongruence;               // P, defined for n >= 4
  std::uint64_t pangenome = 0;                      // G
  SpectrumCounts spectrum;
  std::uint64_t core_size = 0;                      // applied via with_core
};

StatReport compute_stats(const PresenceMatrix& m);

/// Report for the union of the dispensable and core genome: A and G grow by
/// core_size, the top spectrum class gains core_size genes, D and P are
/// unchanged.
StatReport with_core(const StatReport& report, std::uint64_t core_size);

}  // namespace coalgene
