#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "coalgene/genealogy.hpp"
#include "coalgene/random.hpp"
#include "coalgene/spectrum.hpp"

namespace coalgene {

/// Parameters of the gene gain/loss process. Rates are per coalescent time
/// unit: genes are gained at rate theta/2 per line and each present gene is
/// lost at rate rho/2 per line. core_size counts genes that every
/// individual carries and that cannot be lost.
struct ModelParams {
  double theta = 0.0;
  double rho = 0.0;
  std::uint64_t core_size = 0;

  void validate() const;
};

enum class GeneOrigin : std::uint8_t {
  kRootPool,    // present at the sample MRCA (stationary pool)
  kBranchGain,  // gained along a branch of the genealogy
  kCore,        // conserved gene, carried by everyone
  kExternal,    // loaded from a file; provenance unknown
};

/// Gene presence/absence matrix: one carrier bitmask per gene over the n
/// individuals. Genes carried by nobody are never stored. Stored as a
/// structure of arrays so per-replicate simulation does not allocate per
/// gene.
class PresenceMatrix {
 public:
  explicit PresenceMatrix(int sample_size);

  int sample_size() const { return n_; }
  std::size_t gene_count() const { return ids_.size(); }
  std::size_t words_per_gene() const { return words_; }

  std::uint64_t gene_id(std::size_t gene) const { return ids_[gene]; }
  GeneOrigin origin(std::size_t gene) const { return origins_[gene]; }
  std::span<const std::uint64_t> carrier_words(std::size_t gene) const {
    return {bits_.data() + gene * words_, words_};
  }
  bool carried(std::size_t gene, int individual) const {
    return (bits_[gene * words_ + static_cast<std::size_t>(individual) / 64] >>
            (static_cast<std::size_t>(individual) % 64)) &
           1u;
  }
  int carrier_count(std::size_t gene) const;

  /// True when the matrix was produced by a rho = 0 run that omits the
  /// (infinite) pool of genes shared by the whole population; counts then
  /// cover segregating genes only.
  bool segregating_only() const { return segregating_only_; }
  void set_segregating_only(bool flag) { segregating_only_ = flag; }

  /// Appends a gene. The mask must have a set bit for at least one
  /// individual and none beyond individual n-1. Identifier uniqueness is
  /// the caller's responsibility (the simulators use a running counter).
  void add_gene(std::uint64_t id, GeneOrigin origin,
                std::span<const std::uint64_t> carrier_mask);
  void add_gene_all_carriers(std::uint64_t id, GeneOrigin origin);

  void clear();

 private:
  int n_;
  std::size_t words_;
  std::vector<std::uint64_t> ids_;
  std::vector<GeneOrigin> origins_;
  std::vector<std::uint64_t> bits_;
  bool segregating_only_ = false;
};

/// Simulates gene gain and loss along a fixed genealogy and returns the
/// resulting presence/absence matrix.
///
/// Two exact phases: a Poisson(theta/rho) pool of genes present at the
/// MRCA, then per branch of length l a Poisson(theta*l/2) number of new
/// genes at uniform positions. Every gene is propagated leafward, surviving
/// each branch segment of length x independently with probability
/// exp(-rho*x/2); genes reaching no leaf are dropped. core_size conserved
/// genes with full carrier sets are appended last.
///
/// rho = 0 requires segregating_only = true: the (divergent) root pool is
/// omitted and the returned matrix is flagged accordingly. rho > 0 with
/// segregating_only set is rejected.
PresenceMatrix simulate_genes(const Genealogy& tree, const ModelParams& params, Rng& rng,
                              bool segregating_only = false);

/// Reuses the storage of `out` across replicates; same contract as
/// simulate_genes.
void simulate_genes_into(const Genealogy& tree, const ModelParams& params, Rng& rng,
                         PresenceMatrix& out, bool segregating_only = false);

/// Samples a genealogy, then genes on it.
std::pair<Genealogy, PresenceMatrix> simulate_sample(int leaf_count,
                                                     const ModelParams& params, Rng& rng,
                                                     bool segregating_only = false);

/// Draws a gene frequency spectrum from the forward urn construction: start
/// with one lineage and a weight-rho kill slot; with i lineages, wait an
/// Exponential(i*(i-1+rho)/2) time during which each lineage accumulates
/// Poisson(theta/2 * wait) new genes, then with probability i/(i+rho) a
/// uniformly chosen lineage splits (the copy inherits its current genes)
/// and with probability rho/(i+rho) a fresh empty lineage enters. When n
/// lineages have lived through their final interval, each lineage is one
/// sampled individual. Per-class means match the genealogy-based simulator
/// exactly while sharing no code with it, which is what makes it useful as
/// an oracle. core_size is ignored here; the spectrum covers dispensable
/// genes only.
SpectrumCounts hoppe_urn_spectrum(int leaf_count, const ModelParams& params, Rng& rng);

}  // namespace coalgene
