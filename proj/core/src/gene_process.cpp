#include "coalgene/gene_process.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace coalgene {

void ModelParams::validate() const {
  if (!(theta >= 0.0)) {
    throw std::invalid_argument("ModelParams: theta must be >= 0");
  }
  if (!(rho >= 0.0)) {
    throw std::invalid_argument("ModelParams: rho must be >= 0");
  }
}

PresenceMatrix::PresenceMatrix(int sample_size)
    : n_(sample_size), words_((static_cast<std::size_t>(sample_size) + 63) / 64) {
  if (sample_size < 1) {
    throw std::invalid_argument("PresenceMatrix: sample size must be >= 1");
  }
}

int PresenceMatrix::carrier_count(std::size_t gene) const {
  int count = 0;
  for (std::uint64_t word : carrier_words(gene)) {
    count += std::popcount(word);
  }
  return count;
}

void PresenceMatrix::add_gene(std::uint64_t id, GeneOrigin origin,
                              std::span<const std::uint64_t> carrier_mask) {
  if (carrier_mask.size() != words_) {
    throw std::invalid_argument("PresenceMatrix::add_gene: mask width mismatch");
  }
  std::uint64_t any = 0;
  for (std::uint64_t word : carrier_mask) any |= word;
  if (any == 0) {
    throw std::invalid_argument("PresenceMatrix::add_gene: gene has no carriers");
  }
  const int spare = static_cast<int>(words_ * 64) - n_;
  if (spare > 0 && (carrier_mask.back() >> (64 - spare)) != 0) {
    throw std::invalid_argument("PresenceMatrix::add_gene: carrier bit out of range");
  }
  ids_.push_back(id);
  origins_.push_back(origin);
  bits_.insert(bits_.end(), carrier_mask.begin(), carrier_mask.end());
}

void PresenceMatrix::add_gene_all_carriers(std::uint64_t id, GeneOrigin origin) {
  ids_.push_back(id);
  origins_.push_back(origin);
  for (std::size_t w = 0; w < words_; ++w) {
    const int bits_here = std::min<int>(64, n_ - static_cast<int>(w) * 64);
    bits_.push_back(bits_here == 64 ? ~std::uint64_t{0}
                                    : (std::uint64_t{1} << bits_here) - 1);
  }
}

void PresenceMatrix::clear() {
  ids_.clear();
  origins_.clear();
  bits_.clear();
  segregating_only_ = false;
}

namespace {

// Scratch state for one simulation run over a fixed tree.
struct Propagator {
  const Genealogy& tree;
  Rng& rng;
  std::vector<double> edge_survival;  // P(gene survives the branch above node id)
  std::vector<std::uint64_t> mask;
  std::vector<int> stack;
  bool lossless;

  Propagator(const Genealogy& t, double rho, Rng& r, std::size_t words)
      : tree(t), rng(r), mask(words, 0), lossless(rho == 0.0) {
    edge_survival.resize(static_cast<std::size_t>(t.node_count()), 1.0);
    for (int id = 0; id < t.node_count() - 1; ++id) {
      edge_survival[static_cast<std::size_t>(id)] =
          std::exp(-0.5 * rho * t.branch_length(id));
    }
  }

  // Drops the gene down from `from` (gene known present there); sets carrier
  // bits for every leaf it reaches. Returns true if any leaf was reached.
  bool drop_from(int from) {
    std::fill(mask.begin(), mask.end(), 0);
    bool reached = false;
    stack.clear();
    stack.push_back(from);
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      if (tree.is_leaf(v)) {
        mask[static_cast<std::size_t>(v) / 64] |= std::uint64_t{1}
                                                  << (static_cast<std::size_t>(v) % 64);
        reached = true;
        continue;
      }
      for (int c : tree.node(v).child) {
        const double s = edge_survival[static_cast<std::size_t>(c)];
        if (lossless || rng.uniform01() < s) {
          stack.push_back(c);
        }
      }
    }
    return reached;
  }
};

}  // namespace

void simulate_genes_into(const Genealogy& tree, const ModelParams& params, Rng& rng,
                         PresenceMatrix& out, bool segregating_only) {
  params.validate();
  if (params.rho == 0.0 && !segregating_only) {
    throw std::invalid_argument(
        "simulate_genes: rho = 0 carries an infinite shared gene pool; "
        "pass segregating_only to simulate tree-gained genes only");
  }
  if (params.rho > 0.0 && segregating_only) {
    throw std::invalid_argument("simulate_genes: segregating_only requires rho = 0");
  }
  if (out.sample_size() != tree.leaf_count()) {
    throw std::invalid_argument("simulate_genes: matrix/tree size mismatch");
  }
  out.clear();
  out.set_segregating_only(segregating_only);

  Propagator prop(tree, params.rho, rng, out.words_per_gene());
  std::uint64_t next_id = 0;

  if (!segregating_only) {
    const std::uint64_t pool = rng.poisson(params.theta / params.rho);
    for (std::uint64_t g = 0; g < pool; ++g) {
      if (prop.drop_from(tree.root())) {
        out.add_gene(next_id++, GeneOrigin::kRootPool, prop.mask);
      } else {
        ++next_id;  // burn the identifier; the gene existed but died out
      }
    }
  }

  for (int id = 0; id < tree.node_count() - 1; ++id) {
    const double len = tree.branch_length(id);
    const std::uint64_t gains = rng.poisson(0.5 * params.theta * len);
    for (std::uint64_t g = 0; g < gains; ++g) {
      // Distance from the gain point down to the branch's lower node.
      const double down = rng.uniform01() * len;
      const bool survives_stub =
          prop.lossless || rng.uniform01() < std::exp(-0.5 * params.rho * down);
      if (survives_stub && prop.drop_from(id)) {
        out.add_gene(next_id++, GeneOrigin::kBranchGain, prop.mask);
      } else {
        ++next_id;
      }
    }
  }

  for (std::uint64_t g = 0; g < params.core_size; ++g) {
    out.add_gene_all_carriers(next_id++, GeneOrigin::kCore);
  }
}

PresenceMatrix simulate_genes(const Genealogy& tree, const ModelParams& params, Rng& rng,
                              bool segregating_only) {
  PresenceMatrix out(tree.leaf_count());
  simulate_genes_into(tree, params, rng, out, segregating_only);
  return out;
}

std::pair<Genealogy, PresenceMatrix> simulate_sample(int leaf_count,
                                                     const ModelParams& params, Rng& rng,
                                                     bool segregating_only) {
  Genealogy tree = sample_kingman(leaf_count, rng);
  PresenceMatrix matrix = simulate_genes(tree, params, rng, segregating_only);
  return {std::move(tree), std::move(matrix)};
}

SpectrumCounts hoppe_urn_spectrum(int leaf_count, const ModelParams& params, Rng& rng) {
  if (leaf_count < 1) {
    throw std::invalid_argument("hoppe_urn_spectrum: need at least one individual");
  }
  params.validate();
  if (!(params.rho > 0.0)) {
    throw std::invalid_argument("hoppe_urn_spectrum: rho must be > 0");
  }

  // lineage_genes[l] lists the genes lineage l carries right now; a split
  // copies the list, so a gene ends up on every descendant of the lineage
  // it was gained on.
  std::vector<std::vector<std::uint32_t>> lineage_genes(1);
  std::uint32_t next_gene = 0;
  for (int lines = 1; lines <= leaf_count; ++lines) {
    const double rate = 0.5 * lines * (lines - 1 + params.rho);
    const double wait = rng.exponential(rate);
    if (params.theta > 0.0) {
      for (auto& genes : lineage_genes) {
        const std::uint64_t gains = rng.poisson(0.5 * params.theta * wait);
        for (std::uint64_t g = 0; g < gains; ++g) genes.push_back(next_gene++);
      }
    }
    if (lines == leaf_count) break;
    const double pick = rng.uniform01() * (lines + params.rho);
    if (pick < static_cast<double>(lines)) {
      auto inherited = lineage_genes[static_cast<std::size_t>(pick)];
      lineage_genes.push_back(std::move(inherited));
    } else {
      lineage_genes.emplace_back();  // a line the gene process never saw before
    }
  }

  std::vector<std::uint32_t> carriers(next_gene, 0);
  for (const auto& genes : lineage_genes) {
    for (std::uint32_t g : genes) ++carriers[g];
  }
  SpectrumCounts spectrum(leaf_count);
  for (std::uint32_t c : carriers) {
    ++spectrum.counts[c - 1];
  }
  return spectrum;
}

}  // namespace coalgene
