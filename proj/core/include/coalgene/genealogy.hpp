#pragma once

#include <array>
#include <string>
#include <vector>

#include "coalgene/random.hpp"

namespace coalgene {

struct GenealogyNode {
  int parent = -1;                   // -1 at the root
  std::array<int, 2> child{-1, -1};  // {-1,-1} at leaves
  double time = 0.0;                 // 0 at leaves, coalescence time otherwise
};

/// Rooted binary genealogy in canonical layout: leaves are nodes 0..n-1 at
/// time 0, internal nodes follow in nondecreasing time order, the root (the
/// sample MRCA) is the last node. Children always have smaller ids than
/// their parent, so a single ascending pass visits every node after its
/// children. Immutable after construction.
class Genealogy {
 public:
  /// Validates the node table and takes ownership. `intervals` holds the
  /// durations (T_n, ..., T_2) spent with n, ..., 2 ancestral lines; when
  /// empty they are recovered from the sorted internal node times.
  Genealogy(int leaf_count, std::vector<GenealogyNode> nodes,
            std::vector<double> intervals = {});

  int leaf_count() const { return n_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int root() const { return node_count() - 1; }
  bool is_leaf(int id) const { return id < n_; }
  const GenealogyNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }

  /// Duration with exactly k ancestral lines, 2 <= k <= n.
  double interval(int k) const;
  /// (T_n, T_{n-1}, ..., T_2); empty for a single-leaf genealogy.
  const std::vector<double>& intervals() const { return intervals_; }

  /// Length of the branch from `id` up to its parent; 0 at the root.
  double branch_length(int id) const;
  /// Sum of all branch lengths; 0 for a single leaf.
  double total_length() const;
  /// Time of the sample MRCA; 0 for a single leaf.
  double time_to_mrca() const { return nodes_.back().time; }

  /// Newick string with branch lengths, leaves named s0..s{n-1}.
  std::string to_newick() const;

 private:
  int n_;
  std::vector<GenealogyNode> nodes_;
  std::vector<double> intervals_;
};

/// Samples a Kingman coalescent genealogy with `leaf_count` leaves: while k
/// lines remain, the next coalescence happens after an Exponential(k(k-1)/2)
/// time between a uniformly chosen pair. Output is deterministic given the
/// rng state; the merging pair is drawn with Rng::uniform_pair over the
/// active-lineage array, where the pair (i, j) replaces slot i with the new
/// node and erases slot j.
Genealogy sample_kingman(int leaf_count, Rng& rng);

/// Per-node values of the gene survival function: the probability that a
/// gene present at a point of the tree is retained in at least one leaf
/// below it, when each line loses the gene at rate rho/2. Along a branch
/// the value decays from the leafward endpoint value q as q*exp(-rho*x/2);
/// at an internal node the two rootward child values q1, q2 combine as
/// 1 - (1-q1)(1-q2); leaves carry value 1.
class SurvivalProfile {
 public:
  double rho() const { return rho_; }
  /// Value at node `id` (the leafward endpoint of the branch above it).
  double at_node(int id) const { return node_value_[static_cast<std::size_t>(id)]; }
  /// Value at the rootward end of the branch above `id` (after decay).
  double rootward_of(int id) const { return rootward_value_[static_cast<std::size_t>(id)]; }
  double at_root() const { return node_value_.back(); }

 private:
  friend SurvivalProfile survival_profile(const Genealogy&, double);
  double rho_ = 0.0;
  std::vector<double> node_value_;
  std::vector<double> rootward_value_;
};

/// Computes the survival profile in one leaf-to-root pass. rho = 0 yields
/// the constant profile 1. Negative rho is rejected.
SurvivalProfile survival_profile(const Genealogy& tree, double rho);

/// Mean of the (conditionally Poisson) number of distinct genes observed in
/// the sample, given the genealogy: (theta/2) * integral of the survival
/// function over the tree, plus the stationary Poisson(theta/rho) gene pool
/// at the MRCA thinned by survival to at least one leaf. The per-branch
/// integral is evaluated in closed form as (2q/rho)(1 - exp(-rho*l/2)).
/// Requires rho > 0 (the pool above the root diverges otherwise).
double conditional_mean_genes(const Genealogy& tree, double theta, double rho);

/// Rooted tree with branch lengths but no time orientation; used for the
/// pieces that hang off a spanning subtree. Nodes may have any number of
/// children (one-child nodes act as plain pass-throughs).
struct RootedShapeNode {
  int leaf_id = -1;  // id of the corresponding source-tree leaf, or -1
  std::vector<int> children;
  std::vector<double> edge_length;  // parallel to children
};

struct RootedShape {
  std::vector<RootedShapeNode> nodes;
  int root = 0;
  double total_length() const;
};

/// Survival value at the shape's root: leaves carry 1, each edge of length
/// l decays by exp(-rho*l/2), and a node with child values q_i combines
/// them as 1 - prod(1 - q_i).
double shape_survival_at_root(const RootedShape& shape, double rho);

struct AttachedSubtree {
  int attachment_node = -1;      // source-tree node where the piece meets the spanning tree
  double attachment_time = 0.0;  // its time in the source tree
  RootedShape shape;             // rooted at the attachment point
};

struct SubtreeDecomposition {
  /// Minimal binary tree spanning the focal leaves, rooted at their MRCA;
  /// a single point (one-leaf genealogy of length 0) if only one focal
  /// leaf is given.
  Genealogy spanned;
  /// spanned leaf i corresponds to source leaf spanned_leaf_ids[i].
  std::vector<int> spanned_leaf_ids;
  /// Connected pieces of the (focal + outgroup) span not covered by the
  /// focal span, each rooted where it attaches. At most one piece extends
  /// above the focal MRCA.
  std::vector<AttachedSubtree> attached;
};

/// Splits the minimal subtree spanning `focal + outgroup` leaves into the
/// focal spanning tree and the subtrees hanging off it. The two leaf sets
/// must be nonempty and disjoint.
SubtreeDecomposition spanning_subtree_decomposition(const Genealogy& tree,
                                                    const std::vector<int>& focal,
                                                    const std::vector<int>& outgroup);

/// Conditional mean number of genes carried by every focal leaf and by no
/// outgroup leaf: (theta/rho) * exp(-rho/2 * l(spanned)) * prod_i (1 - p_i),
/// where p_i is the survival value at the root of attached piece i.
double shared_exclusive_mean(const SubtreeDecomposition& decomposition, double theta,
                             double rho);

}  // namespace coalgene
