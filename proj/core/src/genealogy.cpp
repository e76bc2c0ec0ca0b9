#include "coalgene/genealogy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace coalgene {

Genealogy::Genealogy(int leaf_count, std::vector<GenealogyNode> nodes,
                     std::vector<double> intervals)
    : n_(leaf_count), nodes_(std::move(nodes)), intervals_(std::move(intervals)) {
  if (n_ < 1) {
    throw std::invalid_argument("Genealogy: need at least one leaf");
  }
  if (nodes_.size() != 2 * static_cast<std::size_t>(n_) - 1) {
    throw std::invalid_argument("Genealogy: a binary tree on n leaves has 2n-1 nodes");
  }
  for (int id = 0; id < node_count(); ++id) {
    const auto& v = nodes_[static_cast<std::size_t>(id)];
    if (id < n_) {
      if (v.child[0] != -1 || v.child[1] != -1 || v.time != 0.0) {
        throw std::invalid_argument("Genealogy: leaves must be childless at time 0");
      }
    } else {
      for (int c : v.child) {
        if (c < 0 || c >= id) {
          throw std::invalid_argument("Genealogy: children must precede their parent");
        }
        if (nodes_[static_cast<std::size_t>(c)].parent != id) {
          throw std::invalid_argument("Genealogy: parent pointer mismatch");
        }
        if (!(v.time > nodes_[static_cast<std::size_t>(c)].time)) {
          throw std::invalid_argument("Genealogy: node time must exceed child times");
        }
      }
      if (v.child[0] == v.child[1]) {
        throw std::invalid_argument("Genealogy: children must be distinct");
      }
      if (v.time < nodes_[static_cast<std::size_t>(id) - 1].time && id > n_) {
        throw std::invalid_argument("Genealogy: internal nodes must be in time order");
      }
    }
    const bool is_root = id == node_count() - 1;
    if (is_root != (v.parent == -1)) {
      throw std::invalid_argument("Genealogy: exactly the last node is parentless");
    }
  }
  if (intervals_.empty() && n_ > 1) {
    intervals_.reserve(static_cast<std::size_t>(n_) - 1);
    double prev = 0.0;
    for (int id = n_; id < node_count(); ++id) {
      intervals_.push_back(nodes_[static_cast<std::size_t>(id)].time - prev);
      prev = nodes_[static_cast<std::size_t>(id)].time;
    }
  }
  if (intervals_.size() != static_cast<std::size_t>(n_) - (n_ > 0 ? 1 : 0)) {
    throw std::invalid_argument("Genealogy: expected n-1 coalescence intervals");
  }
  const double total = std::accumulate(intervals_.begin(), intervals_.end(), 0.0);
  if (std::fabs(total - time_to_mrca()) > 1e-9 * (1.0 + std::fabs(time_to_mrca()))) {
    throw std::invalid_argument("Genealogy: intervals do not sum to the root time");
  }
}

double Genealogy::interval(int k) const {
  if (k < 2 || k > n_) {
    throw std::invalid_argument("Genealogy::interval: k must be in [2, n]");
  }
  return intervals_[static_cast<std::size_t>(n_ - k)];
}

double Genealogy::branch_length(int id) const {
  const auto& v = node(id);
  if (v.parent == -1) return 0.0;
  return node(v.parent).time - v.time;
}

double Genealogy::total_length() const {
  double sum = 0.0;
  for (int id = 0; id < node_count() - 1; ++id) {
    sum += branch_length(id);
  }
  return sum;
}

std::string Genealogy::to_newick() const {
  std::ostringstream os;
  os << std::setprecision(17);
  std::function<void(int)> write = [&](int id) {
    const auto& v = node(id);
    if (is_leaf(id)) {
      os << 's' << id;
      return;
    }
    os << '(';
    for (int k = 0; k < 2; ++k) {
      if (k) os << ',';
      write(v.child[k]);
      os << ':' << (v.time - node(v.child[k]).time);
    }
    os << ')';
  };
  write(root());
  os << ';';
  return os.str();
}

Genealogy sample_kingman(int leaf_count, Rng& rng) {
  if (leaf_count < 1) {
    throw std::invalid_argument("sample_kingman: need at least one leaf");
  }
  const int n = leaf_count;
  std::vector<GenealogyNode> nodes(2 * static_cast<std::size_t>(n) - 1);
  std::vector<double> intervals;
  intervals.reserve(static_cast<std::size_t>(n) - 1);
  std::vector<int> active(static_cast<std::size_t>(n));
  std::iota(active.begin(), active.end(), 0);
  double t = 0.0;
  int next_id = n;
  for (int k = n; k >= 2; --k) {
    const double wait = rng.exponential(k * (k - 1) / 2.0);
    intervals.push_back(wait);
    t += wait;
    const auto [i, j] = rng.uniform_pair(k);
    const int a = active[static_cast<std::size_t>(i)];
    const int b = active[static_cast<std::size_t>(j)];
    auto& merged = nodes[static_cast<std::size_t>(next_id)];
    merged.child = {a, b};
    merged.time = t;
    nodes[static_cast<std::size_t>(a)].parent = next_id;
    nodes[static_cast<std::size_t>(b)].parent = next_id;
    active[static_cast<std::size_t>(i)] = next_id;
    active.erase(active.begin() + j);
    ++next_id;
  }
  return Genealogy(n, std::move(nodes), std::move(intervals));
}

SurvivalProfile survival_profile(const Genealogy& tree, double rho) {
  if (rho < 0.0) {
    throw std::invalid_argument("survival_profile: rho must be >= 0");
  }
  SurvivalProfile profile;
  profile.rho_ = rho;
  profile.node_value_.assign(static_cast<std::size_t>(tree.node_count()), 1.0);
  profile.rootward_value_.assign(static_cast<std::size_t>(tree.node_count()), 1.0);
  for (int id = tree.leaf_count(); id < tree.node_count(); ++id) {
    const auto& v = tree.node(id);
    double miss = 1.0;
    for (int c : v.child) {
      const double decay = std::exp(-0.5 * rho * (v.time - tree.node(c).time));
      const double q = profile.node_value_[static_cast<std::size_t>(c)] * decay;
      profile.rootward_value_[static_cast<std::size_t>(c)] = q;
      miss *= 1.0 - q;
    }
    profile.node_value_[static_cast<std::size_t>(id)] = 1.0 - miss;
  }
  profile.rootward_value_.back() = profile.node_value_.back();
  return profile;
}

double conditional_mean_genes(const Genealogy& tree, double theta, double rho) {
  if (!(rho > 0.0)) {
    throw std::invalid_argument("conditional_mean_genes: rho must be > 0");
  }
  if (theta < 0.0) {
    throw std::invalid_argument("conditional_mean_genes: theta must be >= 0");
  }
  const SurvivalProfile profile = survival_profile(tree, rho);
  double integral = 0.0;
  for (int id = 0; id < tree.node_count() - 1; ++id) {
    const double q = profile.at_node(id);
    const double len = tree.branch_length(id);
    integral += q * (2.0 / rho) * (1.0 - std::exp(-0.5 * rho * len));
  }
  return 0.5 * theta * integral + (theta / rho) * profile.at_root();
}

double RootedShape::total_length() const {
  double sum = 0.0;
  for (const auto& v : nodes) {
    for (double len : v.edge_length) sum += len;
  }
  return sum;
}

double shape_survival_at_root(const RootedShape& shape, double rho) {
  if (rho < 0.0) {
    throw std::invalid_argument("shape_survival_at_root: rho must be >= 0");
  }
  std::vector<double> value(shape.nodes.size(), 1.0);
  std::vector<std::pair<int, bool>> stack{{shape.root, false}};
  while (!stack.empty()) {
    const auto [id, expanded] = stack.back();
    stack.pop_back();
    const auto& v = shape.nodes[static_cast<std::size_t>(id)];
    if (v.children.empty()) continue;  // leaf keeps value 1
    if (!expanded) {
      stack.emplace_back(id, true);
      for (int c : v.children) stack.emplace_back(c, false);
      continue;
    }
    double miss = 1.0;
    for (std::size_t k = 0; k < v.children.size(); ++k) {
      const double decay = std::exp(-0.5 * rho * v.edge_length[k]);
      miss *= 1.0 - value[static_cast<std::size_t>(v.children[k])] * decay;
    }
    value[static_cast<std::size_t>(id)] = 1.0 - miss;
  }
  return value[static_cast<std::size_t>(shape.root)];
}

namespace {

// Reduced span of a leaf subset: original node ids of its leaves and
// branching points, in a parent/children table.
struct SpanTree {
  std::vector<int> orig;                 // source-tree node id
  std::vector<std::vector<int>> kids;    // indices into this table
  std::vector<int> up;                   // parent index, -1 at span root
  int root = -1;
};

SpanTree reduce_span(const Genealogy& tree, const std::vector<int>& below_count,
                     int total, int from) {
  SpanTree span;
  std::function<int(int)> build = [&](int v) -> int {
    const auto& node = tree.node(v);
    if (tree.is_leaf(v)) {
      if (below_count[static_cast<std::size_t>(v)] == 0) return -1;
      span.orig.push_back(v);
      span.kids.emplace_back();
      span.up.push_back(-1);
      return static_cast<int>(span.orig.size()) - 1;
    }
    int reduced[2] = {-1, -1};
    int hits = 0;
    for (int k = 0; k < 2; ++k) {
      if (below_count[static_cast<std::size_t>(node.child[k])] > 0) {
        reduced[hits++] = build(node.child[k]);
      }
    }
    if (hits == 0) return -1;
    if (hits == 1) return reduced[0];  // pass-through point, suppressed
    span.orig.push_back(v);
    span.kids.push_back({reduced[0], reduced[1]});
    span.up.push_back(-1);
    const int me = static_cast<int>(span.orig.size()) - 1;
    span.up[static_cast<std::size_t>(reduced[0])] = me;
    span.up[static_cast<std::size_t>(reduced[1])] = me;
    return me;
  };
  (void)total;
  span.root = build(from);
  return span;
}

// Lowest source node having all `count` marked leaves below it, found by
// walking upward from one of them.
int mrca_of_marked(const Genealogy& tree, const std::vector<int>& below_count, int leaf,
                   int count) {
  int v = leaf;
  while (below_count[static_cast<std::size_t>(v)] < count) {
    v = tree.node(v).parent;
  }
  return v;
}

bool is_ancestor_or_self(const Genealogy& tree, int ancestor, int v) {
  while (v != -1) {
    if (v == ancestor) return true;
    v = tree.node(v).parent;
  }
  return false;
}

// Deep-copies a span subtree into a RootedShape node list; returns the new
// node's index.
int copy_span_subtree(const Genealogy& tree, const SpanTree& span, int span_id,
                      RootedShape& shape) {
  const int orig = span.orig[static_cast<std::size_t>(span_id)];
  RootedShapeNode node;
  if (tree.is_leaf(orig)) node.leaf_id = orig;
  const int me = static_cast<int>(shape.nodes.size());
  shape.nodes.push_back(std::move(node));
  for (int child : span.kids[static_cast<std::size_t>(span_id)]) {
    const int copied = copy_span_subtree(tree, span, child, shape);
    const int child_orig = span.orig[static_cast<std::size_t>(child)];
    shape.nodes[static_cast<std::size_t>(me)].children.push_back(copied);
    shape.nodes[static_cast<std::size_t>(me)].edge_length.push_back(
        tree.node(orig).time - tree.node(child_orig).time);
  }
  return me;
}

Genealogy span_to_genealogy(const Genealogy& tree, const SpanTree& span,
                            std::vector<int>& leaf_ids) {
  // Collect leaves in span order, internals sorted by time, then emit the
  // canonical node layout.
  std::vector<int> leaves, internals;
  for (std::size_t i = 0; i < span.orig.size(); ++i) {
    (span.kids[i].empty() ? leaves : internals).push_back(static_cast<int>(i));
  }
  std::stable_sort(internals.begin(), internals.end(), [&](int a, int b) {
    return tree.node(span.orig[static_cast<std::size_t>(a)]).time <
           tree.node(span.orig[static_cast<std::size_t>(b)]).time;
  });
  const int m = static_cast<int>(leaves.size());
  std::vector<int> remap(span.orig.size(), -1);
  for (int i = 0; i < m; ++i) remap[static_cast<std::size_t>(leaves[i])] = i;
  for (std::size_t r = 0; r < internals.size(); ++r) {
    remap[static_cast<std::size_t>(internals[r])] = m + static_cast<int>(r);
  }
  std::vector<GenealogyNode> nodes(span.orig.size());
  leaf_ids.assign(static_cast<std::size_t>(m), -1);
  for (std::size_t i = 0; i < span.orig.size(); ++i) {
    const int id = remap[i];
    auto& out = nodes[static_cast<std::size_t>(id)];
    if (span.kids[i].empty()) {
      leaf_ids[static_cast<std::size_t>(id)] = span.orig[i];
    } else {
      out.time = tree.node(span.orig[i]).time;
      out.child = {remap[static_cast<std::size_t>(span.kids[i][0])],
                   remap[static_cast<std::size_t>(span.kids[i][1])]};
      for (int c : out.child) nodes[static_cast<std::size_t>(c)].parent = id;
    }
  }
  return Genealogy(m, std::move(nodes));
}

}  // namespace

SubtreeDecomposition spanning_subtree_decomposition(const Genealogy& tree,
                                                    const std::vector<int>& focal,
                                                    const std::vector<int>& outgroup) {
  if (focal.empty() || outgroup.empty()) {
    throw std::invalid_argument(
        "spanning_subtree_decomposition: both leaf sets must be nonempty");
  }
  std::unordered_set<int> seen;
  for (const auto* set : {&focal, &outgroup}) {
    for (int leaf : *set) {
      if (leaf < 0 || leaf >= tree.leaf_count()) {
        throw std::invalid_argument("spanning_subtree_decomposition: leaf out of range");
      }
      if (!seen.insert(leaf).second) {
        throw std::invalid_argument(
            "spanning_subtree_decomposition: leaf sets must be disjoint");
      }
    }
  }

  const auto count = static_cast<std::size_t>(tree.node_count());
  std::vector<int> below_focal(count, 0), below_union(count, 0);
  for (int leaf : focal) below_focal[static_cast<std::size_t>(leaf)] = 1;
  for (int leaf : focal) below_union[static_cast<std::size_t>(leaf)] = 1;
  for (int leaf : outgroup) below_union[static_cast<std::size_t>(leaf)] = 1;
  for (int id = tree.leaf_count(); id < tree.node_count(); ++id) {
    const auto& v = tree.node(id);
    below_focal[static_cast<std::size_t>(id)] =
        below_focal[static_cast<std::size_t>(v.child[0])] +
        below_focal[static_cast<std::size_t>(v.child[1])];
    below_union[static_cast<std::size_t>(id)] =
        below_union[static_cast<std::size_t>(v.child[0])] +
        below_union[static_cast<std::size_t>(v.child[1])];
  }
  const int focal_root =
      mrca_of_marked(tree, below_focal, focal[0], static_cast<int>(focal.size()));
  const int union_root = mrca_of_marked(tree, below_union, focal[0],
                                        static_cast<int>(focal.size() + outgroup.size()));

  SubtreeDecomposition result{
      .spanned = Genealogy(1, {GenealogyNode{}}), .spanned_leaf_ids = {}, .attached = {}};
  if (focal.size() == 1) {
    result.spanned_leaf_ids = {focal[0]};
  } else {
    const SpanTree focal_span =
        reduce_span(tree, below_focal, static_cast<int>(focal.size()), focal_root);
    result.spanned = span_to_genealogy(tree, focal_span, result.spanned_leaf_ids);
  }

  const SpanTree u = reduce_span(
      tree, below_union, static_cast<int>(focal.size() + outgroup.size()), union_root);

  std::vector<char> on_focal_span(u.orig.size(), 0);
  int focal_root_span_id = -1;
  for (std::size_t i = 0; i < u.orig.size(); ++i) {
    const int orig = u.orig[i];
    if (below_focal[static_cast<std::size_t>(orig)] > 0 &&
        is_ancestor_or_self(tree, focal_root, orig)) {
      on_focal_span[i] = 1;
    }
    if (orig == focal_root) focal_root_span_id = static_cast<int>(i);
  }

  // Pieces hanging below the focal span.
  for (std::size_t i = 0; i < u.orig.size(); ++i) {
    if (!on_focal_span[i]) continue;
    for (int child : u.kids[i]) {
      if (on_focal_span[static_cast<std::size_t>(child)]) continue;
      AttachedSubtree piece;
      piece.attachment_node = u.orig[i];
      piece.attachment_time = tree.node(u.orig[i]).time;
      RootedShapeNode root_node;
      piece.shape.nodes.push_back(root_node);
      piece.shape.root = 0;
      const int copied = copy_span_subtree(tree, u, child, piece.shape);
      piece.shape.nodes[0].children.push_back(copied);
      piece.shape.nodes[0].edge_length.push_back(
          tree.node(u.orig[i]).time -
          tree.node(u.orig[static_cast<std::size_t>(child)]).time);
      result.attached.push_back(std::move(piece));
    }
  }

  // The single piece reaching above the focal MRCA, if any.
  if (focal_root_span_id != -1 && u.up[static_cast<std::size_t>(focal_root_span_id)] != -1) {
    AttachedSubtree piece;
    piece.attachment_node = focal_root;
    piece.attachment_time = tree.node(focal_root).time;
    piece.shape.root = 0;
    piece.shape.nodes.push_back(RootedShapeNode{});
    int cursor = 0;
    int at = focal_root_span_id;
    while (u.up[static_cast<std::size_t>(at)] != -1) {
      const int up = u.up[static_cast<std::size_t>(at)];
      const double rise = tree.node(u.orig[static_cast<std::size_t>(up)]).time -
                          tree.node(u.orig[static_cast<std::size_t>(at)]).time;
      const int up_shape = static_cast<int>(piece.shape.nodes.size());
      piece.shape.nodes.push_back(RootedShapeNode{});
      piece.shape.nodes[static_cast<std::size_t>(cursor)].children.push_back(up_shape);
      piece.shape.nodes[static_cast<std::size_t>(cursor)].edge_length.push_back(rise);
      for (int child : u.kids[static_cast<std::size_t>(up)]) {
        if (child == at) continue;
        const int copied = copy_span_subtree(tree, u, child, piece.shape);
        piece.shape.nodes[static_cast<std::size_t>(up_shape)].children.push_back(copied);
        piece.shape.nodes[static_cast<std::size_t>(up_shape)].edge_length.push_back(
            tree.node(u.orig[static_cast<std::size_t>(up)]).time -
            tree.node(u.orig[static_cast<std::size_t>(child)]).time);
      }
      cursor = up_shape;
      at = up;
    }
    result.attached.push_back(std::move(piece));
  }

  return result;
}

double shared_exclusive_mean(const SubtreeDecomposition& decomposition, double theta,
                             double rho) {
  if (!(rho > 0.0)) {
    throw std::invalid_argument("shared_exclusive_mean: rho must be > 0");
  }
  if (theta < 0.0) {
    throw std::invalid_argument("shared_exclusive_mean: theta must be >= 0");
  }
  double mean = (theta / rho) *
                std::exp(-0.5 * rho * decomposition.spanned.total_length());
  for (const auto& piece : decomposition.attached) {
    mean *= 1.0 - shape_survival_at_root(piece.shape, rho);
  }
  return mean;
}

}  // namespace coalgene
