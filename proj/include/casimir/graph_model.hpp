#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace casimir {

using Label = int;
using Labeling = std::vector<Label>;

// Stand-in for -infinity in score tables. Finite, so that adding a regular
// score never produces NaN. Sums of two sentinels overflow to -inf, which is
// still ordered correctly; test with is_neg_inf() rather than equality.
inline constexpr double kNegInf = std::numeric_limits<double>::lowest();

inline bool is_neg_inf(double x) { return x <= 0.5 * kNegInf; }

inline constexpr double kDefaultEnumerationCap = 1e6;

struct LabelDomain {
  std::vector<std::size_t> sizes;

  LabelDomain() = default;
  explicit LabelDomain(std::vector<std::size_t> s);
  static LabelDomain uniform(std::size_t nodes, std::size_t labels);

  std::size_t num_nodes() const { return sizes.size(); }
  std::size_t size(std::size_t v) const { return sizes[v]; }
  std::size_t max_size() const;
  // |Y| as a double; saturates gracefully for huge spaces.
  double cardinality() const;
  bool contains(const Labeling& y) const;
};

enum class TopologyKind { chain, tree };

// Rooted tree over nodes 0..p-1. For chains node 0 is the root and node v
// has parent v-1, so each edge table is indexed (y_v, y_{v-1}).
class TreeTopology {
 public:
  TreeTopology() = default;

  static TreeTopology chain(std::size_t p);
  // parents[v] < 0 marks the root. Validates connectivity and acyclicity.
  static TreeTopology from_parents(const std::vector<long>& parents);

  std::size_t num_nodes() const { return parent_.size(); }
  std::size_t root() const { return root_; }
  TopologyKind kind() const { return kind_; }
  bool is_chain() const { return kind_ == TopologyKind::chain; }
  const std::optional<std::size_t>& parent(std::size_t v) const { return parent_[v]; }
  const std::vector<std::size_t>& children(std::size_t v) const { return children_[v]; }
  // Non-root nodes in increasing height (leaves first), ties by index.
  const std::vector<std::size_t>& upward_order() const { return upward_order_; }

 private:
  std::vector<std::optional<std::size_t>> parent_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> upward_order_;
  std::size_t root_ = 0;
  TopologyKind kind_ = TopologyKind::chain;

  void finalize();
};

// Node tables psi_v and edge tables psi_{v,parent(v)}, stored by child node
// (edge[v] is |Y_v| x |Y_parent(v)|; the root's entry is empty).
struct PotentialTable {
  TreeTopology topology;
  LabelDomain domain;
  std::vector<Eigen::VectorXd> node;
  std::vector<Eigen::MatrixXd> edge;

  static PotentialTable zeros(TreeTopology topology, LabelDomain domain);
  std::size_t num_nodes() const { return domain.num_nodes(); }
  // Throws InvalidInput if shapes disagree with the domain/topology.
  void validate() const;
};

struct ScoredLabeling {
  double score;
  Labeling labeling;
};

double score(const PotentialTable& pot, const Labeling& y);

// Every labeling with its score, sorted by score descending then labeling
// ascending. Refuses with CapExceeded when |Y| > cap.
std::vector<ScoredLabeling> enumerate_scored(const PotentialTable& pot,
                                             double cap = kDefaultEnumerationCap);

// Calls fn(labeling) for every labeling in lexicographic order.
template <typename Fn>
void for_each_labeling(const LabelDomain& domain, Fn&& fn) {
  const std::size_t p = domain.num_nodes();
  Labeling y(p, 0);
  while (true) {
    fn(static_cast<const Labeling&>(y));
    std::size_t v = p;
    while (v > 0) {
      --v;
      if (static_cast<std::size_t>(++y[v]) < domain.size(v)) break;
      y[v] = 0;
      if (v == 0) return;
    }
    if (p == 0) return;
  }
}

struct Constraint {
  enum class Type { require, forbid };
  std::size_t node;
  Label label;
  Type type;

  static Constraint require(std::size_t v, Label j) { return {v, j, Type::require}; }
  static Constraint forbid(std::size_t v, Label j) { return {v, j, Type::forbid}; }
  bool admits(const Labeling& y) const {
    return type == Type::require ? y[node] == label : y[node] != label;
  }
};

// Copy of pot with node entries violating a constraint set to kNegInf.
// Throws EmptySpace if a node is left with no admissible label.
PotentialTable constrain(const PotentialTable& pot, const std::vector<Constraint>& constraints);

// Adds deterministic uniform noise in [-magnitude, magnitude] to every entry.
// Used to make scores unambiguous for max-marginal decoding and tests.
PotentialTable jitter(const PotentialTable& pot, std::uint64_t seed, double magnitude = 1e-6);

}  // namespace casimir
