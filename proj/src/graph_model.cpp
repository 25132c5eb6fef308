#include "casimir/graph_model.hpp"

#include <algorithm>
#include <string>

#include "casimir/errors.hpp"
#include "casimir/random.hpp"

namespace casimir {

LabelDomain::LabelDomain(std::vector<std::size_t> s) : sizes(std::move(s)) {
  if (sizes.empty()) throw InvalidInput("label domain needs at least one node");
  for (std::size_t v = 0; v < sizes.size(); ++v)
    if (sizes[v] == 0) throw InvalidInput("node " + std::to_string(v) + " has no labels");
}

LabelDomain LabelDomain::uniform(std::size_t nodes, std::size_t labels) {
  return LabelDomain(std::vector<std::size_t>(nodes, labels));
}

std::size_t LabelDomain::max_size() const {
  return sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
}

double LabelDomain::cardinality() const {
  double c = 1.0;
  for (std::size_t s : sizes) c *= static_cast<double>(s);
  return c;
}

bool LabelDomain::contains(const Labeling& y) const {
  if (y.size() != sizes.size()) return false;
  for (std::size_t v = 0; v < y.size(); ++v)
    if (y[v] < 0 || static_cast<std::size_t>(y[v]) >= sizes[v]) return false;
  return true;
}

TreeTopology TreeTopology::chain(std::size_t p) {
  if (p == 0) throw InvalidTopology("chain needs at least one node");
  TreeTopology t;
  t.parent_.resize(p);
  for (std::size_t v = 1; v < p; ++v) t.parent_[v] = v - 1;
  t.root_ = 0;
  t.finalize();
  return t;
}

TreeTopology TreeTopology::from_parents(const std::vector<long>& parents) {
  const std::size_t p = parents.size();
  if (p == 0) throw InvalidTopology("tree needs at least one node");
  TreeTopology t;
  t.parent_.resize(p);
  std::size_t roots = 0;
  for (std::size_t v = 0; v < p; ++v) {
    if (parents[v] < 0) {
      ++roots;
      t.root_ = v;
    } else {
      if (static_cast<std::size_t>(parents[v]) >= p || static_cast<std::size_t>(parents[v]) == v)
        throw InvalidTopology("node " + std::to_string(v) + " has an invalid parent");
      t.parent_[v] = static_cast<std::size_t>(parents[v]);
    }
  }
  if (roots != 1) throw InvalidTopology("expected exactly one root, found " + std::to_string(roots));
  // Every node must reach the root without revisiting a node.
  for (std::size_t v = 0; v < p; ++v) {
    std::size_t u = v, steps = 0;
    while (t.parent_[u]) {
      u = *t.parent_[u];
      if (++steps > p) throw InvalidTopology("parent links contain a cycle");
    }
  }
  t.finalize();
  return t;
}

void TreeTopology::finalize() {
  const std::size_t p = parent_.size();
  children_.assign(p, {});
  for (std::size_t v = 0; v < p; ++v)
    if (parent_[v]) children_[*parent_[v]].push_back(v);

  std::vector<std::size_t> height(p, 0);
  // Height of u is the longest path down to a leaf; walk each root path.
  for (std::size_t v = 0; v < p; ++v) {
    std::size_t h = 0, u = v;
    while (parent_[u]) {
      ++h;
      u = *parent_[u];
      height[u] = std::max(height[u], h);
    }
  }
  upward_order_.clear();
  for (std::size_t v = 0; v < p; ++v)
    if (v != root_) upward_order_.push_back(v);
  std::stable_sort(upward_order_.begin(), upward_order_.end(),
                   [&](std::size_t a, std::size_t b) { return height[a] < height[b]; });

  bool chain = (root_ == 0);
  for (std::size_t v = 1; v < p && chain; ++v) chain = parent_[v] && *parent_[v] == v - 1;
  kind_ = chain ? TopologyKind::chain : TopologyKind::tree;
}

PotentialTable PotentialTable::zeros(TreeTopology topology, LabelDomain domain) {
  if (topology.num_nodes() != domain.num_nodes())
    throw InvalidInput("topology and domain disagree on the number of nodes");
  PotentialTable pot;
  const std::size_t p = domain.num_nodes();
  pot.node.resize(p);
  pot.edge.resize(p);
  for (std::size_t v = 0; v < p; ++v) {
    pot.node[v] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(domain.size(v)));
    if (const auto& par = topology.parent(v))
      pot.edge[v] = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(domain.size(v)),
                                          static_cast<Eigen::Index>(domain.size(*par)));
  }
  pot.topology = std::move(topology);
  pot.domain = std::move(domain);
  return pot;
}

void PotentialTable::validate() const {
  const std::size_t p = domain.num_nodes();
  if (topology.num_nodes() != p || node.size() != p || edge.size() != p)
    throw InvalidInput("potential table has inconsistent node count");
  for (std::size_t v = 0; v < p; ++v) {
    if (static_cast<std::size_t>(node[v].size()) != domain.size(v))
      throw InvalidInput("node table " + std::to_string(v) + " has the wrong length");
    if (const auto& par = topology.parent(v)) {
      if (static_cast<std::size_t>(edge[v].rows()) != domain.size(v) ||
          static_cast<std::size_t>(edge[v].cols()) != domain.size(*par))
        throw InvalidInput("edge table " + std::to_string(v) + " has the wrong shape");
    }
  }
}

double score(const PotentialTable& pot, const Labeling& y) {
  if (!pot.domain.contains(y)) throw InvalidInput("labeling does not match the label domain");
  double s = 0.0;
  for (std::size_t v = 0; v < y.size(); ++v) {
    s += pot.node[v](y[v]);
    if (const auto& par = pot.topology.parent(v)) s += pot.edge[v](y[v], y[*par]);
  }
  return s;
}

std::vector<ScoredLabeling> enumerate_scored(const PotentialTable& pot, double cap) {
  const double size = pot.domain.cardinality();
  if (size > cap) throw CapExceeded(size, cap);
  std::vector<ScoredLabeling> out;
  out.reserve(static_cast<std::size_t>(size));
  for_each_labeling(pot.domain, [&](const Labeling& y) { out.push_back({score(pot, y), y}); });
  // Enumeration order is lexicographic, so a stable sort realizes the tie rule.
  std::stable_sort(out.begin(), out.end(),
                   [](const ScoredLabeling& a, const ScoredLabeling& b) { return a.score > b.score; });
  return out;
}

PotentialTable constrain(const PotentialTable& pot, const std::vector<Constraint>& constraints) {
  PotentialTable out = pot;
  for (const auto& c : constraints) {
    if (c.node >= out.num_nodes() || c.label < 0 ||
        static_cast<std::size_t>(c.label) >= out.domain.size(c.node))
      throw InvalidInput("constraint refers to a node or label outside the domain");
    auto& table = out.node[c.node];
    if (c.type == Constraint::Type::forbid) {
      table(c.label) = kNegInf;
    } else {
      for (Eigen::Index j = 0; j < table.size(); ++j)
        if (j != c.label) table(j) = kNegInf;
    }
  }
  for (std::size_t v = 0; v < out.num_nodes(); ++v) {
    bool any = false;
    for (Eigen::Index j = 0; j < out.node[v].size(); ++j) any = any || !is_neg_inf(out.node[v](j));
    if (!any) throw EmptySpace("constraints exclude every label of node " + std::to_string(v));
  }
  return out;
}

PotentialTable jitter(const PotentialTable& pot, std::uint64_t seed, double magnitude) {
  PotentialTable out = pot;
  Rng rng(seed);
  auto noise = [&] { return magnitude * (2.0 * uniform01(rng) - 1.0); };
  for (std::size_t v = 0; v < out.num_nodes(); ++v) {
    for (Eigen::Index j = 0; j < out.node[v].size(); ++j)
      if (!is_neg_inf(out.node[v](j))) out.node[v](j) += noise();
    for (Eigen::Index r = 0; r < out.edge[v].rows(); ++r)
      for (Eigen::Index c = 0; c < out.edge[v].cols(); ++c) out.edge[v](r, c) += noise();
  }
  return out;
}

}  // namespace casimir
