#include "casimir/oracles_tree.hpp"

#include <cmath>

#include "casimir/errors.hpp"
#include "casimir/oracles_chain.hpp"
#include "kbest.hpp"

namespace casimir {

namespace {

using detail::MergeEntry;

// Nodes in upward order followed by the root.
std::vector<std::size_t> schedule_with_root(const TreeTopology& t) {
  std::vector<std::size_t> order = t.upward_order();
  order.push_back(t.root());
  return order;
}

}  // namespace

std::pair<double, Labeling> max_product_tree(const PotentialTable& pot) {
  pot.validate();
  const TreeTopology& t = pot.topology;
  const std::size_t p = pot.num_nodes();
  std::vector<Eigen::VectorXd> inside(p), msg(p);
  std::vector<std::vector<int>> arg(p);  // arg[v][i]: best y_v given parent label i

  for (std::size_t v : schedule_with_root(t)) {
    inside[v] = pot.node[v];
    for (std::size_t c : t.children(v)) inside[v] += msg[c];
    if (!t.parent(v)) continue;
    const auto& e = pot.edge[v];
    msg[v].resize(e.cols());
    arg[v].assign(static_cast<std::size_t>(e.cols()), 0);
    for (Eigen::Index i = 0; i < e.cols(); ++i) {
      double best = inside[v](0) + e(0, i);
      int a = 0;
      for (Eigen::Index j = 1; j < e.rows(); ++j) {
        const double c = inside[v](j) + e(j, i);
        if (c > best) {
          best = c;
          a = static_cast<int>(j);
        }
      }
      msg[v](i) = best;
      arg[v][static_cast<std::size_t>(i)] = a;
    }
  }
  Labeling y(p);
  Eigen::Index r;
  inside[t.root()].maxCoeff(&r);
  y[t.root()] = static_cast<Label>(r);
  const auto& up = t.upward_order();
  for (auto it = up.rbegin(); it != up.rend(); ++it)
    y[*it] = arg[*it][static_cast<std::size_t>(y[*t.parent(*it)])];
  return {score(pot, y), y};
}

std::vector<ScoredLabeling> topk_max_product_tree(const PotentialTable& pot, std::size_t k) {
  pot.validate();
  if (k < 1) throw InvalidInput("K must be at least 1");
  const TreeTopology& t = pot.topology;
  const std::size_t p = pot.num_nodes();

  // stages[v][j][s]: K best partial sums for the subtree of v with y_v = j
  // after folding in the first s children. In stage s > 0 an entry's source
  // indexes stage s-1 and its slot indexes the message of child s-1.
  std::vector<std::vector<std::vector<std::vector<MergeEntry>>>> stages(p);
  // msgs[c][i]: K best subtree sums of c plus edge term, given parent label i;
  // source is y_c and slot indexes the final stage of (c, y_c).
  std::vector<std::vector<std::vector<MergeEntry>>> msgs(p);

  for (std::size_t v : schedule_with_root(t)) {
    const auto& kids = t.children(v);
    stages[v].resize(pot.domain.size(v));
    for (std::size_t j = 0; j < pot.domain.size(v); ++j) {
      auto& st = stages[v][j];
      st.reserve(kids.size() + 1);
      st.push_back({{pot.node[v](static_cast<Eigen::Index>(j)), -1, -1}});
      for (std::size_t c : kids) {
        std::vector<double> a, b;
        for (const auto& e : st.back()) a.push_back(e.value);
        for (const auto& m : msgs[c][j]) b.push_back(m.value);
        st.push_back(detail::kbest_pair_sums(a, b, k));
      }
    }
    if (!t.parent(v)) continue;
    const auto& e = pot.edge[v];
    std::vector<std::size_t> lengths(pot.domain.size(v));
    for (std::size_t j = 0; j < lengths.size(); ++j) lengths[j] = stages[v][j].back().size();
    msgs[v].resize(static_cast<std::size_t>(e.cols()));
    for (Eigen::Index i = 0; i < e.cols(); ++i)
      msgs[v][static_cast<std::size_t>(i)] = detail::kway_merge(
          lengths.size(), lengths,
          [&](std::size_t j, std::size_t s) {
            return stages[v][j].back()[s].value + e(static_cast<Eigen::Index>(j), i);
          },
          k);
  }

  const std::size_t root = t.root();
  std::vector<std::size_t> lengths(pot.domain.size(root));
  for (std::size_t j = 0; j < lengths.size(); ++j) lengths[j] = stages[root][j].back().size();
  const auto top = detail::kway_merge(
      lengths.size(), lengths,
      [&](std::size_t j, std::size_t s) { return stages[root][j].back()[s].value; }, k);

  struct Frame {
    std::size_t node;
    int label;
    int slot;
  };
  std::vector<ScoredLabeling> out;
  out.reserve(top.size());
  for (const auto& head : top) {
    Labeling y(p, 0);
    std::vector<Frame> stack{{root, head.source, head.slot}};
    while (!stack.empty()) {
      const Frame f = stack.back();
      stack.pop_back();
      y[f.node] = f.label;
      const auto& st = stages[f.node][static_cast<std::size_t>(f.label)];
      int slot = f.slot;
      for (std::size_t s = st.size() - 1; s > 0; --s) {
        const MergeEntry& e = st[s][static_cast<std::size_t>(slot)];
        const std::size_t c = t.children(f.node)[s - 1];
        const MergeEntry& m = msgs[c][static_cast<std::size_t>(f.label)][static_cast<std::size_t>(e.slot)];
        stack.push_back({c, m.source, m.slot});
        slot = e.source;
      }
    }
    out.push_back({score(pot, y), std::move(y)});
  }
  return out;
}

MarginalResult sum_product_tree(const PotentialTable& pot, double mu) {
  pot.validate();
  if (!(mu > 0.0)) throw InvalidInput("mu must be positive");
  const TreeTopology& t = pot.topology;
  const std::size_t p = pot.num_nodes();
  const double inv = 1.0 / mu;

  // inside[v] = psi_v / mu + sum of child messages; up[v] is v's message to
  // its parent, indexed by the parent's label.
  std::vector<Eigen::VectorXd> inside(p), up(p);
  const auto order = schedule_with_root(t);
  for (std::size_t v : order) {
    inside[v] = pot.node[v] * inv;
    for (std::size_t c : t.children(v)) inside[v] += up[c];
    if (!t.parent(v)) continue;
    const auto& e = pot.edge[v];
    up[v].resize(e.cols());
    Eigen::VectorXd tmp(e.rows());
    for (Eigen::Index i = 0; i < e.cols(); ++i) {
      for (Eigen::Index j = 0; j < e.rows(); ++j) tmp(j) = inside[v](j) + e(j, i) * inv;
      up[v](i) = detail::log_sum_exp(tmp);
    }
  }

  // outside[v]: log-mass of everything outside v's subtree given y_v.
  // toward[c]: outside message of parent(c) excluding c, indexed by parent label.
  std::vector<Eigen::VectorXd> outside(p), toward(p);
  outside[t.root()] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pot.domain.size(t.root())));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t v = *it;
    const auto& kids = t.children(v);
    if (kids.empty()) continue;
    const Eigen::VectorXd base = pot.node[v] * inv + outside[v];
    // Prefix/suffix sums of child messages avoid subtracting -inf entries.
    std::vector<Eigen::VectorXd> prefix(kids.size() + 1, Eigen::VectorXd::Zero(base.size()));
    std::vector<Eigen::VectorXd> suffix(kids.size() + 1, Eigen::VectorXd::Zero(base.size()));
    for (std::size_t a = 0; a < kids.size(); ++a) prefix[a + 1] = prefix[a] + up[kids[a]];
    for (std::size_t a = kids.size(); a-- > 0;) suffix[a] = suffix[a + 1] + up[kids[a]];
    for (std::size_t a = 0; a < kids.size(); ++a) {
      const std::size_t c = kids[a];
      toward[c] = base + prefix[a] + suffix[a + 1];
      const auto& e = pot.edge[c];
      outside[c].resize(e.rows());
      Eigen::VectorXd tmp(e.cols());
      for (Eigen::Index j = 0; j < e.rows(); ++j) {
        for (Eigen::Index i = 0; i < e.cols(); ++i) tmp(i) = toward[c](i) + e(j, i) * inv;
        outside[c](j) = detail::log_sum_exp(tmp);
      }
    }
  }

  MarginalResult r;
  r.log_partition = detail::log_sum_exp(inside[t.root()]);
  const double logz = r.log_partition;
  r.node.resize(p);
  r.edge.resize(p);
  for (std::size_t v = 0; v < p; ++v) {
    r.node[v] = (inside[v] + outside[v]).unaryExpr([logz](double x) { return std::exp(x - logz); });
    if (!t.parent(v)) continue;
    const auto& e = pot.edge[v];
    r.edge[v].resize(e.rows(), e.cols());
    for (Eigen::Index j = 0; j < e.rows(); ++j)
      for (Eigen::Index i = 0; i < e.cols(); ++i)
        r.edge[v](j, i) = std::exp(inside[v](j) + e(j, i) * inv + toward[v](i) - logz);
  }
  return r;
}

OracleResult max_oracle_tree(const PotentialTable& pot) {
  auto [value, y] = max_product_tree(pot);
  OracleResult r;
  r.mode = OracleMode::discrete_support;
  r.value = value;
  r.support.push_back({1.0, value, std::move(y)});
  return r;
}

OracleResult exp_oracle_tree(const PotentialTable& pot, double mu) {
  return to_oracle_result(sum_product_tree(pot, mu), mu);
}

OracleResult topk_oracle_tree(const PotentialTable& pot, double mu, std::size_t k) {
  return topk_oracle_from_list(topk_max_product_tree(pot, k), mu);
}

}  // namespace casimir
