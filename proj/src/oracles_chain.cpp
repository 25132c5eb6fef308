#include "casimir/oracles_chain.hpp"

#include <algorithm>
#include <cmath>

#include "casimir/errors.hpp"
#include "casimir/smoothing.hpp"
#include "kbest.hpp"

namespace casimir {

namespace {

void require_chain(const PotentialTable& pot) {
  pot.validate();
  if (!pot.topology.is_chain()) throw InvalidTopology("chain oracle called on a non-chain topology");
}

using detail::MergeEntry;

}  // namespace

std::pair<double, Labeling> viterbi(const PotentialTable& pot) {
  require_chain(pot);
  const std::size_t p = pot.num_nodes();
  // value[v](j): best score of nodes v..p-1 given y_v = j.
  std::vector<Eigen::VectorXd> value(p);
  std::vector<std::vector<int>> next(p);
  value[p - 1] = pot.node[p - 1];
  for (std::size_t v = p - 1; v-- > 0;) {
    const auto& e = pot.edge[v + 1];  // (y_{v+1}, y_v)
    const auto nj = static_cast<Eigen::Index>(pot.domain.size(v));
    value[v].resize(nj);
    next[v].assign(static_cast<std::size_t>(nj), 0);
    for (Eigen::Index j = 0; j < nj; ++j) {
      double best = value[v + 1](0) + e(0, j);
      int arg = 0;
      for (Eigen::Index i = 1; i < e.rows(); ++i) {
        const double c = value[v + 1](i) + e(i, j);
        if (c > best) {
          best = c;
          arg = static_cast<int>(i);
        }
      }
      value[v](j) = best + pot.node[v](j);
      next[v][static_cast<std::size_t>(j)] = arg;
    }
  }
  Labeling y(p);
  Eigen::Index j0;
  value[0].maxCoeff(&j0);  // first maximal index
  y[0] = static_cast<Label>(j0);
  for (std::size_t v = 0; v + 1 < p; ++v) y[v + 1] = next[v][static_cast<std::size_t>(y[v])];
  return {score(pot, y), y};
}

std::vector<ScoredLabeling> topk_viterbi(const PotentialTable& pot, std::size_t k) {
  require_chain(pot);
  if (k < 1) throw InvalidInput("K must be at least 1");
  const std::size_t p = pot.num_nodes();
  // lists[v][j]: best suffixes v..p-1 with y_v = j; source/slot point into
  // lists[v+1].
  std::vector<std::vector<std::vector<MergeEntry>>> lists(p);
  lists[p - 1].resize(pot.domain.size(p - 1));
  for (std::size_t j = 0; j < pot.domain.size(p - 1); ++j)
    lists[p - 1][j] = {{pot.node[p - 1](static_cast<Eigen::Index>(j)), -1, -1}};

  for (std::size_t v = p - 1; v-- > 0;) {
    const auto& e = pot.edge[v + 1];
    const auto& succ = lists[v + 1];
    std::vector<std::size_t> lengths(succ.size());
    for (std::size_t i = 0; i < succ.size(); ++i) lengths[i] = succ[i].size();
    lists[v].resize(pot.domain.size(v));
    for (std::size_t j = 0; j < pot.domain.size(v); ++j) {
      const auto col = static_cast<Eigen::Index>(j);
      auto merged = detail::kway_merge(
          succ.size(), lengths,
          [&](std::size_t i, std::size_t s) { return succ[i][s].value + e(static_cast<Eigen::Index>(i), col); },
          k);
      for (auto& m : merged) m.value += pot.node[v](col);
      lists[v][j] = std::move(merged);
    }
  }

  std::vector<std::size_t> lengths(lists[0].size());
  for (std::size_t j = 0; j < lengths.size(); ++j) lengths[j] = lists[0][j].size();
  const auto top = detail::kway_merge(
      lengths.size(), lengths, [&](std::size_t j, std::size_t s) { return lists[0][j][s].value; }, k);

  std::vector<ScoredLabeling> out;
  out.reserve(top.size());
  for (const auto& t : top) {
    Labeling y(p);
    int label = t.source, slot = t.slot;
    for (std::size_t v = 0; v < p; ++v) {
      y[v] = label;
      const MergeEntry& m = lists[v][static_cast<std::size_t>(label)][static_cast<std::size_t>(slot)];
      label = m.source;
      slot = m.slot;
    }
    out.push_back({score(pot, y), std::move(y)});
  }
  return out;
}

MarginalResult forward_backward(const PotentialTable& pot, double mu) {
  require_chain(pot);
  if (!(mu > 0.0)) throw InvalidInput("mu must be positive");
  const std::size_t p = pot.num_nodes();
  const double inv = 1.0 / mu;
  std::vector<Eigen::VectorXd> alpha(p), beta(p);

  alpha[0] = pot.node[0] * inv;
  for (std::size_t v = 1; v < p; ++v) {
    const auto& e = pot.edge[v];  // (y_v, y_{v-1})
    alpha[v].resize(e.rows());
    Eigen::VectorXd tmp(e.cols());
    for (Eigen::Index j = 0; j < e.rows(); ++j) {
      for (Eigen::Index i = 0; i < e.cols(); ++i) tmp(i) = alpha[v - 1](i) + e(j, i) * inv;
      alpha[v](j) = pot.node[v](j) * inv + detail::log_sum_exp(tmp);
    }
  }
  beta[p - 1] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pot.domain.size(p - 1)));
  for (std::size_t v = p - 1; v > 0; --v) {
    const auto& e = pot.edge[v];
    beta[v - 1].resize(e.cols());
    Eigen::VectorXd tmp(e.rows());
    for (Eigen::Index i = 0; i < e.cols(); ++i) {
      for (Eigen::Index j = 0; j < e.rows(); ++j) tmp(j) = e(j, i) * inv + pot.node[v](j) * inv + beta[v](j);
      beta[v - 1](i) = detail::log_sum_exp(tmp);
    }
  }

  MarginalResult r;
  r.log_partition = detail::log_sum_exp(alpha[p - 1]);
  const double logz = r.log_partition;
  r.node.resize(p);
  r.edge.resize(p);
  for (std::size_t v = 0; v < p; ++v) {
    r.node[v] = (alpha[v] + beta[v]).unaryExpr([logz](double x) { return std::exp(x - logz); });
    if (v == 0) continue;
    const auto& e = pot.edge[v];
    r.edge[v].resize(e.rows(), e.cols());
    for (Eigen::Index j = 0; j < e.rows(); ++j)
      for (Eigen::Index i = 0; i < e.cols(); ++i)
        r.edge[v](j, i) =
            std::exp(alpha[v - 1](i) + e(j, i) * inv + pot.node[v](j) * inv + beta[v](j) - logz);
  }
  return r;
}

OracleResult to_oracle_result(MarginalResult m, double mu) {
  OracleResult r;
  r.mode = OracleMode::marginal;
  r.value = mu * m.log_partition;
  r.node_marginals = std::move(m.node);
  r.edge_marginals = std::move(m.edge);
  return r;
}

OracleResult max_oracle_chain(const PotentialTable& pot) {
  auto [value, y] = viterbi(pot);
  OracleResult r;
  r.mode = OracleMode::discrete_support;
  r.value = value;
  r.support.push_back({1.0, value, std::move(y)});
  return r;
}

OracleResult exp_oracle_chain(const PotentialTable& pot, double mu) {
  return to_oracle_result(forward_backward(pot, mu), mu);
}

OracleResult topk_oracle_from_list(std::vector<ScoredLabeling> best, double mu) {
  // Recomputed scores may reorder entries that the DP ranked by rounded sums.
  std::stable_sort(best.begin(), best.end(),
                   [](const ScoredLabeling& a, const ScoredLabeling& b) { return a.score > b.score; });
  Eigen::VectorXd z(static_cast<Eigen::Index>(best.size()));
  for (std::size_t i = 0; i < best.size(); ++i) z(static_cast<Eigen::Index>(i)) = best[i].score;
  const SmoothedMaxResult sm = topk_surrogate(z, mu);
  OracleResult r;
  r.mode = OracleMode::discrete_support;
  r.value = sm.value;
  r.support.reserve(best.size());
  for (std::size_t i = 0; i < best.size(); ++i)
    r.support.push_back({sm.weights(static_cast<Eigen::Index>(i)), best[i].score, std::move(best[i].labeling)});
  return r;
}

OracleResult topk_oracle_chain(const PotentialTable& pot, double mu, std::size_t k) {
  return topk_oracle_from_list(topk_viterbi(pot, k), mu);
}

}  // namespace casimir
