#include "casimir/oracles.hpp"

namespace casimir {

OracleResult max_oracle(const PotentialTable& pot) {
  return pot.topology.is_chain() ? max_oracle_chain(pot) : max_oracle_tree(pot);
}

OracleResult topk_oracle(const PotentialTable& pot, double mu, std::size_t k) {
  return pot.topology.is_chain() ? topk_oracle_chain(pot, mu, k) : topk_oracle_tree(pot, mu, k);
}

OracleResult exp_oracle(const PotentialTable& pot, double mu) {
  return pot.topology.is_chain() ? exp_oracle_chain(pot, mu) : exp_oracle_tree(pot, mu);
}

OracleResult l2_oracle_enumerated(const PotentialTable& pot, double mu, double cap) {
  auto all = enumerate_scored(pot, cap);
  Eigen::VectorXd z(static_cast<Eigen::Index>(all.size()));
  for (std::size_t i = 0; i < all.size(); ++i) z(static_cast<Eigen::Index>(i)) = all[i].score;
  const SmoothedMaxResult sm = l2_smoothed_max(z, mu);
  OracleResult r;
  r.mode = OracleMode::discrete_support;
  r.value = sm.value;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const double w = sm.weights(static_cast<Eigen::Index>(i));
    if (w > 0.0) r.support.push_back({w, all[i].score, std::move(all[i].labeling)});
  }
  return r;
}

OracleResult smoothed_oracle(const PotentialTable& pot, const SmoothingConfig& config) {
  config.validate();
  switch (config.kind) {
    case SmootherKind::entropy: return exp_oracle(pot, config.mu);
    case SmootherKind::l2: return l2_oracle_enumerated(pot, config.mu);
    case SmootherKind::topk_l2: break;
  }
  return topk_oracle(pot, config.mu, config.k);
}

}  // namespace casimir
