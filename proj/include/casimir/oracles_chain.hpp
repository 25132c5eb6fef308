#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "casimir/graph_model.hpp"
#include "casimir/oracle_types.hpp"

namespace casimir {

// Chain oracles. All require pot.topology.is_chain(), else InvalidTopology.
// Messages run from the last node toward node 0, so ties resolve to the
// lexicographically smallest labeling, matching enumerate_scored.

std::pair<double, Labeling> viterbi(const PotentialTable& pot);

// The min(K, |Y|) best labelings, best first. Scores are recomputed with
// score() so they agree bitwise with enumeration.
std::vector<ScoredLabeling> topk_viterbi(const PotentialTable& pot, std::size_t k);

// Log-space forward-backward for the Gibbs distribution of psi / mu.
MarginalResult forward_backward(const PotentialTable& pot, double mu);

OracleResult max_oracle_chain(const PotentialTable& pot);
OracleResult exp_oracle_chain(const PotentialTable& pot, double mu);
OracleResult topk_oracle_chain(const PotentialTable& pot, double mu, std::size_t k);

// Shared by the chain and tree top-K oracles: applies the top-K surrogate to
// a k-best list (re-sorted by score) and attaches projection weights.
OracleResult topk_oracle_from_list(std::vector<ScoredLabeling> best, double mu);

}  // namespace casimir
