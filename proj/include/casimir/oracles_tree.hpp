#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "casimir/graph_model.hpp"
#include "casimir/oracle_types.hpp"

namespace casimir {

// Rooted-tree oracles. Messages flow leaves to root in increasing height and
// are read back root to leaves; any valid tree (including chains) is accepted.

std::pair<double, Labeling> max_product_tree(const PotentialTable& pot);

// The min(K, |Y|) best labelings. Children of a node are folded in one at a
// time in child-index order, keeping the K best partial combinations.
std::vector<ScoredLabeling> topk_max_product_tree(const PotentialTable& pot, std::size_t k);

MarginalResult sum_product_tree(const PotentialTable& pot, double mu);

OracleResult max_oracle_tree(const PotentialTable& pot);
OracleResult exp_oracle_tree(const PotentialTable& pot, double mu);
OracleResult topk_oracle_tree(const PotentialTable& pot, double mu, std::size_t k);

}  // namespace casimir
