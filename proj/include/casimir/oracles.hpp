#pragma once

#include <cstddef>

#include "casimir/graph_model.hpp"
#include "casimir/oracle_types.hpp"
#include "casimir/oracles_chain.hpp"
#include "casimir/oracles_tree.hpp"
#include "casimir/smoothing.hpp"

namespace casimir {

// Topology-dispatching front ends: chain routines for chains, tree routines
// otherwise.
OracleResult max_oracle(const PotentialTable& pot);
OracleResult topk_oracle(const PotentialTable& pot, double mu, std::size_t k);
OracleResult exp_oracle(const PotentialTable& pot, double mu);

// Full l2 smoothing over every labeling. Reference for the top-K oracle;
// refuses spaces larger than cap.
OracleResult l2_oracle_enumerated(const PotentialTable& pot, double mu,
                                  double cap = kDefaultEnumerationCap);

// The smooth oracle selected by config (entropy, l2 by enumeration, top-K).
OracleResult smoothed_oracle(const PotentialTable& pot, const SmoothingConfig& config);

}  // namespace casimir
