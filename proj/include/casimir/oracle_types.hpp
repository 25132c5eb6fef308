#pragma once

#include <vector>

#include <Eigen/Dense>

#include "casimir/graph_model.hpp"

namespace casimir {

struct WeightedLabeling {
  double weight;
  double score;
  Labeling labeling;
};

enum class OracleMode { discrete_support, marginal };

// Value of a (smoothed) max plus the occupancy measure that its gradient is
// built from: either a finite list of weighted labelings or node/edge
// marginals laid out like the PotentialTable they came from.
struct OracleResult {
  OracleMode mode = OracleMode::discrete_support;
  double value = 0.0;
  std::vector<WeightedLabeling> support;
  std::vector<Eigen::VectorXd> node_marginals;
  std::vector<Eigen::MatrixXd> edge_marginals;
};

// Gibbs distribution of psi / mu: log partition function and marginals.
// edge[v] has the shape of the edge table of v (empty at the root).
struct MarginalResult {
  double log_partition = 0.0;
  std::vector<Eigen::VectorXd> node;
  std::vector<Eigen::MatrixXd> edge;
};

OracleResult to_oracle_result(MarginalResult marginals, double mu);

}  // namespace casimir
