#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "casimir/graph_model.hpp"

namespace casimir {

// table[v](j): best score among labelings meeting the constraints with
// y_v = j (kNegInf when there is none). best is the constrained maximum.
struct MaxMarginals {
  std::vector<Eigen::VectorXd> table;
  double best = kNegInf;
};

using MaxMarginalProvider = std::function<MaxMarginals(const std::vector<Constraint>&)>;

// Reference provider: max-marginals by enumerating the constrained space.
// Throws EmptySpace if no labeling meets the constraints.
MaxMarginals exhaustive_max_marginals(const PotentialTable& pot,
                                      const std::vector<Constraint>& constraints,
                                      double cap = kDefaultEnumerationCap);

MaxMarginalProvider exhaustive_provider(const PotentialTable& pot,
                                        double cap = kDefaultEnumerationCap);

struct DecodedLabeling {
  Labeling labeling;
  // Some node has two labels within 1e-12 of its maximum.
  bool ambiguous = false;
};

DecodedLabeling decode_from_max_marginals(const MaxMarginals& mm);

struct BmmfResult {
  std::vector<ScoredLabeling> best;
  std::size_t provider_calls = 0;
};

// Best-max-marginal-first k-best decoding. Requires distinct scores; stops
// early once the space is exhausted. Throws IntegrityError when the provider
// yields scores that are not non-increasing.
BmmfResult bmmf_topk(const MaxMarginalProvider& provider, std::size_t k);

// Subset of Y given by an allowed-label list per node.
struct LabelBox {
  std::vector<std::vector<Label>> allowed;

  static LabelBox full(const LabelDomain& domain);
  bool is_singleton() const;
  Labeling singleton() const;
  double size() const;
};

using ScoreFunction = std::function<double(const Labeling&)>;
using BoundFunction = std::function<double(const LabelBox&)>;
using SplitFunction = std::function<std::pair<LabelBox, LabelBox>(const LabelBox&)>;

struct BranchBoundResult {
  std::vector<ScoredLabeling> best;
  std::size_t pops = 0;
};

// Best-first branch and bound: pops subsets by bound (ties first-in first-out)
// until K singletons have been popped or the queue is empty. Throws
// IntegrityError when a popped singleton outscores its parent's bound.
BranchBoundResult branch_bound_topk(const LabelBox& space, const ScoreFunction& score_fn,
                                    const BoundFunction& bound, const SplitFunction& split,
                                    std::size_t k);

// Sum over nodes and edges of the best entry allowed by the box; equals
// score() on singletons.
BoundFunction independent_bound(const PotentialTable& pot);
// Exact maximum over the box by enumeration.
BoundFunction enumeration_bound(const PotentialTable& pot);

// First node with more than one allowed label, halved.
std::pair<LabelBox, LabelBox> split_first_halves(const LabelBox& box);
// Node with the most allowed labels: its first label versus the rest.
std::pair<LabelBox, LabelBox> split_widest_first(const LabelBox& box);

}  // namespace casimir
