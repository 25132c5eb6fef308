#pragma once

#include <cstddef>

#include "casimir/graph_model.hpp"
#include "casimir/random.hpp"

namespace testing_support {

using casimir::PotentialTable;
using casimir::Rng;

// Chain with p nodes and 1..max_labels labels per node. Scores are small
// integers (plenty of ties) plus uniform jitter of `jitter` magnitude.
PotentialTable random_chain(Rng& rng, std::size_t p, std::size_t max_labels, double jitter = 1e-3);

// Random rooted tree (random attachment, shuffled node ids) with the same
// score distribution.
PotentialTable random_tree(Rng& rng, std::size_t nodes, std::size_t max_labels, double jitter = 1e-3);

// Gaussian scores of the given scale, no jitter.
PotentialTable random_gaussian_chain(Rng& rng, std::size_t p, std::size_t labels, double scale);

}  // namespace testing_support
