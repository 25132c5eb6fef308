#include "instances.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace testing_support {

namespace {

void fill_scores(Rng& rng, PotentialTable& pot, double jitter) {
  const auto draw = [&] {
    return static_cast<double>(static_cast<long>(casimir::sample_index(rng, 5)) - 2) +
           jitter * (2.0 * casimir::uniform01(rng) - 1.0);
  };
  for (auto& n : pot.node)
    for (Eigen::Index j = 0; j < n.size(); ++j) n(j) = draw();
  for (auto& e : pot.edge)
    for (Eigen::Index r = 0; r < e.rows(); ++r)
      for (Eigen::Index c = 0; c < e.cols(); ++c) e(r, c) = draw();
}

casimir::LabelDomain random_domain(Rng& rng, std::size_t nodes, std::size_t max_labels) {
  std::vector<std::size_t> sizes(nodes);
  for (auto& s : sizes) s = 1 + casimir::sample_index(rng, max_labels);
  return casimir::LabelDomain(sizes);
}

}  // namespace

PotentialTable random_chain(Rng& rng, std::size_t p, std::size_t max_labels, double jitter) {
  PotentialTable pot = PotentialTable::zeros(casimir::TreeTopology::chain(p), random_domain(rng, p, max_labels));
  fill_scores(rng, pot, jitter);
  return pot;
}

PotentialTable random_tree(Rng& rng, std::size_t nodes, std::size_t max_labels, double jitter) {
  std::vector<std::size_t> perm(nodes);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = nodes; i > 1; --i) std::swap(perm[i - 1], perm[casimir::sample_index(rng, i)]);
  std::vector<long> parents(nodes, -1);
  for (std::size_t v = 1; v < nodes; ++v) parents[perm[v]] = static_cast<long>(perm[casimir::sample_index(rng, v)]);
  PotentialTable pot = PotentialTable::zeros(casimir::TreeTopology::from_parents(parents),
                                             random_domain(rng, nodes, max_labels));
  fill_scores(rng, pot, jitter);
  return pot;
}

PotentialTable random_gaussian_chain(Rng& rng, std::size_t p, std::size_t labels, double scale) {
  PotentialTable pot =
      PotentialTable::zeros(casimir::TreeTopology::chain(p), casimir::LabelDomain::uniform(p, labels));
  for (auto& n : pot.node)
    for (Eigen::Index j = 0; j < n.size(); ++j) n(j) = scale * casimir::standard_normal(rng);
  for (auto& e : pot.edge)
    for (Eigen::Index r = 0; r < e.rows(); ++r)
      for (Eigen::Index c = 0; c < e.cols(); ++c) e(r, c) = scale * casimir::standard_normal(rng);
  return pot;
}

}  // namespace testing_support
