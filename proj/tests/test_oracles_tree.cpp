#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "casimir/errors.hpp"
#include "casimir/oracles.hpp"
#include "support/brute.hpp"
#include "support/instances.hpp"

using namespace casimir;
using testing_support::brute_enumerate;
using testing_support::brute_marginals;

namespace {

PotentialTable two_node_as_tree() {
  PotentialTable pot = PotentialTable::zeros(TreeTopology::chain(2), LabelDomain::uniform(2, 2));
  pot.node[0] << 1.0, 0.0;
  pot.node[1] << 0.0, 2.0;
  pot.edge[1] << 0.0, 0.0, 0.0, 0.5;
  return pot;
}

// Root 0 with leaves 1, 2, 3; two labels each.
PotentialTable star() {
  PotentialTable pot = PotentialTable::zeros(TreeTopology::from_parents({-1, 0, 0, 0}), LabelDomain::uniform(4, 2));
  pot.node[0] << 0.5, 0.0;
  pot.node[1] << 0.0, 1.25;
  pot.node[2] << 0.75, 0.0;
  pot.node[3] << -0.5, 0.125;
  pot.edge[1] << 0.0, 1.0, -1.0, 0.0;
  pot.edge[2] << 0.25, 0.0, 0.0, 1.5;
  pot.edge[3] << 0.0, -0.25, 0.375, 0.0;
  return pot;
}

// The same tree with node ids permuted, which reorders every child list.
PotentialTable relabel_nodes(const PotentialTable& pot, const std::vector<std::size_t>& perm) {
  std::vector<long> parents(pot.num_nodes(), -1);
  std::vector<std::size_t> sizes(pot.num_nodes());
  for (std::size_t v = 0; v < pot.num_nodes(); ++v) {
    sizes[perm[v]] = pot.domain.size(v);
    if (const auto& par = pot.topology.parent(v)) parents[perm[v]] = static_cast<long>(perm[*par]);
  }
  PotentialTable out = PotentialTable::zeros(TreeTopology::from_parents(parents), LabelDomain(sizes));
  for (std::size_t v = 0; v < pot.num_nodes(); ++v) {
    out.node[perm[v]] = pot.node[v];
    out.edge[perm[v]] = pot.edge[v];
  }
  return out;
}

Labeling permute(const Labeling& y, const std::vector<std::size_t>& perm) {
  Labeling out(y.size());
  for (std::size_t v = 0; v < y.size(); ++v) out[perm[v]] = y[v];
  return out;
}

}  // namespace

TEST_CASE("max_product_tree examples") {
  const auto [vc, yc] = max_product_tree(two_node_as_tree());
  CHECK(vc == viterbi(two_node_as_tree()).first);
  CHECK(yc == viterbi(two_node_as_tree()).second);
  const auto [vs, ys] = max_product_tree(star());
  const auto all = brute_enumerate(star());
  CHECK(vs == doctest::Approx(all[0].score).epsilon(1e-15));
  CHECK(ys == all[0].labeling);
  PotentialTable zero = star();
  for (auto& n : zero.node) n.setZero();
  for (auto& e : zero.edge) e.setZero();
  const auto [v0, y0] = max_product_tree(zero);
  CHECK(v0 == 0.0);
  CHECK(y0 == Labeling{0, 0, 0, 0});
}

TEST_CASE("topk_max_product_tree examples") {
  const auto chain2 = topk_max_product_tree(two_node_as_tree(), 2);
  const auto ref2 = topk_viterbi(two_node_as_tree(), 2);
  REQUIRE(chain2.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(chain2[i].score == ref2[i].score);
    CHECK(chain2[i].labeling == ref2[i].labeling);
  }
  const auto top3 = topk_max_product_tree(star(), 3);
  const auto all = brute_enumerate(star());
  REQUIRE(top3.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(top3[i].score == doctest::Approx(all[i].score).epsilon(1e-15));
    CHECK(top3[i].labeling == all[i].labeling);
  }
  CHECK(topk_max_product_tree(star(), 40).size() == 16);
}

TEST_CASE("sum_product_tree examples") {
  const MarginalResult s = sum_product_tree(star(), 1.0);
  const auto ref = brute_marginals(star(), 1.0);
  CHECK(testing_support::close_rel(s.log_partition, ref.log_partition, 1e-9));
  for (std::size_t v = 0; v < 4; ++v) CHECK((s.node[v] - ref.node[v]).cwiseAbs().maxCoeff() <= 1e-9);

  const MarginalResult t = sum_product_tree(two_node_as_tree(), 0.7);
  const MarginalResult f = forward_backward(two_node_as_tree(), 0.7);
  CHECK(std::abs(t.log_partition - f.log_partition) <= 1e-12);
  for (std::size_t v = 0; v < 2; ++v) CHECK((t.node[v] - f.node[v]).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((t.edge[1] - f.edge[1]).cwiseAbs().maxCoeff() <= 1e-12);

  PotentialTable zero = star();
  for (auto& n : zero.node) n.setZero();
  for (auto& e : zero.edge) e.setZero();
  CHECK(sum_product_tree(zero, 2.0).log_partition == doctest::Approx(std::log(16.0)).epsilon(1e-14));
}

TEST_CASE("exp_oracle_tree examples") {
  const OracleResult r = exp_oracle_tree(star(), 1.0);
  CHECK(testing_support::close_rel(r.value, brute_marginals(star(), 1.0).log_partition, 1e-12));
  CHECK(exp_oracle_tree(two_node_as_tree(), 0.3).value ==
        doctest::Approx(exp_oracle_chain(two_node_as_tree(), 0.3).value).epsilon(1e-14));
  for (double mu : {0.05, 0.5, 5.0}) {
    const double gap = exp_oracle_tree(star(), mu).value - max_product_tree(star()).first;
    CHECK(gap >= 0.0);
    CHECK(gap <= mu * std::log(16.0) + 1e-12);
  }
}

TEST_CASE("tree oracles reject invalid parent structures") {
  CHECK_THROWS_AS(TreeTopology::from_parents({-1, 2, 1, 0}), InvalidTopology);
  PotentialTable bad = star();
  bad.edge[2].resize(3, 2);
  CHECK_THROWS_AS(max_product_tree(bad), InvalidInput);
}

TEST_CASE("dispatch routes trees and chains") {
  const OracleResult m = max_oracle(star());
  REQUIRE(m.support.size() == 1);
  CHECK(m.support[0].labeling == max_product_tree(star()).second);
  CHECK(topk_oracle(star(), 1.0, 3).support.size() <= 3);
  CHECK(exp_oracle(two_node_as_tree(), 1.0).value == exp_oracle_chain(two_node_as_tree(), 1.0).value);
}

TEST_CASE("property: tree oracles match enumeration on random trees") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t nodes = 1 + sample_index(rng, 7);
    const PotentialTable pot = testing_support::random_tree(rng, nodes, 3);
    const auto all = brute_enumerate(pot);
    const auto [v, y] = max_product_tree(pot);
    CHECK(std::abs(v - all[0].score) <= 1e-9);
    CHECK(y == all[0].labeling);
    const std::size_t k = 1 + sample_index(rng, 10);
    const auto best = topk_max_product_tree(pot, k);
    REQUIRE(best.size() == std::min(k, all.size()));
    for (std::size_t i = 0; i < best.size(); ++i) {
      CHECK(std::abs(best[i].score - all[i].score) <= 1e-9);
      CHECK(best[i].labeling == all[i].labeling);
    }
    const double mu = 0.2 + 2.0 * uniform01(rng);
    const MarginalResult s = sum_product_tree(pot, mu);
    const auto ref = brute_marginals(pot, mu);
    CHECK(testing_support::close_rel(s.log_partition, ref.log_partition, 1e-9));
    for (std::size_t u = 0; u < nodes; ++u) {
      CHECK((s.node[u] - ref.node[u]).cwiseAbs().maxCoeff() <= 1e-9);
      if (pot.topology.parent(u)) CHECK((s.edge[u] - ref.edge[u]).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("property: reordering children leaves outputs unchanged") {
  Rng rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t nodes = 2 + sample_index(rng, 6);
    const PotentialTable pot = testing_support::random_tree(rng, nodes, 3);
    std::vector<std::size_t> perm(nodes);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = nodes; i > 1; --i) std::swap(perm[i - 1], perm[sample_index(rng, i)]);
    const PotentialTable moved = relabel_nodes(pot, perm);
    const auto a = topk_max_product_tree(pot, 5);
    const auto b = topk_max_product_tree(moved, 5);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::abs(a[i].score - b[i].score) <= 1e-12);
      CHECK(permute(a[i].labeling, perm) == b[i].labeling);
    }
    CHECK(std::abs(sum_product_tree(pot, 1.0).log_partition - sum_product_tree(moved, 1.0).log_partition) <= 1e-12);
  }
}
