#include <doctest.h>

#include "casimir/errors.hpp"
#include "casimir/graph_model.hpp"
#include "support/brute.hpp"
#include "support/instances.hpp"

using namespace casimir;

namespace {

// psi_1 = (1, 0), psi_2 = (0, 2), pair[y2][y1] = [[0, 0], [0, 0.5]].
PotentialTable two_node() {
  PotentialTable pot = PotentialTable::zeros(TreeTopology::chain(2), LabelDomain::uniform(2, 2));
  pot.node[0] << 1.0, 0.0;
  pot.node[1] << 0.0, 2.0;
  pot.edge[1] << 0.0, 0.0, 0.0, 0.5;
  return pot;
}

}  // namespace

TEST_CASE("score sums node and edge entries") {
  const PotentialTable pot = two_node();
  CHECK(score(pot, {0, 1}) == 3.0);
  CHECK(score(pot, {1, 1}) == 2.5);
  const PotentialTable zero = PotentialTable::zeros(TreeTopology::chain(3), LabelDomain::uniform(3, 4));
  CHECK(score(zero, {3, 0, 2}) == 0.0);
}

TEST_CASE("score rejects a labeling of the wrong shape") {
  const PotentialTable pot = two_node();
  CHECK_THROWS_AS(score(pot, {0}), InvalidInput);
  CHECK_THROWS_AS(score(pot, {0, 2}), InvalidInput);
}

TEST_CASE("enumerate_scored on the two-node instance") {
  const auto all = enumerate_scored(two_node());
  REQUIRE(all.size() == 4);
  const std::vector<std::pair<double, Labeling>> expect = {
      {3.0, {0, 1}}, {2.5, {1, 1}}, {1.0, {0, 0}}, {0.0, {1, 0}}};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(all[i].score == expect[i].first);
    CHECK(all[i].labeling == expect[i].second);
  }
}

TEST_CASE("enumerate_scored on a singleton and on zero tables") {
  PotentialTable one = PotentialTable::zeros(TreeTopology::chain(1), LabelDomain::uniform(1, 1));
  one.node[0](0) = 5.0;
  const auto single = enumerate_scored(one);
  REQUIRE(single.size() == 1);
  CHECK(single[0].score == 5.0);
  CHECK(single[0].labeling == Labeling{0});

  const auto all = enumerate_scored(PotentialTable::zeros(TreeTopology::chain(3), LabelDomain::uniform(3, 2)));
  REQUIRE(all.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(all[i].score == 0.0);
    const Labeling expect = {static_cast<Label>(i >> 2 & 1), static_cast<Label>(i >> 1 & 1), static_cast<Label>(i & 1)};
    CHECK(all[i].labeling == expect);
  }
}

TEST_CASE("enumerate_scored refuses spaces above the cap") {
  const PotentialTable pot = PotentialTable::zeros(TreeTopology::chain(10), LabelDomain::uniform(10, 4));
  CHECK_THROWS_AS(enumerate_scored(pot, 1000.0), CapExceeded);
}

TEST_CASE("constrain examples") {
  const PotentialTable pot = two_node();
  CHECK(enumerate_scored(constrain(pot, {Constraint::require(0, 1)})).front().score == 2.5);
  CHECK(enumerate_scored(constrain(pot, {Constraint::forbid(1, 1)})).front().score == 1.0);
  const PotentialTable same = constrain(pot, {});
  for (std::size_t v = 0; v < 2; ++v) {
    CHECK(same.node[v] == pot.node[v]);
    CHECK(same.edge[v] == pot.edge[v]);
  }
  CHECK_THROWS_AS(constrain(pot, {Constraint::forbid(0, 0), Constraint::forbid(0, 1)}), EmptySpace);
}

TEST_CASE("topology validation") {
  CHECK_THROWS_AS(TreeTopology::from_parents({-1, 2, 1}), InvalidTopology);
  CHECK_THROWS_AS(TreeTopology::from_parents({-1, -1}), InvalidTopology);
  CHECK_THROWS_AS(TreeTopology::from_parents({1, 0}), InvalidTopology);
  const TreeTopology chain = TreeTopology::from_parents({-1, 0, 1});
  CHECK(chain.is_chain());
  const TreeTopology star = TreeTopology::from_parents({-1, 0, 0, 0});
  CHECK_FALSE(star.is_chain());
  CHECK(star.upward_order().size() == 3);
}

TEST_CASE("property: enumeration agrees with score and with an independent enumerator") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const PotentialTable pot = trial % 2 == 0 ? testing_support::random_chain(rng, 1 + trial % 5, 3)
                                              : testing_support::random_tree(rng, 1 + trial % 6, 3);
    const auto all = enumerate_scored(pot);
    const auto ref = testing_support::brute_enumerate(pot);
    CHECK(static_cast<double>(all.size()) == pot.domain.cardinality());
    REQUIRE(all.size() == ref.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
      CHECK(all[i].score == score(pot, all[i].labeling));
      CHECK(all[i].labeling == ref[i].labeling);
      CHECK(all[i].score == doctest::Approx(ref[i].score).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: constrain keeps feasible scores") {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const PotentialTable pot = testing_support::random_chain(rng, 4, 3);
    const std::size_t v = sample_index(rng, 4);
    if (pot.domain.size(v) < 2) continue;
    const Constraint c = trial % 2 ? Constraint::require(v, 1) : Constraint::forbid(v, 0);
    const PotentialTable cp = constrain(pot, {c});
    for_each_labeling(pot.domain, [&](const Labeling& y) {
      if (c.admits(y))
        CHECK(score(cp, y) == score(pot, y));
      else
        CHECK(is_neg_inf(score(cp, y)));
    });
  }
}

TEST_CASE("jitter is deterministic and bounded") {
  const PotentialTable pot = two_node();
  const PotentialTable a = jitter(pot, 5, 1e-6), b = jitter(pot, 5, 1e-6);
  for (std::size_t v = 0; v < 2; ++v) {
    CHECK(a.node[v] == b.node[v]);
    CHECK((a.node[v] - pot.node[v]).cwiseAbs().maxCoeff() <= 1e-6);
  }
}
