#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "casimir/errors.hpp"
#include "casimir/oracles.hpp"
#include "casimir/oracles_generic.hpp"
#include "support/brute.hpp"
#include "support/instances.hpp"

using namespace casimir;
using testing_support::brute_enumerate;

namespace {

PotentialTable two_node() {
  PotentialTable pot = PotentialTable::zeros(TreeTopology::chain(2), LabelDomain::uniform(2, 2));
  pot.node[0] << 1.0, 0.0;
  pot.node[1] << 0.0, 2.0;
  pot.edge[1] << 0.0, 0.0, 0.0, 0.5;
  return pot;
}

ScoreFunction scorer(const PotentialTable& pot) {
  return [pot](const Labeling& y) { return score(pot, y); };
}

void check_matches_enumeration(const std::vector<ScoredLabeling>& got, const PotentialTable& pot, std::size_t k) {
  const auto all = brute_enumerate(pot);
  REQUIRE(got.size() == std::min(k, all.size()));
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(std::abs(got[i].score - all[i].score) <= 1e-9);
    CHECK(got[i].labeling == all[i].labeling);
  }
}

}  // namespace

TEST_CASE("exhaustive_max_marginals examples") {
  const MaxMarginals mm = exhaustive_max_marginals(two_node(), {});
  CHECK(mm.best == 3.0);
  CHECK(mm.table[0](0) == 3.0);
  CHECK(mm.table[0](1) == 2.5);
  CHECK(mm.table[1](0) == 1.0);
  CHECK(mm.table[1](1) == 3.0);

  const MaxMarginals c = exhaustive_max_marginals(two_node(), {Constraint::require(0, 1)});
  CHECK(c.table[1](1) == 2.5);
  CHECK(c.table[1](0) == 0.0);
  CHECK(is_neg_inf(c.table[0](0)));

  PotentialTable one = PotentialTable::zeros(TreeTopology::chain(1), LabelDomain::uniform(1, 3));
  one.node[0] << 0.5, -2.0, 1.5;
  CHECK(exhaustive_max_marginals(one, {}).table[0] == one.node[0]);

  const PotentialTable big = PotentialTable::zeros(TreeTopology::chain(8), LabelDomain::uniform(8, 5));
  CHECK_THROWS_AS(exhaustive_max_marginals(big, {}, 1e4), CapExceeded);
  CHECK_THROWS_AS(exhaustive_max_marginals(two_node(), {Constraint::forbid(1, 0), Constraint::forbid(1, 1)}),
                  EmptySpace);
}

TEST_CASE("decode_from_max_marginals examples") {
  const DecodedLabeling d = decode_from_max_marginals(exhaustive_max_marginals(two_node(), {}));
  CHECK(d.labeling == Labeling{0, 1});
  CHECK_FALSE(d.ambiguous);
  PotentialTable one = PotentialTable::zeros(TreeTopology::chain(1), LabelDomain::uniform(1, 3));
  one.node[0] << 0.5, 2.0, 1.5;
  CHECK(decode_from_max_marginals(exhaustive_max_marginals(one, {})).labeling == Labeling{1});
  const PotentialTable flat = PotentialTable::zeros(TreeTopology::chain(2), LabelDomain::uniform(2, 2));
  CHECK(decode_from_max_marginals(exhaustive_max_marginals(flat, {})).ambiguous);
}

TEST_CASE("property: max-marginal decoding recovers the MAP") {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const PotentialTable pot = jitter(testing_support::random_chain(rng, 3, 3, 0.0), 100 + trial);
    const DecodedLabeling d = decode_from_max_marginals(exhaustive_max_marginals(pot, {}));
    CHECK_FALSE(d.ambiguous);
    CHECK(d.labeling == viterbi(pot).second);
  }
}

TEST_CASE("bmmf_topk examples") {
  const BmmfResult r3 = bmmf_topk(exhaustive_provider(two_node()), 3);
  check_matches_enumeration(r3.best, two_node(), 3);
  CHECK(r3.provider_calls <= 6);
  const BmmfResult r1 = bmmf_topk(exhaustive_provider(two_node()), 1);
  REQUIRE(r1.best.size() == 1);
  CHECK(r1.best[0].labeling == Labeling{0, 1});
  CHECK(r1.provider_calls == 1);
  const BmmfResult all = bmmf_topk(exhaustive_provider(two_node()), 9);
  check_matches_enumeration(all.best, two_node(), 9);
}

TEST_CASE("bmmf_topk detects an inconsistent provider") {
  const PotentialTable pot = two_node();
  int calls = 0;
  const MaxMarginalProvider liar = [&](const std::vector<Constraint>& c) {
    MaxMarginals mm = exhaustive_max_marginals(pot, c);
    if (calls++ > 0) mm.best += 10.0;
    return mm;
  };
  CHECK_THROWS_AS(bmmf_topk(liar, 3), IntegrityError);
}

TEST_CASE("property: BMMF equals enumeration within 2K calls") {
  Rng rng(42);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t p = 1 + sample_index(rng, 5);
    const PotentialTable pot = jitter(testing_support::random_chain(rng, p, 3, 0.0), 7 + trial);
    const std::size_t k = 1 + sample_index(rng, 10);
    const BmmfResult r = bmmf_topk(exhaustive_provider(pot), k);
    check_matches_enumeration(r.best, pot, k);
    CHECK(r.provider_calls <= 2 * k);
    const auto tv = topk_viterbi(pot, k);
    REQUIRE(tv.size() == r.best.size());
    for (std::size_t i = 0; i < tv.size(); ++i) CHECK(tv[i].labeling == r.best[i].labeling);
  }
}

TEST_CASE("branch_bound_topk examples") {
  const PotentialTable pot = two_node();
  const LabelBox space = LabelBox::full(pot.domain);
  const auto r = branch_bound_topk(space, scorer(pot), independent_bound(pot), split_first_halves, 2);
  REQUIRE(r.best.size() == 2);
  CHECK(r.best[0].score == 3.0);
  CHECK(r.best[0].labeling == Labeling{0, 1});
  CHECK(r.best[1].score == 2.5);
  CHECK(r.best[1].labeling == Labeling{1, 1});

  const auto map = branch_bound_topk(space, scorer(pot), independent_bound(pot), split_widest_first, 1);
  REQUIRE(map.best.size() == 1);
  CHECK(map.best[0].labeling == viterbi(pot).second);

  // Exact bound, halving splits: root, {y1=0}, (0,1), {y1=1}, (1,1).
  const auto exact = branch_bound_topk(space, scorer(pot), enumeration_bound(pot), split_first_halves, 2);
  CHECK(exact.pops == 5);
}

TEST_CASE("branch_bound_topk rejects invalid bounds and splits") {
  const PotentialTable pot = two_node();
  const LabelBox space = LabelBox::full(pot.domain);
  const BoundFunction low = [](const LabelBox&) { return 0.0; };
  CHECK_THROWS_AS(branch_bound_topk(space, scorer(pot), low, split_first_halves, 1), IntegrityError);
  const BoundFunction nan = [](const LabelBox&) { return NAN; };
  CHECK_THROWS_AS(branch_bound_topk(space, scorer(pot), nan, split_first_halves, 1), IntegrityError);
  const SplitFunction lazy = [](const LabelBox& b) { return std::make_pair(b, LabelBox{}); };
  CHECK_THROWS_AS(branch_bound_topk(space, scorer(pot), independent_bound(pot), lazy, 1), IntegrityError);
}

TEST_CASE("property: bounds are valid on random boxes") {
  Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const PotentialTable pot = testing_support::random_chain(rng, 4, 3);
    LabelBox box = LabelBox::full(pot.domain);
    for (auto& a : box.allowed)
      if (a.size() > 1 && uniform01(rng) < 0.5) a.erase(a.begin() + static_cast<long>(sample_index(rng, a.size())));
    double best = kNegInf;
    for_each_labeling(pot.domain, [&](const Labeling& y) {
      for (std::size_t v = 0; v < y.size(); ++v)
        if (std::find(box.allowed[v].begin(), box.allowed[v].end(), y[v]) == box.allowed[v].end()) return;
      best = std::max(best, score(pot, y));
    });
    CHECK(independent_bound(pot)(box) >= best - 1e-12);
    CHECK(enumeration_bound(pot)(box) == doctest::Approx(best).epsilon(1e-12));
    LabelBox single = box;
    for (auto& a : single.allowed) a.resize(1);
    CHECK(independent_bound(pot)(single) == doctest::Approx(score(pot, single.singleton())).epsilon(1e-12));
  }
}

TEST_CASE("property: branch and bound is exact for either split strategy") {
  Rng rng(44);
  for (int trial = 0; trial < 150; ++trial) {
    const PotentialTable pot = trial % 2 ? testing_support::random_chain(rng, 1 + sample_index(rng, 5), 3)
                                         : testing_support::random_tree(rng, 1 + sample_index(rng, 5), 3);
    const std::size_t k = 1 + sample_index(rng, 8);
    const LabelBox space = LabelBox::full(pot.domain);
    const auto a = branch_bound_topk(space, scorer(pot), independent_bound(pot), split_first_halves, k);
    const auto b = branch_bound_topk(space, scorer(pot), independent_bound(pot), split_widest_first, k);
    check_matches_enumeration(a.best, pot, k);
    check_matches_enumeration(b.best, pot, k);
  }
}
