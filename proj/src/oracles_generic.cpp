#include "casimir/oracles_generic.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <tuple>

#include "casimir/errors.hpp"

namespace casimir {

namespace {

bool admits_all(const std::vector<Constraint>& constraints, const Labeling& y) {
  for (const auto& c : constraints)
    if (!c.admits(y)) return false;
  return true;
}

// Tolerance for comparing scores that went through different summation orders.
double slack(double a, double b) { return 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

MaxMarginals exhaustive_max_marginals(const PotentialTable& pot,
                                      const std::vector<Constraint>& constraints, double cap) {
  pot.validate();
  const double size = pot.domain.cardinality();
  if (size > cap) throw CapExceeded(size, cap);
  for (const auto& c : constraints)
    if (c.node >= pot.num_nodes() || c.label < 0 ||
        static_cast<std::size_t>(c.label) >= pot.domain.size(c.node))
      throw InvalidInput("constraint refers to a node or label outside the domain");

  MaxMarginals mm;
  mm.table.resize(pot.num_nodes());
  for (std::size_t v = 0; v < pot.num_nodes(); ++v)
    mm.table[v] = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(pot.domain.size(v)), kNegInf);
  bool any = false;
  for_each_labeling(pot.domain, [&](const Labeling& y) {
    if (!admits_all(constraints, y)) return;
    any = true;
    const double s = score(pot, y);
    mm.best = std::max(mm.best, s);
    for (std::size_t v = 0; v < y.size(); ++v) mm.table[v](y[v]) = std::max(mm.table[v](y[v]), s);
  });
  if (!any) throw EmptySpace("constraints admit no labeling");
  return mm;
}

MaxMarginalProvider exhaustive_provider(const PotentialTable& pot, double cap) {
  return [pot, cap](const std::vector<Constraint>& c) { return exhaustive_max_marginals(pot, c, cap); };
}

DecodedLabeling decode_from_max_marginals(const MaxMarginals& mm) {
  DecodedLabeling d;
  d.labeling.resize(mm.table.size());
  for (std::size_t v = 0; v < mm.table.size(); ++v) {
    Eigen::Index arg;
    const double top = mm.table[v].maxCoeff(&arg);
    d.labeling[v] = static_cast<Label>(arg);
    for (Eigen::Index j = 0; j < mm.table[v].size(); ++j)
      if (j != arg && !is_neg_inf(top) && std::abs(mm.table[v](j) - top) <= 1e-12) d.ambiguous = true;
  }
  return d;
}

BmmfResult bmmf_topk(const MaxMarginalProvider& provider, std::size_t k) {
  if (k < 1) throw InvalidInput("K must be at least 1");
  struct Partition {
    std::vector<Constraint> constraints;
    MaxMarginals mm;
    Labeling best;
    bool alive = true;
  };
  BmmfResult r;
  std::vector<Partition> parts;
  auto call = [&](const std::vector<Constraint>& c) {
    ++r.provider_calls;
    return provider(c);
  };

  {
    Partition first;
    first.mm = call({});
    first.best = decode_from_max_marginals(first.mm).labeling;
    r.best.push_back({first.mm.best, first.best});
    parts.push_back(std::move(first));
  }
  // (node, label, partition) triples already used to split a partition.
  std::set<std::tuple<std::size_t, Label, std::size_t>> used;

  while (r.best.size() < k) {
    double top = kNegInf;
    std::size_t bv = 0, bs = 0;
    Label bj = -1;
    for (std::size_t s = 0; s < parts.size(); ++s) {
      if (!parts[s].alive) continue;
      const auto& table = parts[s].mm.table;
      for (std::size_t v = 0; v < table.size(); ++v)
        for (Eigen::Index j = 0; j < table[v].size(); ++j) {
          const Label lj = static_cast<Label>(j);
          if (parts[s].best[v] == lj || used.count({v, lj, s})) continue;
          if (table[v](j) > top) {
            top = table[v](j);
            bv = v;
            bj = lj;
            bs = s;
          }
        }
    }
    if (bj < 0 || is_neg_inf(top)) break;  // space exhausted
    used.insert({bv, bj, bs});

    Partition next;
    next.constraints = parts[bs].constraints;
    next.constraints.push_back(Constraint::require(bv, bj));
    next.mm = call(next.constraints);
    next.best = decode_from_max_marginals(next.mm).labeling;
    const double prev = r.best.back().score;
    if (next.mm.best > prev + slack(next.mm.best, prev) ||
        std::abs(next.mm.best - top) > slack(next.mm.best, top))
      throw IntegrityError("max-marginal provider returned non-monotone partition scores");
    r.best.push_back({next.mm.best, next.best});

    // Shrink the split partition to exclude the new one.
    Partition& old = parts[bs];
    old.constraints.push_back(Constraint::forbid(bv, bj));
    try {
      old.mm = call(old.constraints);
    } catch (const EmptySpace&) {
      old.alive = false;
    }
    parts.push_back(std::move(next));
  }
  return r;
}

LabelBox LabelBox::full(const LabelDomain& domain) {
  LabelBox b;
  b.allowed.resize(domain.num_nodes());
  for (std::size_t v = 0; v < domain.num_nodes(); ++v)
    for (std::size_t j = 0; j < domain.size(v); ++j) b.allowed[v].push_back(static_cast<Label>(j));
  return b;
}

bool LabelBox::is_singleton() const {
  return std::all_of(allowed.begin(), allowed.end(), [](const auto& a) { return a.size() == 1; });
}

Labeling LabelBox::singleton() const {
  Labeling y(allowed.size());
  for (std::size_t v = 0; v < allowed.size(); ++v) y[v] = allowed[v].front();
  return y;
}

double LabelBox::size() const {
  double s = 1.0;
  for (const auto& a : allowed) s *= static_cast<double>(a.size());
  return s;
}

BranchBoundResult branch_bound_topk(const LabelBox& space, const ScoreFunction& score_fn,
                                    const BoundFunction& bound, const SplitFunction& split,
                                    std::size_t k) {
  if (k < 1) throw InvalidInput("K must be at least 1");
  if (space.size() == 0.0) throw EmptySpace("search space is empty");
  struct Item {
    double priority;
    std::size_t order;
    LabelBox box;
  };
  struct Later {
    bool operator()(const Item& a, const Item& b) const {
      if (a.priority != b.priority) return a.priority < b.priority;
      return a.order > b.order;
    }
  };
  std::priority_queue<Item, std::vector<Item>, Later> queue;
  std::size_t counter = 0;
  auto push = [&](LabelBox box) {
    const double b = bound(box);
    if (!std::isfinite(b)) throw IntegrityError("bound function returned a non-finite value");
    queue.push({b, counter++, std::move(box)});
  };
  push(space);

  BranchBoundResult r;
  while (r.best.size() < k && !queue.empty()) {
    Item item = queue.top();
    queue.pop();
    ++r.pops;
    if (item.box.is_singleton()) {
      Labeling y = item.box.singleton();
      const double s = score_fn(y);
      if (s > item.priority + slack(s, item.priority))
        throw IntegrityError("popped labeling scores above its subset bound");
      r.best.push_back({s, std::move(y)});
      continue;
    }
    auto [a, b] = split(item.box);
    if (a.size() == 0.0 || b.size() == 0.0 || a.size() + b.size() != item.box.size())
      throw IntegrityError("split did not partition the subset into two non-empty parts");
    push(std::move(a));
    push(std::move(b));
  }
  return r;
}

BoundFunction independent_bound(const PotentialTable& pot) {
  return [pot](const LabelBox& box) {
    double s = 0.0;
    for (std::size_t v = 0; v < pot.num_nodes(); ++v) {
      double best = -INFINITY;
      for (Label j : box.allowed[v]) best = std::max(best, pot.node[v](j));
      s += best;
      if (const auto& par = pot.topology.parent(v)) {
        double be = -INFINITY;
        for (Label j : box.allowed[v])
          for (Label i : box.allowed[*par]) be = std::max(be, pot.edge[v](j, i));
        s += be;
      }
    }
    return s;
  };
}

BoundFunction enumeration_bound(const PotentialTable& pot) {
  return [pot](const LabelBox& box) {
    double best = -INFINITY;
    Labeling y(box.allowed.size());
    std::vector<std::size_t> idx(box.allowed.size(), 0);
    while (true) {
      for (std::size_t v = 0; v < y.size(); ++v) y[v] = box.allowed[v][idx[v]];
      best = std::max(best, score(pot, y));
      std::size_t v = y.size();
      bool done = true;
      while (v-- > 0) {
        if (++idx[v] < box.allowed[v].size()) {
          done = false;
          break;
        }
        idx[v] = 0;
      }
      if (done) return best;
    }
  };
}

std::pair<LabelBox, LabelBox> split_first_halves(const LabelBox& box) {
  for (std::size_t v = 0; v < box.allowed.size(); ++v) {
    const auto& a = box.allowed[v];
    if (a.size() < 2) continue;
    LabelBox lo = box, hi = box;
    const auto mid = static_cast<std::ptrdiff_t>(a.size() / 2);
    lo.allowed[v].assign(a.begin(), a.begin() + mid);
    hi.allowed[v].assign(a.begin() + mid, a.end());
    return {std::move(lo), std::move(hi)};
  }
  throw InvalidInput("cannot split a singleton");
}

std::pair<LabelBox, LabelBox> split_widest_first(const LabelBox& box) {
  std::size_t widest = 0;
  for (std::size_t v = 1; v < box.allowed.size(); ++v)
    if (box.allowed[v].size() > box.allowed[widest].size()) widest = v;
  const auto& a = box.allowed[widest];
  if (a.size() < 2) throw InvalidInput("cannot split a singleton");
  LabelBox first = box, rest = box;
  first.allowed[widest] = {a.front()};
  rest.allowed[widest].assign(a.begin() + 1, a.end());
  return {std::move(first), std::move(rest)};
}

}  // namespace casimir
