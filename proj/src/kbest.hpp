#pragma once

// Bounded k-best merge primitives shared by the chain and tree oracles.

#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <vector>

#include <Eigen/Dense>

namespace casimir::detail {

// A list entry reached from `source` (a label or a list index) at position
// `slot` of that source's own sorted list.
struct MergeEntry {
  double value;
  int source;
  int slot;
};

// Total order used by every k-best list: value desc, then source asc, then
// slot asc.
inline bool precedes(const MergeEntry& a, const MergeEntry& b) {
  if (a.value != b.value) return a.value > b.value;
  if (a.source != b.source) return a.source < b.source;
  return a.slot < b.slot;
}

struct MergeLater {
  bool operator()(const MergeEntry& a, const MergeEntry& b) const { return precedes(b, a); }
};

// K best of { lists[i][s] + offset[i] } over all (i, s). Each lists[i] is
// non-increasing. Uses a heap holding one head per source.
template <typename ValueOf>
std::vector<MergeEntry> kway_merge(std::size_t num_sources, const std::vector<std::size_t>& lengths,
                                   ValueOf&& value_of, std::size_t k) {
  std::priority_queue<MergeEntry, std::vector<MergeEntry>, MergeLater> heap;
  for (std::size_t i = 0; i < num_sources; ++i)
    if (lengths[i] > 0) heap.push({value_of(i, 0), static_cast<int>(i), 0});
  std::vector<MergeEntry> out;
  out.reserve(k);
  while (!heap.empty() && out.size() < k) {
    MergeEntry top = heap.top();
    heap.pop();
    out.push_back(top);
    const std::size_t next = static_cast<std::size_t>(top.slot) + 1;
    const std::size_t src = static_cast<std::size_t>(top.source);
    if (next < lengths[src]) heap.push({value_of(src, next), top.source, static_cast<int>(next)});
  }
  return out;
}

// K best pairwise sums a[i] + b[j] of two non-increasing lists; source is the
// index into a and slot the index into b. Each pair enters the heap once.
inline std::vector<MergeEntry> kbest_pair_sums(const std::vector<double>& a,
                                               const std::vector<double>& b, std::size_t k) {
  std::vector<MergeEntry> out;
  if (a.empty() || b.empty()) return out;
  std::priority_queue<MergeEntry, std::vector<MergeEntry>, MergeLater> heap;
  heap.push({a[0] + b[0], 0, 0});
  while (!heap.empty() && out.size() < k) {
    MergeEntry top = heap.top();
    heap.pop();
    out.push_back(top);
    const auto i = static_cast<std::size_t>(top.source), j = static_cast<std::size_t>(top.slot);
    if (j + 1 < b.size()) heap.push({a[i] + b[j + 1], top.source, top.slot + 1});
    if (j == 0 && i + 1 < a.size()) heap.push({a[i + 1] + b[0], top.source + 1, 0});
  }
  return out;
}

// log sum exp of the given values; -inf when every value is -inf or sentinel.
inline double log_sum_exp(const double* x, std::size_t n) {
  double m = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, x[i]);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(x[i] - m);
  return m + std::log(s);
}

inline double log_sum_exp(const Eigen::VectorXd& x) {
  return log_sum_exp(x.data(), static_cast<std::size_t>(x.size()));
}

}  // namespace casimir::detail
