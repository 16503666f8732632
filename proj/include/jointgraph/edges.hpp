#pragma once

#include <set>
#include <utility>
#include <vector>

namespace jointgraph {

// Undirected edge between variables j < l, 1-indexed like the blocks.
using Edge = std::pair<int, int>;
using EdgeSet = std::set<Edge>;

inline Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

inline long long pair_count(int p) { return static_cast<long long>(p) * (p - 1) / 2; }

inline EdgeSet intersect(const std::vector<EdgeSet>& sets) {
  if (sets.empty()) return {};
  EdgeSet out = sets.front();
  for (std::size_t k = 1; k < sets.size(); ++k) {
    EdgeSet next;
    for (const Edge& e : out)
      if (sets[k].count(e)) next.insert(e);
    out = std::move(next);
  }
  return out;
}

}  // namespace jointgraph
