#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "pandora/errors.hpp"
#include "pandora/rational.hpp"

namespace pandora {

/// Edge between two vertex indices. Position in the input list is the edge's
/// canonical order.
struct WeightedEdge {
  int u;
  int v;
  Rational weight;
};

struct Matching {
  std::vector<int> edges;  // indices into the input list, ascending
  Rational total;
};

inline constexpr std::size_t kMaxMatchingEdges = 40;

/// Exact maximum-weight matching by exhaustive search. Edges with
/// non-positive weight never help and are skipped, so the empty matching
/// (total 0) is always a candidate.
inline Matching max_weight_matching(std::span<const WeightedEdge> edges, std::size_t max_edges = kMaxMatchingEdges) {
  std::vector<int> cand;
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (edges[e].weight.sign() > 0) cand.push_back(static_cast<int>(e));
  if (cand.size() > max_edges)
    throw BoundExceeded("brute-force matching over " + std::to_string(cand.size()) + " positive edges",
                        static_cast<double>(cand.size()), static_cast<double>(max_edges));
  int nv = 0;
  for (const auto& e : edges) nv = std::max({nv, e.u + 1, e.v + 1});
  std::vector<char> used(static_cast<std::size_t>(nv), 0);

  // Suffix sums give a cheap optimistic bound for pruning.
  std::vector<Rational> rest(cand.size() + 1, Rational(0));
  for (std::size_t k = cand.size(); k-- > 0;) rest[k] = rest[k + 1] + edges[static_cast<std::size_t>(cand[k])].weight;

  Matching best{{}, Rational(0)};
  std::vector<int> cur;
  Rational cur_total(0);
  auto search = [&](auto&& self, std::size_t k) -> void {
    if (cur_total > best.total) best = {cur, cur_total};
    if (k == cand.size() || !(cur_total + rest[k] > best.total)) return;
    const WeightedEdge& e = edges[static_cast<std::size_t>(cand[k])];
    auto& a = used[static_cast<std::size_t>(e.u)];
    auto& b = used[static_cast<std::size_t>(e.v)];
    if (!a && !b) {
      a = b = 1;
      cur.push_back(cand[k]);
      cur_total += e.weight;
      self(self, k + 1);
      cur_total -= e.weight;
      cur.pop_back();
      a = b = 0;
    }
    self(self, k + 1);
  };
  search(search, 0);
  return best;
}

/// Weighted greedy: repeatedly add the heaviest positive edge whose endpoints
/// are both free. Equal weights go to the earlier edge.
inline Matching greedy_matching(std::span<const WeightedEdge> edges) {
  std::vector<int> order(edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return edges[static_cast<std::size_t>(a)].weight > edges[static_cast<std::size_t>(b)].weight;
  });
  std::vector<int> used;
  Matching m{{}, Rational(0)};
  for (int e : order) {
    const WeightedEdge& w = edges[static_cast<std::size_t>(e)];
    if (w.weight.sign() <= 0) break;
    if (std::find(used.begin(), used.end(), w.u) != used.end() || std::find(used.begin(), used.end(), w.v) != used.end())
      continue;
    used.push_back(w.u);
    used.push_back(w.v);
    m.edges.push_back(e);
    m.total += w.weight;
  }
  std::sort(m.edges.begin(), m.edges.end());
  return m;
}

}  // namespace pandora
