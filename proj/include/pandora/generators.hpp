#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pandora/instance.hpp"

namespace pandora::gen {

// Small random instances for property checks: at most three edges on the
// vertices a..d, at most three support points per box, small rationals.

inline long uniform(std::mt19937_64& g, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(g); }

/// p/q with q in 1..max_den and p/q in [lo, hi].
inline Rational rational_in(std::mt19937_64& g, long lo, long hi, long max_den = 2) {
  const long q = uniform(g, 1, max_den);
  return Rational(uniform(g, lo * q, hi * q), q);
}

/// Positive integer weights normalized to a probability vector.
inline std::vector<Rational> random_probs(std::mt19937_64& g, std::size_t k) {
  std::vector<long> w(k);
  long total = 0;
  for (long& x : w) total += (x = uniform(g, 1, 4));
  std::vector<Rational> p;
  for (long x : w) p.emplace_back(x, total);
  return p;
}

inline DiscreteDistribution random_law(std::mt19937_64& g, long lo, long hi, std::size_t max_support = 3) {
  const auto k = static_cast<std::size_t>(uniform(g, 1, static_cast<long>(max_support)));
  const auto p = random_probs(g, k);
  std::vector<Atom> atoms;
  for (std::size_t a = 0; a < k; ++a) atoms.push_back({rational_in(g, lo, hi), p[a]});
  return DiscreteDistribution(std::move(atoms));
}

/// Distinct random vertex pairs from a..d.
inline std::vector<std::pair<VertexId, VertexId>> random_edges(std::mt19937_64& g, std::size_t max_edges = 3) {
  std::vector<std::pair<VertexId, VertexId>> all;
  const std::vector<VertexId> vs{"a", "b", "c", "d"};
  for (std::size_t x = 0; x < vs.size(); ++x)
    for (std::size_t y = x + 1; y < vs.size(); ++y) all.emplace_back(vs[x], vs[y]);
  std::shuffle(all.begin(), all.end(), g);
  const auto m = static_cast<std::size_t>(uniform(g, 1, static_cast<long>(max_edges)));
  all.resize(m);
  for (auto& [u, v] : all)
    if (uniform(g, 0, 1)) std::swap(u, v);
  return all;
}

/// Positive cost in {1/4, 1/2, ..., 2}.
inline Rational random_cost(std::mt19937_64& g) { return Rational(uniform(g, 1, 8), 4); }

/// Independent boxes with values in [-4, 8] and strictly positive costs.
inline MatchingInstance random_independent(std::mt19937_64& g) {
  MatchingInstance inst;
  for (const auto& [u, v] : random_edges(g))
    inst.edges.push_back(EdgeSpec::independent(u, v, PandoraBox(random_law(g, -4, 8), random_cost(g)),
                                               PandoraBox(random_law(g, -4, 8), random_cost(g))));
  return normalize(std::move(inst));
}

/// Non-negative values, each box's cost a positive fraction of its mean.
inline MatchingInstance random_positive(std::mt19937_64& g) {
  auto box = [&] {
    DiscreteDistribution d = random_law(g, 0, 8);
    while (expectation(d).sign() == 0) d = random_law(g, 0, 8);
    return PandoraBox(d, expectation(d) * Rational(uniform(g, 1, 4), 4));
  };
  MatchingInstance inst;
  for (const auto& [u, v] : random_edges(g)) {
    PandoraBox a = box();
    PandoraBox b = box();
    inst.edges.push_back(EdgeSpec::independent(u, v, std::move(a), std::move(b)));
  }
  return normalize(std::move(inst));
}

/// Correlated-within-edges instances: each edge draws a random subset of
/// label pairs with random weights and a random total per pair.
inline MatchingInstance random_joint(std::mt19937_64& g) {
  MatchingInstance inst;
  for (const auto& [u, v] : random_edges(g)) {
    const long ni = uniform(g, 1, 3);
    const long nj = uniform(g, 1, 3);
    std::vector<std::pair<long, long>> cells;
    for (long a = 0; a < ni; ++a)
      for (long b = 0; b < nj; ++b)
        if (uniform(g, 0, 3) > 0) cells.emplace_back(a, b);
    if (cells.empty()) cells.emplace_back(0, 0);
    const auto p = random_probs(g, cells.size());
    std::vector<JointOutcome> outs;
    for (std::size_t k = 0; k < cells.size(); ++k)
      outs.push_back({"x" + std::to_string(cells[k].first), "y" + std::to_string(cells[k].second),
                      rational_in(g, -6, 12), p[k]});
    inst.edges.push_back(EdgeSpec::joint(u, v, random_cost(g), random_cost(g), std::move(outs)));
  }
  return normalize(std::move(inst));
}

}  // namespace pandora::gen
