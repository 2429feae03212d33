#pragma once

#include <utility>

#include "pandora/distribution.hpp"

namespace pandora {

/// A single-stage Pandora box: pay `cost` to observe a draw from `dist`.
struct PandoraBox {
  DiscreteDistribution dist;
  Rational cost;

  PandoraBox(DiscreteDistribution d, Rational c) : dist(std::move(d)), cost(std::move(c)) {
    if (cost.sign() < 0) throw ValidationError("box cost must be non-negative, got " + cost.str());
  }

  friend bool operator==(const PandoraBox&, const PandoraBox&) = default;
};

/// The threshold t with E[(X - t)^+] = cost.
///
/// Surplus is piecewise linear between support points, so the solver walks the
/// support from the top and inverts the single linear piece that contains
/// `cost`. For cost 0 the smallest solution, the maximum support value, is
/// returned.
inline Rational weitzman_index(const DiscreteDistribution& dist, const Rational& cost) {
  if (cost.sign() < 0) throw ValidationError("cost must be non-negative, got " + cost.str());
  const auto atoms = dist.atoms();
  if (atoms.empty()) throw DomainError("index of an empty distribution");
  if (cost.sign() == 0) return dist.max_value();

  // tail_mass / tail_sum cover atoms strictly above the current breakpoint.
  Rational tail_mass(0);
  Rational tail_sum(0);
  for (std::size_t k = atoms.size(); k-- > 0;) {
    tail_mass += atoms[k].prob;
    tail_sum += atoms[k].prob * atoms[k].value;
    const Rational& next = k > 0 ? atoms[k - 1].value : atoms[k].value;
    // Surplus at the next breakpoint below, using only atoms above it.
    const Rational at_next = tail_sum - tail_mass * next;
    if (k == 0 || at_next >= cost) return (tail_sum - cost) / tail_mass;
  }
  return (tail_sum - cost) / tail_mass;  // unreachable
}

inline Rational weitzman_index(const PandoraBox& box) { return weitzman_index(box.dist, box.cost); }

struct IndexedBox {
  PandoraBox box;
  Rational sigma;

  explicit IndexedBox(PandoraBox b) : box(std::move(b)), sigma(weitzman_index(box)) {}
};

/// min(v, sigma) for a value v in the support of the box.
inline Rational capped_value(const IndexedBox& ib, const Rational& v) {
  if (!ib.box.dist.contains(v))
    throw DomainError("value " + v.str() + " is not in the support of the box");
  return min(v, ib.sigma);
}

/// Opening both boxes at once: the value is the sum and the cost is the total.
inline PandoraBox bundle(const PandoraBox& a, const PandoraBox& b) {
  return PandoraBox(convolve(a.dist, b.dist), a.cost + b.cost);
}

}  // namespace pandora
