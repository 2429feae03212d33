#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pandora/errors.hpp"
#include "pandora/rational.hpp"

namespace pandora {

struct Atom {
  Rational value;
  Rational prob;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finite discrete law over rational values.
///
/// Canonical form: atoms sorted by strictly increasing value, equal values
/// merged, every probability strictly positive and the total exactly one.
/// Two distributions compare equal iff they are the same law.
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;

  explicit DiscreteDistribution(std::vector<Atom> atoms) : atoms_(canonicalize(std::move(atoms))) {}

  static DiscreteDistribution point(Rational v) { return DiscreteDistribution({{std::move(v), 1}}); }

  /// Probability-weighted combination of laws; weights must sum to one.
  static DiscreteDistribution mixture(std::span<const std::pair<Rational, DiscreteDistribution>> parts) {
    std::vector<Atom> atoms;
    for (const auto& [w, d] : parts)
      for (const Atom& a : d.atoms()) atoms.push_back({a.value, w * a.prob});
    return DiscreteDistribution(std::move(atoms));
  }

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }
  const Rational& min_value() const { return require_nonempty().front().value; }
  const Rational& max_value() const { return require_nonempty().back().value; }

  bool contains(const Rational& v) const {
    return std::binary_search(atoms_.begin(), atoms_.end(), Atom{v, 0},
                              [](const Atom& a, const Atom& b) { return a.value < b.value; });
  }

  Rational probability_of(const Rational& v) const {
    for (const Atom& a : atoms_)
      if (a.value == v) return a.prob;
    return 0;
  }

  /// Law of f(X); values that collide are merged.
  template <class F>
  DiscreteDistribution map(F&& f) const {
    std::vector<Atom> atoms;
    atoms.reserve(atoms_.size());
    for (const Atom& a : atoms_) atoms.push_back({f(a.value), a.prob});
    return DiscreteDistribution(std::move(atoms));
  }

  friend bool operator==(const DiscreteDistribution&, const DiscreteDistribution&) = default;

 private:
  const std::vector<Atom>& require_nonempty() const {
    if (atoms_.empty()) throw DomainError("empty distribution has no support");
    return atoms_;
  }

  static std::vector<Atom> canonicalize(std::vector<Atom> atoms) {
    if (atoms.empty()) throw ValidationError("distribution must have at least one atom");
    std::map<Rational, Rational> merged;
    Rational total(0);
    for (Atom& a : atoms) {
      if (a.prob.sign() <= 0)
        throw ValidationError("atom at value " + a.value.str() + " has non-positive probability " +
                              a.prob.str());
      total += a.prob;
      merged[a.value] += a.prob;
    }
    if (total != Rational(1))
      throw ValidationError("probabilities sum to " + total.str() + ", expected exactly 1");
    std::vector<Atom> out;
    out.reserve(merged.size());
    for (auto& [v, p] : merged) out.push_back({v, p});
    return out;
  }

  std::vector<Atom> atoms_;
};

inline Rational expectation(const DiscreteDistribution& d) {
  Rational e(0);
  for (const Atom& a : d.atoms()) e += a.value * a.prob;
  return e;
}

/// E[(X - t)^+].
inline Rational surplus(const DiscreteDistribution& d, const Rational& t) {
  Rational s(0);
  for (const Atom& a : d.atoms())
    if (a.value > t) s += (a.value - t) * a.prob;
  return s;
}

/// Law of X + Y for independent X ~ a, Y ~ b.
inline DiscreteDistribution convolve(const DiscreteDistribution& a, const DiscreteDistribution& b) {
  std::vector<Atom> atoms;
  atoms.reserve(a.size() * b.size());
  for (const Atom& x : a.atoms())
    for (const Atom& y : b.atoms()) atoms.push_back({x.value + y.value, x.prob * y.prob});
  return DiscreteDistribution(std::move(atoms));
}

inline std::ostream& operator<<(std::ostream& os, const DiscreteDistribution& d) {
  os << '{';
  bool first = true;
  for (const Atom& a : d.atoms()) {
    if (!first) os << ", ";
    first = false;
    os << '(' << a.value << ", " << a.prob << ')';
  }
  return os << '}';
}

}  // namespace pandora
