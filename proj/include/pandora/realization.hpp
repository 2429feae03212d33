#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "pandora/instance.hpp"
#include "pandora/product.hpp"

namespace pandora {

/// One joint-outcome index per edge.
using Realization = std::vector<std::size_t>;

inline Rational realization_probability(const MatchingInstance& inst, std::span<const std::size_t> r) {
  Rational p(1);
  for (std::size_t e = 0; e < inst.edges.size(); ++e) p *= inst.edges[e].outcomes.at(r[e]).prob;
  return p;
}

inline double realization_count(const MatchingInstance& inst) {
  double n = 1;
  for (const auto& e : inst.edges) n *= static_cast<double>(e.outcome_count());
  return n;
}

/// Calls f(realization, probability) for every element of the product space.
template <class F>
void for_each_realization(const MatchingInstance& inst, double bound, F&& f) {
  std::vector<std::size_t> radix;
  for (const auto& e : inst.edges) radix.push_back(e.outcome_count());
  Realization r(radix.size());
  try {
    for_each_product(radix, bound, [&](std::span<const std::size_t> idx) {
      r.assign(idx.begin(), idx.end());
      f(static_cast<const Realization&>(r), realization_probability(inst, r));
    });
  } catch (const BoundExceeded& e) {
    throw BoundExceeded("exact evaluation needs " + std::to_string(static_cast<long long>(e.estimate())) +
                            " realizations, above the bound of " + std::to_string(static_cast<long long>(e.bound())) +
                            "; use Monte Carlo mode or raise the enumeration bound",
                        e.estimate(), e.bound());
  }
}

/// Uniform double in [0, 1) from the top 53 bits of one generator output.
inline double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

/// Draws realizations with std::mt19937_64: one uniform per edge, inverted
/// against the cumulative outcome probabilities in listed order.
class RealizationSampler {
 public:
  explicit RealizationSampler(const MatchingInstance& inst) {
    for (const auto& e : inst.edges) {
      std::vector<double> cum;
      double acc = 0;
      for (const auto& o : e.outcomes) cum.push_back(acc += o.prob.to_double());
      cum_.push_back(std::move(cum));
    }
  }

  Realization draw(std::mt19937_64& gen) const {
    Realization r(cum_.size());
    for (std::size_t e = 0; e < cum_.size(); ++e) {
      const double u = uniform01(gen);
      std::size_t k = 0;
      while (k + 1 < cum_[e].size() && u >= cum_[e][k]) ++k;
      r[e] = k;
    }
    return r;
  }

 private:
  std::vector<std::vector<double>> cum_;
};

}  // namespace pandora
