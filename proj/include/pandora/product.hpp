#pragma once

#include <cstdlib>
#include <span>
#include <string>
#include <vector>

#include "pandora/errors.hpp"

namespace pandora {

inline constexpr double kDefaultEnumBound = 2e6;

/// Enumeration bound from PANDORA_ENUM_BOUND, or the default.
inline double default_enum_bound() {
  if (const char* env = std::getenv("PANDORA_ENUM_BOUND")) {
    try {
      const double v = std::stod(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return kDefaultEnumBound;
}

inline double product_size(std::span<const std::size_t> radix) {
  double n = 1;
  for (std::size_t r : radix) n *= static_cast<double>(r);
  return n;
}

/// Calls f(idx) for every tuple idx with 0 <= idx[k] < radix[k], in
/// lexicographic order (last coordinate fastest).
template <class F>
void for_each_product(std::span<const std::size_t> radix, double bound, F&& f) {
  const double total = product_size(radix);
  if (total > bound)
    throw BoundExceeded("enumeration of " + std::to_string(static_cast<long double>(total)) +
                            " outcomes exceeds the bound",
                        total, bound);
  for (std::size_t r : radix)
    if (r == 0) return;
  std::vector<std::size_t> idx(radix.size(), 0);
  for (;;) {
    f(std::span<const std::size_t>(idx));
    std::size_t k = idx.size();
    while (k > 0) {
      --k;
      if (++idx[k] < radix[k]) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (idx.empty()) return;
  }
}

}  // namespace pandora
