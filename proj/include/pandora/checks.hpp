#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pandora/algorithms.hpp"
#include "pandora/oracle.hpp"
#include "pandora/scripted.hpp"

namespace pandora {

// Invariant checks over every realization of one instance. Each returns a
// count of violating realizations (zero means the property holds) or the
// two sides of an identity.

/// Realizations where any policy trace breaks the matching/inspection rules.
template <class Policy>
std::size_t trace_violations(const MatchingInstance& inst, const Policy& p, double bound = default_enum_bound()) {
  std::size_t bad = 0;
  for_each_realization(inst, bound, [&](const Realization& r, const Rational&) {
    try {
      check_trace(inst, r, p.run(r));
    } catch (const ValidationError&) {
      ++bad;
    }
  });
  return bad;
}

/// Realizations where some basket of a descending run is exposed.
template <class Descending>
std::size_t descending_exposures(const MatchingInstance& inst, const Descending& p, double bound = default_enum_bound()) {
  std::size_t bad = 0;
  for_each_realization(inst, bound, [&](const Realization& r, const Rational&) {
    const DescendingRun run = p.run_nested(r);
    for (std::size_t e = 0; e < run.traces.size(); ++e)
      if (!check_non_exposure(run.traces[e], p.baskets()[e])) {
        ++bad;
        break;
      }
  });
  return bad;
}

inline std::size_t vertex_exposures(const MatchingInstance& inst, double bound = default_enum_bound()) {
  const VertexBasedDescending p(inst);
  std::size_t bad = 0;
  for_each_realization(inst, bound, [&](const Realization& r, const Rational&) {
    if (!vertex_boxes_non_exposed(inst, p, r, p.run(r))) ++bad;
  });
  return bad;
}

/// Realizations where the descending matching differs from greedy on kappa^(1).
inline std::size_t greedy_mismatches(const MatchingInstance& inst, const Orientation& o, double bound = default_enum_bound()) {
  const OrientedDescending p(inst, o);
  std::size_t bad = 0;
  for_each_realization(inst, bound, [&](const Realization& r, const Rational&) {
    std::vector<int> claimed = p.run_nested(r).claimed;
    std::sort(claimed.begin(), claimed.end());
    if (claimed != greedy_matching(kappa_weights(inst, p, r)).edges) ++bad;
  });
  return bad;
}

/// Steps where the advanced basket lacks the largest gamma, or an idle
/// eligible basket has gamma different from its current index.
inline std::size_t gamma_violations(const MatchingInstance& inst, const Orientation& o, double bound = default_enum_bound()) {
  const OrientedDescending p(inst, o);
  std::size_t bad = 0;
  for_each_realization(inst, bound, [&](const Realization& r, const Rational&) {
    for (const auto& step : p.run_nested(r).steps) {
      Rational top = step.eligible.front().gamma;
      for (const auto& e : step.eligible) top = max(top, e.gamma);
      for (const auto& e : step.eligible)
        if (e.basket == step.basket ? e.gamma != top : e.gamma != e.sigma) ++bad;
    }
  });
  return bad;
}

/// Greedy total below half the maximum-weight total, on kappa^(1) weights.
inline std::size_t greedy_half_violations(const MatchingInstance& inst, const Orientation& o, double bound = default_enum_bound()) {
  const OrientedDescending p(inst, o);
  std::size_t bad = 0;
  for_each_realization(inst, bound, [&](const Realization& r, const Rational&) {
    const auto w = kappa_weights(inst, p, r);
    if (greedy_matching(w).total * Rational(2) < max_weight_matching(w).total) ++bad;
  });
  return bad;
}

struct Identity {
  Rational lhs;
  Rational rhs;
};

/// (expected welfare, E[sum of matched kappa^(1)]) of oriented descending.
inline Identity amortization(const MatchingInstance& inst, const Orientation& o, double bound = default_enum_bound()) {
  const OrientedDescending p(inst, o);
  return {expected_welfare(inst, p, EvalMode::exact(bound)).value, expected_matched_kappa(inst, p, bound)};
}

/// Opens the first box of every basket under `o`, then stops.
inline ScriptedPolicy open_first_boxes(const MatchingInstance& inst, const Orientation& o) {
  return {[&inst, o](const Realization& r) {
    TraceBuilder tb(inst, r);
    for (std::size_t e = 0; e < inst.edges.size(); ++e) tb.open(e, o.first(inst.edges[e]));
    return tb.finish();
  }};
}

/// (expected welfare, E[sum of claimed kappa^(1)]) for the exposed policy
/// above: claims nothing, so the right side is zero.
inline Identity exposed_amortization(const MatchingInstance& inst, const Orientation& o, double bound = default_enum_bound()) {
  const OrientedDescending p(inst, o);
  Rational w(0), k(0);
  for_each_realization(inst, bound, [&](const Realization& r, const Rational& pr) {
    const std::vector<int> leaves = p.leaves(r);
    for (std::size_t e = 0; e < leaves.size(); ++e) {
      const auto a = amortized_contribution({leaves[e], 1, false}, p.baskets()[e]);
      w += pr * a.welfare;
      k += pr * a.capped_bound;
    }
  });
  return {w, k};
}

struct CheckResult {
  std::string name;
  bool ok;
  std::string detail;
};

struct CheckOptions {
  double enum_bound = default_enum_bound();
  double state_bound = default_enum_bound();
  bool oracle = true;
};

namespace detail {

inline CheckResult count_check(std::string name, std::size_t bad) {
  return {std::move(name), bad == 0, bad == 0 ? "0 violations" : std::to_string(bad) + " violating realizations"};
}

inline CheckResult relation_check(std::string name, const Rational& lhs, const char* rel, const Rational& rhs) {
  const std::string r(rel);
  const bool ok = r == "=" ? lhs == rhs : (r == "<=" ? lhs <= rhs : lhs >= rhs);
  return {std::move(name), ok, lhs.str() + " " + r + " " + rhs.str()};
}

}  // namespace detail

/// The full invariant suite on one instance, with the canonical orientation
/// and its reverse standing in for O and its reverse.
inline std::vector<CheckResult> check_instance(const MatchingInstance& inst, const CheckOptions& opt = {}) {
  using detail::count_check;
  using detail::relation_check;
  std::vector<CheckResult> out;
  const double b = opt.enum_bound;
  const Orientation o = canonical_orientation(inst);
  const Orientation ro = reverse(o);
  const bool independent =
      std::all_of(inst.edges.begin(), inst.edges.end(), [](const EdgeSpec& e) { return e.is_independent(); });

  for (const auto& [tag, orient] : {std::pair{"O", &o}, std::pair{"reverse(O)", &ro}}) {
    const std::string t(tag);
    const OrientedDescending p(inst, *orient);
    out.push_back(count_check("trace rules, oriented descending " + t, trace_violations(inst, p, b)));
    out.push_back(count_check("non-exposure, oriented descending " + t, descending_exposures(inst, p, b)));
    out.push_back(count_check("greedy equivalence " + t, greedy_mismatches(inst, *orient, b)));
    out.push_back(count_check("gamma equality " + t, gamma_violations(inst, *orient, b)));
    out.push_back(count_check("greedy half of max matching " + t, greedy_half_violations(inst, *orient, b)));
    const Identity a = amortization(inst, *orient, b);
    out.push_back(relation_check("amortization equality " + t, a.lhs, "=", a.rhs));
  }
  const BundledDescending bd(inst);
  out.push_back(count_check("trace rules, bundled descending", trace_violations(inst, bd, b)));
  out.push_back(count_check("non-exposure, bundled descending", descending_exposures(inst, bd, b)));
  if (independent) {
    out.push_back(count_check("trace rules, vertex-based descending", trace_violations(inst, VertexBasedDescending(inst), b)));
    out.push_back(count_check("non-exposure, vertex-based descending", vertex_exposures(inst, b)));
  }
  if (!opt.oracle) return out;

  const Rational w_o = oriented_welfare(inst, o, b);
  const Rational w_r = oriented_welfare(inst, ro, b);
  const OptimalPolicy free_opt(inst, Constraint::free, std::nullopt, opt.state_bound);
  const Rational opt_free = free_opt.value();
  const Rational opt_o = optimal_welfare(inst, Constraint::oriented, o, opt.state_bound).value;
  const Rational opt_r = optimal_welfare(inst, Constraint::oriented, ro, opt.state_bound).value;
  const Rational quarter(1, 4);
  out.push_back(relation_check("oracle free >= 0", opt_free, ">=", Rational(0)));
  out.push_back(relation_check("oracle free >= oracle oriented O", opt_free, ">=", opt_o));
  out.push_back(relation_check("oracle oriented O >= W(O)", opt_o, ">=", w_o));
  out.push_back(relation_check("oracle free >= oracle oriented reverse(O)", opt_free, ">=", opt_r));
  out.push_back(relation_check("oracle oriented reverse(O) >= W(reverse(O))", opt_r, ">=", w_r));
  out.push_back(relation_check("2 W(O) >= oracle oriented O", w_o * Rational(2), ">=", opt_o));
  out.push_back(relation_check("2 W(reverse(O)) >= oracle oriented reverse(O)", w_r * Rational(2), ">=", opt_r));
  out.push_back(relation_check("opt bound: oracle free <= 2 W(O) + 2 W(reverse(O))", opt_free, "<=",
                               Rational(2) * (w_o + w_r)));
  const WelfareEstimate rnd = randomized_matching(inst, EvalMode::exact(b));
  if (rnd.exact) out.push_back(relation_check("randomized >= oracle free / 4", rnd.value, ">=", quarter * opt_free));
  out.push_back(relation_check("best of two >= oracle free / 4", best_of_two(inst, b).welfare, ">=", quarter * opt_free));
  out.push_back(relation_check("oracle free replay equals its value",
                               expected_welfare(inst, free_opt, EvalMode::exact(b)).value, "=", opt_free));
  if (independent && validate(inst).positive_values)
    out.push_back(relation_check("vertex-based >= oracle free / 4 (positive values)",
                                 expected_welfare(inst, VertexBasedDescending(inst), EvalMode::exact(b)).value, ">=",
                                 quarter * opt_free));
  return out;
}

}  // namespace pandora
