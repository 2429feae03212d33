#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pandora/algorithms.hpp"
#include "pandora/instance.hpp"
#include "pandora/oracle.hpp"
#include "pandora/scripted.hpp"

namespace pandora {

struct ExpectedEntry {
  std::string quantity;
  Rational expected;
  std::string relation;  // "=", "<=" or ">=": computed <relation> expected
  std::function<Rational(const MatchingInstance&)> compute;
};

struct NamedInstance {
  std::string name;
  std::map<std::string, Rational> params;
  MatchingInstance instance;
  std::vector<ExpectedEntry> expected;
};

struct ReportRow {
  std::string instance;
  std::string quantity;
  Rational computed;
  Rational expected;
  std::string relation;
  bool ok;
};

inline bool holds(const Rational& computed, const std::string& rel, const Rational& expected) {
  if (rel == "=") return computed == expected;
  if (rel == "<=") return computed <= expected;
  if (rel == ">=") return computed >= expected;
  throw DomainError("unknown relation '" + rel + "'");
}

inline std::vector<ReportRow> evaluate(const NamedInstance& ni) {
  std::vector<ReportRow> rows;
  for (const auto& e : ni.expected) {
    const Rational c = e.compute(ni.instance);
    rows.push_back({ni.name, e.quantity, c, e.expected, e.relation, holds(c, e.relation, e.expected)});
  }
  return rows;
}

namespace detail {

inline DiscreteDistribution two_point(const Rational& hi, const Rational& p_hi, const Rational& lo) {
  if (p_hi == Rational(1)) return DiscreteDistribution::point(hi);
  return DiscreteDistribution({{hi, p_hi}, {lo, Rational(1) - p_hi}});
}

inline void require_alpha(const Rational& alpha) {
  if (alpha.sign() <= 0 || alpha >= Rational(1))
    throw DomainError("alpha must lie strictly between 0 and 1, got " + alpha.str());
}

inline std::string param_suffix(const std::string& key, const Rational& v) { return key + "=" + v.str(); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Bundled star

inline MatchingInstance bundled_star_instance(long n) {
  if (n < 1) throw DomainError("bundled star needs n >= 1");
  MatchingInstance inst;
  inst.vertices.push_back("u");
  const PandoraBox center(detail::two_point(Rational(n), Rational(1, n), Rational(0)), Rational(1, n));
  const PandoraBox leaf(DiscreteDistribution::point(Rational(1)), Rational(1));
  for (long k = 1; k <= n; ++k) {
    const VertexId w = "w" + std::to_string(k);
    inst.vertices.push_back(w);
    inst.edges.push_back(EdgeSpec::independent("u", w, center, leaf));
  }
  return normalize(std::move(inst));
}

/// Opens every center box, then on the first edge whose center box shows a
/// hit opens the leaf box and matches.
inline ScriptedPolicy star_inspect_all_centers(const MatchingInstance& inst) {
  return {[&inst](const Realization& r) {
    TraceBuilder tb(inst, r);
    for (std::size_t e = 0; e < inst.edges.size(); ++e) tb.open(e, "u");
    for (std::size_t e = 0; e < inst.edges.size(); ++e) {
      const auto [vu, vw] = tb.values(e);
      if (vu.sign() > 0) {
        tb.open(e, inst.edges[e].other("u"));
        tb.match(e);
        break;
      }
    }
    return tb.finish();
  }};
}

inline Rational star_policy_closed_form(long n) {
  const Rational miss = pow(Rational(n - 1, n), static_cast<unsigned>(n));
  return (Rational(1) - miss) * Rational(n) - Rational(1);
}

inline NamedInstance bundled_star(long n) {
  NamedInstance ni{"bundled_star(n=" + std::to_string(n) + ")", {{"n", Rational(n)}}, bundled_star_instance(n), {}};
  ni.expected.push_back({"bundled index", Rational(1) - Rational(1, n), "=", [](const MatchingInstance& inst) {
                           return weitzman_index(inst.edges.front().bundled_box());
                         }});
  ni.expected.push_back({"oracle bundled OPT", Rational(1), "<=", [](const MatchingInstance& inst) {
                           return optimal_welfare(inst, Constraint::bundled).value;
                         }});
  ni.expected.push_back({"bundled descending welfare", Rational(1), "<=", [](const MatchingInstance& inst) {
                           return expected_welfare(inst, BundledDescending(inst)).value;
                         }});
  ni.expected.push_back({"inspect-all-centers welfare", star_policy_closed_form(n), "=",
                         [](const MatchingInstance& inst) {
                           return expected_welfare(inst, star_inspect_all_centers(inst)).value;
                         }});
  if (n <= 5)
    ni.expected.push_back({"oracle free OPT", star_policy_closed_form(n), ">=", [](const MatchingInstance& inst) {
                             return optimal_welfare(inst, Constraint::free).value;
                           }});
  return ni;
}

// ---------------------------------------------------------------------------
// Indistinguishable edge

/// The edge with v_ij in {9 w.p. 1/8, -3} and v_ji = 2, both boxes costing 1.
/// `i` and `j` name the two endpoints; swapping the names changes which box
/// a lexicographic tie-break reaches first.
inline MatchingInstance indistinguishable_edge_instance(const VertexId& i = "i", const VertexId& j = "j") {
  MatchingInstance inst;
  inst.vertices = {i, j};
  inst.edges.push_back(EdgeSpec::independent(
      i, j, PandoraBox(detail::two_point(Rational(9), Rational(1, 8), Rational(-3)), Rational(1)),
      PandoraBox(DiscreteDistribution::point(Rational(2)), Rational(1))));
  return normalize(std::move(inst));
}

/// Vertex holding the box with the risky value.
inline const VertexId& risky_vertex(const EdgeSpec& e) { return e.box_ij->dist.size() > 1 ? e.i : e.j; }

/// Inspect the risky side; continue and match only on the high value.
inline ScriptedPolicy risky_side_first(const MatchingInstance& inst) {
  return {[&inst](const Realization& r) {
    TraceBuilder tb(inst, r);
    const EdgeSpec& e = inst.edges.front();
    const VertexId& a = risky_vertex(e);
    tb.open(0, a);
    const auto [vi, vj] = tb.values(0);
    if ((a == e.i ? vi : vj).sign() > 0) {
      tb.open(0, e.other(a));
      tb.match(0);
    }
    return tb.finish();
  }};
}

/// Inspect the deterministic side, then the risky side, and match iff the total is positive.
inline ScriptedPolicy safe_side_then_risky(const MatchingInstance& inst) {
  return {[&inst](const Realization& r) {
    TraceBuilder tb(inst, r);
    const EdgeSpec& e = inst.edges.front();
    const VertexId& a = risky_vertex(e);
    tb.open(0, e.other(a));
    tb.open(0, a);
    if (tb.total(0).sign() > 0) tb.match(0);
    return tb.finish();
  }};
}

/// Inspect the deterministic side only.
inline ScriptedPolicy safe_side_only(const MatchingInstance& inst) {
  return {[&inst](const Realization& r) {
    TraceBuilder tb(inst, r);
    tb.open(0, inst.edges.front().other(risky_vertex(inst.edges.front())));
    return tb.finish();
  }};
}

inline NamedInstance indistinguishable_edge() {
  NamedInstance ni{"indistinguishable_edge", {}, indistinguishable_edge_instance(), {}};
  ni.expected.push_back({"sigma_ij", Rational(1), "=", [](const MatchingInstance& inst) {
                           return weitzman_index(*inst.edges[0].box_ij);
                         }});
  ni.expected.push_back({"sigma_ji", Rational(1), "=", [](const MatchingInstance& inst) {
                           return weitzman_index(*inst.edges[0].box_ji);
                         }});
  ni.expected.push_back({"oracle free OPT", Rational(1, 4), "=", [](const MatchingInstance& inst) {
                           return optimal_welfare(inst, Constraint::free).value;
                         }});
  ni.expected.push_back({"i-first welfare", Rational(1, 4), "=", [](const MatchingInstance& inst) {
                           return expected_welfare(inst, risky_side_first(inst)).value;
                         }});
  ni.expected.push_back({"j-then-i welfare", Rational(-5, 8), "=", [](const MatchingInstance& inst) {
                           return expected_welfare(inst, safe_side_then_risky(inst)).value;
                         }});
  ni.expected.push_back({"j-only welfare", Rational(-1), "=", [](const MatchingInstance& inst) {
                           return expected_welfare(inst, safe_side_only(inst)).value;
                         }});
  ni.expected.push_back({"vertex-based welfare, i reached first", Rational(1, 4), "=",
                         [](const MatchingInstance& inst) {
                           return expected_welfare(inst, VertexBasedDescending(inst)).value;
                         }});
  // Relabel so the deterministic box wins the tie. Having seen 2 > sigma_ji = 1,
  // a non-exposed policy must match: -2 + 2 + E[v_ij] = -3/2.
  ni.expected.push_back({"vertex-based welfare, j reached first", Rational(-3, 2), "=",
                         [](const MatchingInstance& inst) {
                           const auto& e = inst.edges[0];
                           const VertexId risky = risky_vertex(e);
                           const MatchingInstance swapped = indistinguishable_edge_instance("z" + risky, e.other(risky));
                           return expected_welfare(swapped, VertexBasedDescending(swapped)).value;
                         }});
  return ni;
}

// ---------------------------------------------------------------------------
// No-dessert edge and star

/// Box at i: 1/alpha^3 w.p. alpha, else 0, cost 1.
inline PandoraBox no_dessert_box_i(const Rational& alpha) {
  return PandoraBox(detail::two_point(Rational(1) / pow(alpha, 3), alpha, Rational(0)), Rational(1));
}

/// Box at j: 0 w.p. alpha^2, else 1/alpha - 1/alpha^3, cost 1 - alpha.
inline PandoraBox no_dessert_box_j(const Rational& alpha) {
  return PandoraBox(detail::two_point(Rational(0), pow(alpha, 2), Rational(1) / alpha - Rational(1) / pow(alpha, 3)),
                    Rational(1) - alpha);
}

inline MatchingInstance no_dessert_edge_instance(const Rational& alpha) {
  detail::require_alpha(alpha);
  MatchingInstance inst;
  inst.vertices = {"i", "j"};
  inst.edges.push_back(EdgeSpec::independent("i", "j", no_dessert_box_i(alpha), no_dessert_box_j(alpha)));
  return normalize(std::move(inst));
}

/// Center i with outside option k (v_ik = 1/alpha, v_ki = 0, no costs) and
/// m copies {i, j1}, ..., {i, jm} of the no-dessert edge.
inline MatchingInstance no_dessert_star_instance(const Rational& alpha, long m) {
  detail::require_alpha(alpha);
  if (m < 0) throw DomainError("number of copies must be non-negative");
  MatchingInstance inst;
  inst.vertices = {"i", "k"};
  inst.edges.push_back(EdgeSpec::independent("i", "k", PandoraBox(DiscreteDistribution::point(Rational(1) / alpha), Rational(0)),
                                             PandoraBox(DiscreteDistribution::point(Rational(0)), Rational(0))));
  for (long t = 1; t <= m; ++t) {
    const VertexId j = "j" + std::to_string(t);
    inst.vertices.push_back(j);
    inst.edges.push_back(EdgeSpec::independent("i", j, no_dessert_box_i(alpha), no_dessert_box_j(alpha)));
  }
  return normalize(std::move(inst));
}

/// Every copy oriented (j, i); the outside-option edge keeps (i, k).
inline Orientation copies_from_leaf(const MatchingInstance& inst) {
  Orientation o;
  for (const auto& e : inst.edges) {
    if (e.has_endpoint("k"))
      o.insert("i", "k");
    else
      o.insert(e.other("i"), "i");
  }
  return o;
}

/// Walks the copies in order: inspect j, continue to i only if v_ji = 0,
/// match on a success; with no success take the outside option.
inline ScriptedPolicy iterate_copies_from_leaf(const MatchingInstance& inst) {
  return {[&inst](const Realization& r) {
    TraceBuilder tb(inst, r);
    for (std::size_t e = 0; e < inst.edges.size(); ++e) {
      const EdgeSpec& ed = inst.edges[e];
      if (ed.has_endpoint("k")) continue;
      const VertexId& leaf = ed.other("i");
      tb.open(e, leaf);
      const auto [vi, vj] = tb.values(e);
      if (vj.sign() != 0) continue;
      tb.open(e, "i");
      if (vi.sign() > 0) {
        tb.match(e);
        return tb.finish();
      }
    }
    const int k = inst.find_edge("i", "k");
    tb.open(static_cast<std::size_t>(k), "i");
    tb.open(static_cast<std::size_t>(k), "k");
    tb.match(static_cast<std::size_t>(k));
    return tb.finish();
  }};
}

inline NamedInstance no_dessert_edge(const Rational& alpha) {
  const Rational one(1);
  NamedInstance ni{"no_dessert_edge(" + detail::param_suffix("alpha", alpha) + ")", {{"alpha", alpha}},
                   no_dessert_edge_instance(alpha), {}};
  ni.expected.push_back({"sigma_ij^(1)", one / alpha - one, "=", [](const MatchingInstance& inst) {
                           return annotate(edge_to_basket(inst.edges[0], "i")).root().sigma;
                         }});
  ni.expected.push_back({"sigma_ji^(1)", one / pow(alpha, 2) - one / alpha, "=", [](const MatchingInstance& inst) {
                           return annotate(edge_to_basket(inst.edges[0], "j")).root().sigma;
                         }});
  const Orientation ij(std::set<DirectedPair>{{"i", "j"}});
  const Orientation ji(std::set<DirectedPair>{{"j", "i"}});
  ni.expected.push_back({"W(i,j) oriented descending", one - alpha, "=", [ij](const MatchingInstance& inst) {
                           return oriented_welfare(inst, ij);
                         }});
  ni.expected.push_back({"W(j,i) oriented descending", alpha - pow(alpha, 2), "=", [ji](const MatchingInstance& inst) {
                           return oriented_welfare(inst, ji);
                         }});
  ni.expected.push_back({"oracle oriented (i,j)", one - alpha, "=", [ij](const MatchingInstance& inst) {
                           return optimal_welfare(inst, Constraint::oriented, ij).value;
                         }});
  ni.expected.push_back({"oracle oriented (j,i)", alpha - pow(alpha, 2), "=", [ji](const MatchingInstance& inst) {
                           return optimal_welfare(inst, Constraint::oriented, ji).value;
                         }});
  ni.expected.push_back({"oracle free OPT", one - alpha, "=", [](const MatchingInstance& inst) {
                           return optimal_welfare(inst, Constraint::free).value;
                         }});
  ni.expected.push_back({"best-of-two welfare", one - alpha, "=", [](const MatchingInstance& inst) {
                           return best_of_two(inst).welfare;
                         }});
  ni.expected.push_back({"edge-based rule orients (j,i) [1 = yes]", one, "=", [](const MatchingInstance& inst) {
                           return Rational(edge_based_orientation(inst).contains("j", "i") ? 1 : 0);
                         }});
  ni.expected.push_back({"edge-based welfare / best-of-two", alpha, "=", [](const MatchingInstance& inst) {
                           return oriented_welfare(inst, edge_based_orientation(inst)) / best_of_two(inst).welfare;
                         }});
  return ni;
}

/// Sum over copies t = 1..m of P(no success among the first t - 1 copies).
inline Rational copies_reached(const Rational& alpha, long m) {
  Rational s(0);
  for (long t = 0; t < m; ++t) s += pow(Rational(1) - pow(alpha, 3), static_cast<unsigned>(t));
  return s;
}

inline NamedInstance no_dessert_star(const Rational& alpha, long m) {
  const Rational one(1);
  NamedInstance ni{"no_dessert_star(" + detail::param_suffix("alpha", alpha) + ",m=" + std::to_string(m) + ")",
                   {{"alpha", alpha}, {"m", Rational(m)}},
                   no_dessert_star_instance(alpha, m),
                   {}};
  ni.expected.push_back({"descending, copies (i,j)", one / alpha, "=", [](const MatchingInstance& inst) {
                           Orientation o;
                           for (const auto& e : inst.edges) o.insert("i", e.other("i"));
                           return oriented_welfare(inst, o);
                         }});
  if (m == 0) {
    ni.expected.push_back({"oracle free OPT", one / alpha, "=", [](const MatchingInstance& inst) {
                             return optimal_welfare(inst, Constraint::free).value;
                           }});
    return ni;
  }
  ni.expected.push_back({"per-copy gain, iterate (j,i)", alpha - Rational(2) * pow(alpha, 2), "=",
                         [alpha, m](const MatchingInstance& inst) {
                           const Rational w = expected_welfare(inst, iterate_copies_from_leaf(inst)).value;
                           return (w - Rational(1) / alpha) / copies_reached(alpha, m);
                         }});
  ni.expected.push_back({"descending, copies (j,i) minus E[max capped value]", Rational(0), "=",
                         [](const MatchingInstance& inst) {
                           const OrientedDescending p(inst, copies_from_leaf(inst));
                           std::vector<AnnotatedBasket> bs = p.baskets();
                           return oriented_welfare(inst, copies_from_leaf(inst)) - expected_selection(bs).max_capped;
                         }});
  // All copies reversed beats the canonical world strictly once alpha < 1/2.
  const bool strict = alpha < Rational(1, 2);
  ni.expected.push_back({std::string("best-of-two picks the reversed world [1 = yes") + (strict ? "]" : ", tie keeps canonical]"),
                         Rational(strict ? 1 : 0), "=", [](const MatchingInstance& inst) {
                           const BestOfTwo b = best_of_two(inst);
                           return Rational(b.chosen == reverse(canonical_orientation(inst)) ? 1 : 0);
                         }});
  return ni;
}

// ---------------------------------------------------------------------------
// Suite

struct ReproOptions {
  std::optional<std::string> only;  // instance family: bundled_star, indistinguishable_edge, no_dessert_edge, no_dessert_star
  std::vector<Rational> alphas{Rational(1, 2), Rational(1, 4), Rational(1, 8)};
  std::vector<long> ns{2, 4, 8};
  long m = 2;
};

inline const std::vector<std::string>& repro_families() {
  static const std::vector<std::string> f{"bundled_star", "indistinguishable_edge", "no_dessert_edge", "no_dessert_star"};
  return f;
}

inline std::vector<NamedInstance> repro_suite(const ReproOptions& opt = {}) {
  if (opt.only && std::find(repro_families().begin(), repro_families().end(), *opt.only) == repro_families().end())
    throw ValidationError("unknown instance family '" + *opt.only + "'");
  auto want = [&](const std::string& f) { return !opt.only || *opt.only == f; };
  std::vector<NamedInstance> out;
  if (want("bundled_star"))
    for (long n : opt.ns) out.push_back(bundled_star(n));
  if (want("indistinguishable_edge")) out.push_back(indistinguishable_edge());
  if (want("no_dessert_edge"))
    for (const Rational& a : opt.alphas) out.push_back(no_dessert_edge(a));
  if (want("no_dessert_star"))
    for (const Rational& a : opt.alphas) out.push_back(no_dessert_star(a, opt.m));
  return out;
}

inline std::vector<ReportRow> report(const std::vector<NamedInstance>& suite) {
  std::vector<ReportRow> rows;
  for (const auto& ni : suite) {
    auto r = evaluate(ni);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return rows;
}

}  // namespace pandora
