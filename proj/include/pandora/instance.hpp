#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "pandora/box.hpp"
#include "pandora/nested.hpp"

namespace pandora {

using VertexId = std::string;
using DirectedPair = std::pair<VertexId, VertexId>;

/// One outcome of an edge's joint law: the signal seen at each endpoint and
/// the total value of matching the edge.
struct JointOutcome {
  std::string label_i;
  std::string label_j;
  Rational total;
  Rational prob;

  friend bool operator==(const JointOutcome&, const JointOutcome&) = default;
};

/// An undirected edge {i, j} with one box per ordered pair.
///
/// The joint outcome list is always populated. Edges built from two
/// independent boxes also keep the boxes, and their outcome k is
/// (a, b) = (k / |D_ji|, k % |D_ji|) over the sorted supports.
struct EdgeSpec {
  VertexId i;
  VertexId j;
  Rational cost_ij;
  Rational cost_ji;
  std::vector<JointOutcome> outcomes;
  std::optional<PandoraBox> box_ij;
  std::optional<PandoraBox> box_ji;

  static EdgeSpec independent(VertexId i, VertexId j, PandoraBox bij, PandoraBox bji) {
    EdgeSpec e;
    e.i = std::move(i);
    e.j = std::move(j);
    e.cost_ij = bij.cost;
    e.cost_ji = bji.cost;
    for (const Atom& a : bij.dist.atoms())
      for (const Atom& b : bji.dist.atoms())
        e.outcomes.push_back({a.value.str(), b.value.str(), a.value + b.value, a.prob * b.prob});
    e.box_ij = std::move(bij);
    e.box_ji = std::move(bji);
    return e;
  }

  static EdgeSpec joint(VertexId i, VertexId j, Rational cij, Rational cji, std::vector<JointOutcome> outcomes) {
    EdgeSpec e;
    e.i = std::move(i);
    e.j = std::move(j);
    e.cost_ij = std::move(cij);
    e.cost_ji = std::move(cji);
    e.outcomes = std::move(outcomes);
    return e;
  }

  bool is_independent() const noexcept { return box_ij.has_value() && box_ji.has_value(); }
  std::size_t outcome_count() const noexcept { return outcomes.size(); }

  bool has_endpoint(const VertexId& v) const { return v == i || v == j; }
  const VertexId& other(const VertexId& v) const { return v == i ? j : i; }

  /// Cost of the box at `from` on this edge.
  const Rational& cost_at(const VertexId& from) const {
    if (from == i) return cost_ij;
    if (from == j) return cost_ji;
    throw DomainError("vertex '" + from + "' is not an endpoint of edge {" + i + "," + j + "}");
  }

  /// Endpoint signal labels in order of first appearance.
  std::vector<std::string> labels_at(const VertexId& from) const {
    const bool at_i = from == i;
    if (!at_i && from != j) throw DomainError("vertex '" + from + "' is not an endpoint of edge {" + i + "," + j + "}");
    std::vector<std::string> out;
    for (const auto& o : outcomes) {
      const std::string& l = at_i ? o.label_i : o.label_j;
      if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    }
    return out;
  }

  /// (v_ij, v_ji) in outcome k; independent edges only.
  std::pair<Rational, Rational> values(std::size_t k) const {
    if (!is_independent())
      throw UnsupportedModel("edge {" + i + "," + j + "} is a joint law without per-endpoint values");
    const std::size_t nb = box_ji->dist.size();
    return {box_ij->dist.atoms()[k / nb].value, box_ji->dist.atoms()[k % nb].value};
  }

  /// Law of the total value, the value of the bundled box.
  DiscreteDistribution total_law() const {
    std::vector<Atom> atoms;
    for (const auto& o : outcomes) atoms.push_back({o.total, o.prob});
    return DiscreteDistribution(std::move(atoms));
  }

  PandoraBox bundled_box() const { return PandoraBox(total_law(), cost_ij + cost_ji); }
};

struct MatchingInstance {
  std::vector<VertexId> vertices;
  std::vector<EdgeSpec> edges;

  std::size_t edge_count() const noexcept { return edges.size(); }

  int find_edge(const VertexId& u, const VertexId& v) const {
    for (std::size_t e = 0; e < edges.size(); ++e)
      if ((edges[e].i == u && edges[e].j == v) || (edges[e].i == v && edges[e].j == u)) return static_cast<int>(e);
    return -1;
  }

  bool adjacent(std::size_t e, std::size_t f) const {
    const EdgeSpec& a = edges[e];
    const EdgeSpec& b = edges[f];
    return a.has_endpoint(b.i) || a.has_endpoint(b.j);
  }
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> errors;
  bool positive_values = false;  // every edge independent, supports >= 0, E[v] >= c
};

inline ValidationReport validate(const MatchingInstance& inst) {
  ValidationReport rep;
  auto fail = [&](std::size_t e, const std::string& msg) {
    rep.ok = false;
    rep.errors.push_back("edge " + std::to_string(e) + ": " + msg);
  };
  const std::set<VertexId> vs(inst.vertices.begin(), inst.vertices.end());
  if (vs.size() != inst.vertices.size()) {
    rep.ok = false;
    rep.errors.push_back("duplicate vertex id");
  }
  std::set<std::pair<VertexId, VertexId>> seen;
  bool positive = true;
  for (std::size_t e = 0; e < inst.edges.size(); ++e) {
    const EdgeSpec& ed = inst.edges[e];
    if (ed.i == ed.j) fail(e, "self-loop at '" + ed.i + "'");
    if (!vs.count(ed.i)) fail(e, "unknown vertex '" + ed.i + "'");
    if (!vs.count(ed.j)) fail(e, "unknown vertex '" + ed.j + "'");
    if (!seen.insert(std::minmax(ed.i, ed.j)).second) fail(e, "duplicate edge {" + ed.i + "," + ed.j + "}");
    if (ed.cost_ij.sign() < 0) fail(e, "negative cost c_ij = " + ed.cost_ij.str());
    if (ed.cost_ji.sign() < 0) fail(e, "negative cost c_ji = " + ed.cost_ji.str());
    if (ed.outcomes.empty()) fail(e, "no outcomes");
    Rational total(0);
    std::map<std::pair<std::string, std::string>, Rational> totals;
    for (const auto& o : ed.outcomes) {
      if (o.prob.sign() <= 0) fail(e, "outcome (" + o.label_i + "," + o.label_j + ") has non-positive probability");
      total += o.prob;
      auto [it, fresh] = totals.emplace(std::make_pair(o.label_i, o.label_j), o.total);
      if (!fresh && it->second != o.total)
        fail(e, "outcome (" + o.label_i + "," + o.label_j + ") listed with different totals");
    }
    if (!ed.outcomes.empty() && total != Rational(1)) fail(e, "probabilities sum to " + total.str());
    if (ed.is_independent()) {
      for (const PandoraBox* b : {&*ed.box_ij, &*ed.box_ji})
        if (b->dist.min_value().sign() < 0 || expectation(b->dist) < b->cost) positive = false;
    } else {
      positive = false;
    }
  }
  rep.positive_values = rep.ok && positive;
  return rep;
}

/// Canonical form: each edge has i < j (boxes, costs and labels swapped as
/// needed), duplicate joint outcomes merged, edges sorted by (i, j) and the
/// vertex list sorted. Throws ValidationError if the instance is invalid.
inline MatchingInstance normalize(MatchingInstance inst) {
  for (const auto& e : inst.edges)
    for (const VertexId* v : {&e.i, &e.j})
      if (std::find(inst.vertices.begin(), inst.vertices.end(), *v) == inst.vertices.end()) inst.vertices.push_back(*v);
  const ValidationReport rep = validate(inst);
  if (!rep.ok) throw ValidationError("invalid instance: " + rep.errors.front(), rep.errors);

  std::sort(inst.vertices.begin(), inst.vertices.end());
  for (EdgeSpec& e : inst.edges) {
    if (e.j < e.i) {
      std::swap(e.i, e.j);
      std::swap(e.cost_ij, e.cost_ji);
      std::swap(e.box_ij, e.box_ji);
      if (e.is_independent()) {
        e = EdgeSpec::independent(e.i, e.j, *e.box_ij, *e.box_ji);
      } else {
        for (auto& o : e.outcomes) std::swap(o.label_i, o.label_j);
      }
    }
    std::vector<JointOutcome> merged;
    for (const auto& o : e.outcomes) {
      auto it = std::find_if(merged.begin(), merged.end(), [&](const JointOutcome& m) {
        return m.label_i == o.label_i && m.label_j == o.label_j;
      });
      if (it == merged.end())
        merged.push_back(o);
      else
        it->prob += o.prob;
    }
    e.outcomes = std::move(merged);
  }
  std::sort(inst.edges.begin(), inst.edges.end(),
            [](const EdgeSpec& a, const EdgeSpec& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  return inst;
}

// ---------------------------------------------------------------------------
// Orientations

/// A set of directed pairs, one per edge, naming the endpoint inspected first.
class Orientation {
 public:
  Orientation() = default;
  explicit Orientation(std::set<DirectedPair> pairs) : pairs_(std::move(pairs)) {}

  const std::set<DirectedPair>& pairs() const noexcept { return pairs_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  bool contains(const VertexId& u, const VertexId& v) const { return pairs_.count({u, v}) > 0; }
  void insert(VertexId u, VertexId v) { pairs_.insert({std::move(u), std::move(v)}); }

  /// First endpoint of `e` under this orientation.
  const VertexId& first(const EdgeSpec& e) const {
    if (contains(e.i, e.j)) return e.i;
    if (contains(e.j, e.i)) return e.j;
    throw ValidationError("orientation does not cover edge {" + e.i + "," + e.j + "}");
  }

  friend bool operator==(const Orientation&, const Orientation&) = default;

 private:
  std::set<DirectedPair> pairs_;
};

inline Orientation reverse(const Orientation& o) {
  std::set<DirectedPair> r;
  for (const auto& [u, v] : o.pairs()) r.insert({v, u});
  return Orientation(std::move(r));
}

/// Every edge directed from its lexicographically smaller endpoint.
inline Orientation canonical_orientation(const MatchingInstance& inst) {
  Orientation o;
  for (const auto& e : inst.edges) {
    const auto [lo, hi] = std::minmax(e.i, e.j);
    o.insert(lo, hi);
  }
  return o;
}

/// Throws ValidationError unless `o` has exactly one direction per edge and nothing else.
inline void check_orients(const Orientation& o, const MatchingInstance& inst) {
  std::vector<std::string> issues;
  std::size_t covered = 0;
  for (const auto& e : inst.edges) {
    const bool fwd = o.contains(e.i, e.j);
    const bool bwd = o.contains(e.j, e.i);
    if (fwd && bwd) issues.push_back("edge {" + e.i + "," + e.j + "} oriented both ways");
    if (!fwd && !bwd) issues.push_back("edge {" + e.i + "," + e.j + "} not oriented");
    covered += static_cast<std::size_t>(fwd) + static_cast<std::size_t>(bwd);
  }
  if (covered != o.size()) issues.push_back("orientation names pairs that are not edges");
  if (!issues.empty()) throw ValidationError("invalid orientation: " + issues.front(), issues);
}

/// Orientation given by one bit per edge: bit set means (j, i).
inline Orientation orientation_from_bits(const MatchingInstance& inst, std::uint64_t bits) {
  Orientation o;
  for (std::size_t e = 0; e < inst.edges.size(); ++e) {
    const auto& ed = inst.edges[e];
    if ((bits >> e) & 1U)
      o.insert(ed.j, ed.i);
    else
      o.insert(ed.i, ed.j);
  }
  return o;
}

/// The edge as a two-stage basket inspected from `from`: the first box
/// reveals the signal at `from`, the second reveals the total.
inline OutcomeNode edge_to_basket(const EdgeSpec& e, const VertexId& from) {
  const bool at_i = from == e.i;
  const VertexId& to = e.other(from);
  OutcomeNode root = OutcomeNode::stage(e.cost_at(from));
  for (const std::string& first : e.labels_at(from)) {
    Rational marginal(0);
    for (const auto& o : e.outcomes)
      if ((at_i ? o.label_i : o.label_j) == first) marginal += o.prob;
    OutcomeNode mid = OutcomeNode::stage(e.cost_at(to));
    for (const auto& o : e.outcomes)
      if ((at_i ? o.label_i : o.label_j) == first)
        mid.branch(at_i ? o.label_j : o.label_i, o.prob / marginal, OutcomeNode::leaf(o.total));
    root.branch(first, marginal, std::move(mid));
  }
  return root;
}

}  // namespace pandora
