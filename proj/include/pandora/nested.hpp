#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pandora/box.hpp"
#include "pandora/distribution.hpp"
#include "pandora/product.hpp"

namespace pandora {

struct Signal {
  std::string label;
  Rational prob;
};

/// A node of a basket's outcome tree.
///
/// Internal nodes carry the cost of the box opened from that node and one child
/// per possible signal; leaves carry the basket's final value. Depth may differ
/// between paths, and costs may differ between nodes of the same stage.
struct OutcomeNode {
  Rational cost;
  std::optional<Rational> value;
  std::vector<Signal> signals;
  std::vector<OutcomeNode> children;

  static OutcomeNode leaf(Rational v) {
    OutcomeNode n;
    n.value = std::move(v);
    return n;
  }

  static OutcomeNode stage(Rational cost) {
    OutcomeNode n;
    n.cost = std::move(cost);
    return n;
  }

  OutcomeNode& branch(std::string label, Rational prob, OutcomeNode child) & {
    signals.push_back({std::move(label), std::move(prob)});
    children.push_back(std::move(child));
    return *this;
  }
  OutcomeNode&& branch(std::string label, Rational prob, OutcomeNode child) && {
    return std::move(branch(std::move(label), std::move(prob), std::move(child)));
  }

  bool is_leaf() const noexcept { return value.has_value(); }
};

/// One-stage basket equivalent to a classic box: a branch per support point.
inline OutcomeNode box_basket(const PandoraBox& box) {
  OutcomeNode root = OutcomeNode::stage(box.cost);
  for (const Atom& a : box.dist.atoms()) root.branch(a.value.str(), a.prob, OutcomeNode::leaf(a.value));
  return root;
}

struct BasketNode {
  int parent = -1;
  int depth = 0;       // boxes opened to reach this node
  std::string label;   // signal on the branch into this node
  Rational prob{1};    // conditional probability of that branch
  Rational cost;       // internal: cost of the box opened from here
  std::optional<Rational> value;
  std::vector<int> children;
  Rational sigma;      // internal: index of the next box; leaf: the value
  std::optional<DiscreteDistribution> kappa_next;  // internal: law of the next capped value
  DiscreteDistribution kappa;                      // law of this stage's capped value

  bool is_leaf() const noexcept { return value.has_value(); }
};

/// Outcome tree with every nested index and capped-value law attached.
/// Node 0 is the root; nodes are stored in preorder.
class AnnotatedBasket {
 public:
  std::size_t size() const noexcept { return nodes_.size(); }
  const BasketNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const BasketNode& root() const { return nodes_.front(); }
  const std::vector<int>& leaves() const noexcept { return leaves_; }

  /// Unconditional probability of reaching node `id`.
  const Rational& reach_probability(int id) const { return reach_.at(static_cast<std::size_t>(id)); }

  std::vector<int> path(int leaf) const {
    std::vector<int> p;
    for (int n = leaf; n >= 0; n = node(n).parent) p.push_back(n);
    std::reverse(p.begin(), p.end());
    return p;
  }

  int depth(int leaf) const { return node(leaf).depth; }

  /// Indices met along the path to `leaf`: sigma^(1..d), then the value.
  std::vector<Rational> path_sigmas(int leaf) const {
    std::vector<Rational> s;
    for (int n : path(leaf)) s.push_back(node(n).sigma);
    return s;
  }

  Rational kappa1(int leaf) const {
    Rational k = node(leaf).sigma;
    for (int n = node(leaf).parent; n >= 0; n = node(n).parent) k = min(k, node(n).sigma);
    return k;
  }

  int child_by_label(int id, std::string_view label) const {
    for (int c : node(id).children)
      if (node(c).label == label) return c;
    return -1;
  }

  /// Leaf reached by a sequence of signal labels, or -1.
  int find_leaf(std::span<const std::string> labels) const {
    int n = 0;
    for (const auto& l : labels) {
      n = child_by_label(n, l);
      if (n < 0) return -1;
    }
    return node(n).is_leaf() ? n : -1;
  }

 private:
  friend AnnotatedBasket annotate(const OutcomeNode& root);

  std::vector<BasketNode> nodes_;
  std::vector<int> leaves_;
  std::vector<Rational> reach_;
};

namespace detail {

inline void flatten(const OutcomeNode& src, int parent, int depth, std::string label, Rational prob,
                    const std::string& where, std::vector<BasketNode>& out,
                    std::vector<std::string>& issues) {
  const int id = static_cast<int>(out.size());
  out.push_back({});
  {
    BasketNode& n = out.back();
    n.parent = parent;
    n.depth = depth;
    n.label = std::move(label);
    n.prob = std::move(prob);
    n.cost = src.cost;
    n.value = src.value;
  }
  if (src.is_leaf()) {
    if (!src.children.empty()) issues.push_back(where + ": leaf must not have branches");
    return;
  }
  if (src.cost.sign() < 0) issues.push_back(where + ": negative cost " + src.cost.str());
  if (src.children.empty()) issues.push_back(where + ": internal node without branches");
  if (src.children.size() != src.signals.size()) {
    issues.push_back(where + ": signal/child count mismatch");
    return;
  }
  Rational total(0);
  std::set<std::string> seen;
  for (std::size_t k = 0; k < src.children.size(); ++k) {
    const Signal& s = src.signals[k];
    if (s.prob.sign() <= 0) issues.push_back(where + ": branch '" + s.label + "' has non-positive probability");
    if (!seen.insert(s.label).second) issues.push_back(where + ": duplicate signal label '" + s.label + "'");
    total += s.prob;
  }
  if (total != Rational(1)) issues.push_back(where + ": branch probabilities sum to " + total.str());
  for (std::size_t k = 0; k < src.children.size(); ++k) {
    const int child = static_cast<int>(out.size());
    out[static_cast<std::size_t>(id)].children.push_back(child);
    flatten(src.children[k], id, depth + 1, src.signals[k].label, src.signals[k].prob,
            where + "/" + src.signals[k].label, out, issues);
  }
}

}  // namespace detail

/// Backward induction: each node's index solves
/// E[(next capped value - sigma)^+ | node] = cost, and the node's capped value is
/// min(sigma, next capped value).
inline AnnotatedBasket annotate(const OutcomeNode& root) {
  AnnotatedBasket b;
  std::vector<std::string> issues;
  detail::flatten(root, -1, 0, "", Rational(1), "root", b.nodes_, issues);
  if (!issues.empty()) {
    std::string msg = "invalid outcome tree: " + issues.front();
    if (issues.size() > 1) msg += " (and " + std::to_string(issues.size() - 1) + " more)";
    throw ValidationError(msg, std::move(issues));
  }

  for (std::size_t k = b.nodes_.size(); k-- > 0;) {
    BasketNode& n = b.nodes_[k];
    if (n.is_leaf()) {
      n.sigma = *n.value;
      n.kappa = DiscreteDistribution::point(*n.value);
      continue;
    }
    std::vector<std::pair<Rational, DiscreteDistribution>> parts;
    for (int c : n.children) {
      const BasketNode& child = b.nodes_[static_cast<std::size_t>(c)];
      parts.emplace_back(child.prob, child.kappa);
    }
    n.kappa_next = DiscreteDistribution::mixture(parts);
    n.sigma = weitzman_index(*n.kappa_next, n.cost);
    const Rational s = n.sigma;
    n.kappa = n.kappa_next->map([&](const Rational& v) { return min(v, s); });
  }

  b.reach_.resize(b.nodes_.size());
  for (std::size_t k = 0; k < b.nodes_.size(); ++k) {
    const BasketNode& n = b.nodes_[k];
    b.reach_[k] = n.parent < 0 ? Rational(1) : b.reach_[static_cast<std::size_t>(n.parent)] * n.prob;
    if (n.is_leaf()) b.leaves_.push_back(static_cast<int>(k));
  }
  return b;
}

/// Law of the terminal capped value kappa^(1).
inline DiscreteDistribution kappa1_distribution(const AnnotatedBasket& b) { return b.root().kappa; }

/// Running minima of a sequence of indices (gamma^(l)).
inline std::vector<Rational> gamma_sequence(std::span<const Rational> sigmas) {
  if (sigmas.empty()) throw DomainError("gamma sequence of an empty index list");
  std::vector<Rational> out;
  out.reserve(sigmas.size());
  for (const Rational& s : sigmas) out.push_back(out.empty() ? s : min(out.back(), s));
  return out;
}

/// Suffix minima (kappa^(l)) of indices followed by the terminal value.
inline std::vector<Rational> kappa_sequence(std::span<const Rational> sigmas_then_value) {
  if (sigmas_then_value.empty()) throw DomainError("kappa sequence of an empty index list");
  std::vector<Rational> out(sigmas_then_value.begin(), sigmas_then_value.end());
  for (std::size_t k = out.size() - 1; k-- > 0;) out[k] = min(out[k], out[k + 1]);
  return out;
}

/// What a policy did with one basket in one realization.
struct NestedTrace {
  int leaf = -1;         // realized outcome path, identified by its leaf
  int stage = 0;         // number of boxes opened
  bool claimed = false;  // basket claimed (requires every box opened)
};

inline void validate_trace(const NestedTrace& t, const AnnotatedBasket& b) {
  if (t.leaf < 0 || static_cast<std::size_t>(t.leaf) >= b.size() || !b.node(t.leaf).is_leaf())
    throw ValidationError("trace does not reference a leaf of the basket");
  const int d = b.depth(t.leaf);
  if (t.stage < 0 || t.stage > d)
    throw ValidationError("trace stage " + std::to_string(t.stage) + " outside 0.." + std::to_string(d));
  if (t.claimed && t.stage != d) throw ValidationError("claimed basket with unopened boxes");
}

/// Inspection indicators I^(1..d) followed by the claim indicator.
inline std::vector<int> indicators(const NestedTrace& t, const AnnotatedBasket& b) {
  validate_trace(t, b);
  const int d = b.depth(t.leaf);
  std::vector<int> ind(static_cast<std::size_t>(d) + 1, 0);
  for (int l = 0; l < t.stage; ++l) ind[static_cast<std::size_t>(l)] = 1;
  ind[static_cast<std::size_t>(d)] = t.claimed ? 1 : 0;
  return ind;
}

/// False iff the policy stopped at some stage l (opened box l but did not
/// advance further) although gamma^(l) < kappa^(l+1) on the realized path.
inline bool check_non_exposure(const NestedTrace& t, const AnnotatedBasket& b) {
  validate_trace(t, b);
  if (t.claimed || t.stage == 0) return true;
  const std::vector<Rational> s = b.path_sigmas(t.leaf);
  const auto l = static_cast<std::size_t>(t.stage);
  const Rational gamma = *std::min_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(l));
  const Rational kappa_next = *std::min_element(s.begin() + static_cast<std::ptrdiff_t>(l), s.end());
  return !(gamma < kappa_next);
}

struct Amortized {
  Rational welfare;       // claim * value - paid costs
  Rational capped_bound;  // claim * kappa^(1)
};

inline Amortized amortized_contribution(const NestedTrace& t, const AnnotatedBasket& b) {
  validate_trace(t, b);
  Amortized a{0, 0};
  const std::vector<int> p = b.path(t.leaf);
  for (int l = 0; l < t.stage; ++l) a.welfare -= b.node(p[static_cast<std::size_t>(l)]).cost;
  if (t.claimed) {
    a.welfare += *b.node(t.leaf).value;
    a.capped_bound = b.kappa1(t.leaf);
  }
  return a;
}

// ---------------------------------------------------------------------------
// Descending procedures

struct EligibleView {
  int basket;
  Rational sigma;  // current index
  Rational gamma;  // min of indices opened so far and the current one
};

struct DescendingStep {
  int basket;
  int stage;  // boxes opened before the step
  Rational sigma;
  bool claim;
  std::vector<EligibleView> eligible;  // eligible, unclaimed baskets at the step
};

struct DescendingRun {
  std::vector<NestedTrace> traces;
  std::vector<int> claimed;
  std::vector<DescendingStep> steps;
};

/// Generic descending procedure on one realization.
///
/// Repeatedly advances the eligible basket whose current index is largest
/// (ties to the smallest basket id), as long as that index is strictly
/// positive. Advancing a fully opened basket claims it; `conflicts(b)` then
/// lists the baskets that become ineligible.
template <class Conflicts>
DescendingRun run_descending(std::span<const AnnotatedBasket> baskets, std::span<const int> leaves,
                             Conflicts&& conflicts) {
  const std::size_t n = baskets.size();
  if (leaves.size() != n) throw ValidationError("one realized leaf per basket is required");
  DescendingRun run;
  run.traces.resize(n);
  std::vector<std::vector<Rational>> sigmas(n);
  std::vector<Rational> gamma(n);
  std::vector<bool> eligible(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    run.traces[i].leaf = leaves[i];
    validate_trace(run.traces[i], baskets[i]);
    sigmas[i] = baskets[i].path_sigmas(leaves[i]);
    gamma[i] = sigmas[i].front();
  }

  for (;;) {
    int best = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (!eligible[i] || run.traces[i].claimed) continue;
      const Rational& s = sigmas[i][static_cast<std::size_t>(run.traces[i].stage)];
      if (best < 0 || s > sigmas[static_cast<std::size_t>(best)][static_cast<std::size_t>(
                              run.traces[static_cast<std::size_t>(best)].stage)])
        best = static_cast<int>(i);
    }
    if (best < 0) break;
    const auto b = static_cast<std::size_t>(best);
    NestedTrace& t = run.traces[b];
    const Rational sigma = sigmas[b][static_cast<std::size_t>(t.stage)];
    if (sigma.sign() <= 0) break;

    DescendingStep step{best, t.stage, sigma, false, {}};
    for (std::size_t i = 0; i < n; ++i)
      if (eligible[i] && !run.traces[i].claimed)
        step.eligible.push_back(
            {static_cast<int>(i), sigmas[i][static_cast<std::size_t>(run.traces[i].stage)], gamma[i]});

    if (t.stage == baskets[b].depth(t.leaf)) {
      t.claimed = true;
      step.claim = true;
      run.claimed.push_back(best);
      for (int k : conflicts(best))
        if (k != best) eligible[static_cast<std::size_t>(k)] = false;
    } else {
      ++t.stage;
      gamma[b] = min(gamma[b], sigmas[b][static_cast<std::size_t>(t.stage)]);
    }
    run.steps.push_back(std::move(step));
  }
  return run;
}

/// Single-selection descending procedure: claiming any basket ends the search.
inline DescendingRun descending_select(std::span<const AnnotatedBasket> baskets, std::span<const int> leaves) {
  std::vector<int> all(baskets.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return run_descending(baskets, leaves, [&](int) -> const std::vector<int>& { return all; });
}

struct SelectionValue {
  Rational welfare;     // expected welfare of the descending procedure
  Rational max_capped;  // E[max_i (kappa_i^(1))^+]
};

/// Exact expectations for single selection, enumerating every leaf combination.
inline SelectionValue expected_selection(std::span<const AnnotatedBasket> baskets,
                                         double enum_bound = 2e6) {
  std::vector<std::size_t> radix;
  for (const auto& b : baskets) radix.push_back(b.leaves().size());
  SelectionValue v{0, 0};
  std::vector<int> leaves(baskets.size());
  for_each_product(radix, enum_bound, [&](std::span<const std::size_t> idx) {
    Rational p(1);
    Rational best(0);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      leaves[i] = baskets[i].leaves()[idx[i]];
      p *= baskets[i].reach_probability(leaves[i]);
      best = max(best, baskets[i].kappa1(leaves[i]));
    }
    const DescendingRun run = descending_select(baskets, leaves);
    Rational w(0);
    for (std::size_t i = 0; i < baskets.size(); ++i)
      w += amortized_contribution(run.traces[i], baskets[i]).welfare;
    v.welfare += p * w;
    v.max_capped += p * best;
  });
  return v;
}

}  // namespace pandora
