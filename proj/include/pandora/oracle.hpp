#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pandora/algorithms.hpp"
#include "pandora/instance.hpp"
#include "pandora/matching.hpp"

namespace pandora {

/// Which inspection orders the optimal policy may use.
///  - free: any box at any time;
///  - oriented: on an edge oriented (u, v), the box at v only after the box at u;
///  - bundled: both boxes of an edge opened together.
enum class Constraint { free, oriented, bundled };

inline const char* to_string(Constraint c) {
  switch (c) {
    case Constraint::free: return "free";
    case Constraint::oriented: return "oriented";
    case Constraint::bundled: return "bundled";
  }
  return "?";
}

struct OracleAction {
  enum class Kind { stop, open, open_both };
  Kind kind = Kind::stop;
  int edge = -1;
  VertexId at;  // open: vertex whose box is opened
};

struct PolicyValue {
  Rational value;
  double state_space = 0;         // size of the indexed state space
  std::size_t states_visited = 0; // states reached from the start
  OracleAction root_action;
};

/// Exhaustive dynamic program for the best inspection-and-matching policy.
///
/// A state records, per edge, what has been observed at each endpoint (or,
/// when bundled, which outcome was revealed). The value of a state is the
/// larger of stopping, which earns a maximum-weight matching over fully
/// inspected edges (empty if nothing is positive), and the best expected
/// continuation over legal openings. Claiming is deferred to the end, which
/// loses nothing because an early claim only removes options.
class OptimalPolicy {
 public:
  OptimalPolicy(const MatchingInstance& inst, Constraint c, const std::optional<Orientation>& o = std::nullopt,
                double state_bound = default_enum_bound())
      : inst_(&inst), constraint_(c) {
    if (c == Constraint::oriented) {
      if (!o) throw ValidationError("oriented constraint requires an orientation");
      check_orients(*o, inst);
    }
    for (const auto& v : inst.vertices) vertex_index_.emplace(v, static_cast<int>(vertex_index_.size()));
    double space = 1;
    for (const auto& e : inst.edges) {
      edges_.push_back(build_edge(e, c, o));
      space *= static_cast<double>(edges_.back().radix);
    }
    space_ = space;
    if (space > state_bound)
      throw BoundExceeded("optimal policy needs " + std::to_string(static_cast<long long>(space)) +
                              " states, above the bound of " + std::to_string(static_cast<long long>(state_bound)),
                          space, state_bound);
    std::size_t stride = 1;
    for (auto& le : edges_) {
      le.stride = stride;
      stride *= le.radix;
    }
    memo_.resize(stride);
    done_.assign(stride, 0);
    best_.assign(stride, -1);
    value_ = solve(0);
  }

  const Rational& value() const noexcept { return value_; }

  PolicyValue result() const {
    std::size_t visited = 0;
    for (char d : done_) visited += d ? 1 : 0;
    return {value_, space_, visited, action_at(0)};
  }

  /// Follows the optimal policy on one realization.
  RunTrace run(const Realization& r) const {
    RunTrace t;
    t.inspected.assign(edges_.size(), {false, false});
    std::size_t state = 0;
    for (int code = best_[state]; code >= 0; code = best_[state]) {
      const auto e = static_cast<std::size_t>(code / 2);
      const int side = code % 2;
      const LocalEdge& le = edges_[e];
      const std::size_t local = (state / le.stride) % le.radix;
      const EdgeSpec& ed = inst_->edges[e];
      t.steps.push_back({static_cast<int>(e), side == 0 ? ed.i : ed.j, ActionKind::open, memo_[state]});
      if (constraint_ == Constraint::bundled)
        t.inspected[e] = {true, true};
      else
        t.inspected[e][static_cast<std::size_t>(side)] = true;
      state += (le.reveal[local][static_cast<std::size_t>(side)][r[e]] - local) * le.stride;
    }
    const Matching m = terminal_matching(state);
    t.matching = m.edges;
    for (int e : t.matching) t.steps.push_back({e, inst_->edges[static_cast<std::size_t>(e)].i, ActionKind::match, m.total});
    t.welfare = trace_welfare(*inst_, r, t);
    return t;
  }

 private:
  struct LocalAction {
    int side;  // 0: box at i (or both, bundled), 1: box at j
    Rational cost;
    std::vector<std::pair<Rational, std::size_t>> next;  // (probability, next local state)
  };

  struct LocalEdge {
    std::size_t radix = 1;
    std::size_t stride = 1;
    std::vector<std::vector<LocalAction>> actions;  // per local state
    std::vector<int> terminal;                      // per local state: revealed outcome or -1
    // reveal[local][side][outcome] = local state after opening `side` when `outcome` is realized
    std::vector<std::array<std::vector<std::size_t>, 2>> reveal;
  };

  static LocalEdge build_edge(const EdgeSpec& e, Constraint c, const std::optional<Orientation>& o) {
    LocalEdge le;
    const std::size_t n = e.outcomes.size();
    if (c == Constraint::bundled) {
      le.radix = 1 + n;
      le.actions.resize(le.radix);
      le.terminal.assign(le.radix, -1);
      le.reveal.resize(le.radix);
      LocalAction a{0, e.cost_ij + e.cost_ji, {}};
      for (std::size_t k = 0; k < n; ++k) {
        a.next.emplace_back(e.outcomes[k].prob, k + 1);
        le.terminal[k + 1] = static_cast<int>(k);
        le.reveal[0][0].push_back(k + 1);
      }
      le.actions[0].push_back(std::move(a));
      return le;
    }

    const auto li = e.labels_at(e.i);
    const auto lj = e.labels_at(e.j);
    const std::size_t ni = li.size() + 1;
    const std::size_t nj = lj.size() + 1;
    le.radix = ni * nj;
    le.actions.resize(le.radix);
    le.terminal.assign(le.radix, -1);
    le.reveal.resize(le.radix);
    // Outcome k observed as (a, b), 1-based label positions.
    std::vector<std::pair<std::size_t, std::size_t>> ab(n);
    for (std::size_t k = 0; k < n; ++k) {
      ab[k].first = static_cast<std::size_t>(std::find(li.begin(), li.end(), e.outcomes[k].label_i) - li.begin()) + 1;
      ab[k].second = static_cast<std::size_t>(std::find(lj.begin(), lj.end(), e.outcomes[k].label_j) - lj.begin()) + 1;
      le.terminal[ab[k].first * nj + ab[k].second] = static_cast<int>(k);
    }
    const bool j_needs_i = c == Constraint::oriented && o->contains(e.i, e.j);
    const bool i_needs_j = c == Constraint::oriented && o->contains(e.j, e.i);
    for (std::size_t a = 0; a < ni; ++a)
      for (std::size_t b = 0; b < nj; ++b) {
        const std::size_t local = a * nj + b;
        auto consistent = [&](std::size_t k) {
          return (a == 0 || ab[k].first == a) && (b == 0 || ab[k].second == b);
        };
        Rational mass(0);
        for (std::size_t k = 0; k < n; ++k)
          if (consistent(k)) mass += e.outcomes[k].prob;
        for (int side = 0; side < 2; ++side) {
          auto& rev = le.reveal[local][static_cast<std::size_t>(side)];
          rev.assign(n, local);
          for (std::size_t k = 0; k < n; ++k)
            rev[k] = side == 0 ? ab[k].first * nj + b : a * nj + ab[k].second;
        }
        if (mass.sign() == 0) continue;  // unreachable observation pair
        if (a == 0 && (!i_needs_j || b > 0)) {
          LocalAction act{0, e.cost_ij, {}};
          for (std::size_t x = 1; x < ni; ++x) {
            Rational p(0);
            for (std::size_t k = 0; k < n; ++k)
              if (consistent(k) && ab[k].first == x) p += e.outcomes[k].prob;
            if (p.sign() > 0) act.next.emplace_back(p / mass, x * nj + b);
          }
          le.actions[local].push_back(std::move(act));
        }
        if (b == 0 && (!j_needs_i || a > 0)) {
          LocalAction act{1, e.cost_ji, {}};
          for (std::size_t y = 1; y < nj; ++y) {
            Rational p(0);
            for (std::size_t k = 0; k < n; ++k)
              if (consistent(k) && ab[k].second == y) p += e.outcomes[k].prob;
            if (p.sign() > 0) act.next.emplace_back(p / mass, a * nj + y);
          }
          le.actions[local].push_back(std::move(act));
        }
      }
    return le;
  }

  Matching terminal_matching(std::size_t state) const {
    std::vector<WeightedEdge> w;
    std::vector<int> ids;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const LocalEdge& le = edges_[e];
      const int k = le.terminal[(state / le.stride) % le.radix];
      if (k < 0) continue;
      const EdgeSpec& ed = inst_->edges[e];
      w.push_back({vertex_index_.at(ed.i), vertex_index_.at(ed.j), ed.outcomes[static_cast<std::size_t>(k)].total});
      ids.push_back(static_cast<int>(e));
    }
    Matching m = max_weight_matching(w);
    for (int& x : m.edges) x = ids[static_cast<std::size_t>(x)];
    return m;
  }

  const Rational& terminal_value(std::size_t state) {
    std::uint64_t key = 0;
    std::uint64_t mult = 1;
    for (const LocalEdge& le : edges_) {
      const int k = le.terminal[(state / le.stride) % le.radix];
      key += static_cast<std::uint64_t>(k + 1) * mult;
      mult *= le.radix;
    }
    auto it = terminal_cache_.find(key);
    if (it == terminal_cache_.end()) it = terminal_cache_.emplace(key, terminal_matching(state).total).first;
    return it->second;
  }

  const Rational& solve(std::size_t state) {
    if (done_[state]) return memo_[state];
    Rational best = terminal_value(state);
    int best_code = -1;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const LocalEdge& le = edges_[e];
      const std::size_t local = (state / le.stride) % le.radix;
      for (const LocalAction& act : le.actions[local]) {
        Rational cont = -act.cost;
        for (const auto& [p, next] : act.next) cont += p * solve(state + (next - local) * le.stride);
        if (cont > best) {
          best = cont;
          best_code = static_cast<int>(e) * 2 + act.side;
        }
      }
    }
    memo_[state] = std::move(best);
    best_[state] = best_code;
    done_[state] = 1;
    return memo_[state];
  }

  OracleAction action_at(std::size_t state) const {
    const int code = best_[state];
    if (code < 0) return {};
    const EdgeSpec& ed = inst_->edges[static_cast<std::size_t>(code / 2)];
    if (constraint_ == Constraint::bundled) return {OracleAction::Kind::open_both, code / 2, ed.i};
    return {OracleAction::Kind::open, code / 2, code % 2 == 0 ? ed.i : ed.j};
  }

  const MatchingInstance* inst_;
  Constraint constraint_;
  std::unordered_map<VertexId, int> vertex_index_;
  std::vector<LocalEdge> edges_;
  double space_ = 1;
  std::vector<Rational> memo_;
  std::vector<char> done_;
  std::vector<int> best_;
  std::unordered_map<std::uint64_t, Rational> terminal_cache_;
  Rational value_;
};

inline PolicyValue optimal_welfare(const MatchingInstance& inst, Constraint c,
                                   const std::optional<Orientation>& o = std::nullopt,
                                   double state_bound = default_enum_bound()) {
  return OptimalPolicy(inst, c, o, state_bound).result();
}

}  // namespace pandora
