#pragma once

#include <algorithm>
#include <functional>
#include <utility>

#include "pandora/algorithms.hpp"

namespace pandora {

/// A policy given directly as a function of the realization.
struct ScriptedPolicy {
  std::function<RunTrace(const Realization&)> fn;
  RunTrace run(const Realization& r) const { return fn(r); }
};

/// Records box openings and matches, then prices them.
class TraceBuilder {
 public:
  TraceBuilder(const MatchingInstance& inst, const Realization& r) : inst_(&inst), r_(&r) {
    t_.inspected.assign(inst.edges.size(), {false, false});
  }

  void open(std::size_t e, const VertexId& at) {
    const EdgeSpec& ed = inst_->edges[e];
    t_.inspected[e][at == ed.i ? 0 : 1] = true;
    t_.steps.push_back({static_cast<int>(e), at, ActionKind::open, Rational(0)});
  }
  void match(std::size_t e) {
    t_.matching.push_back(static_cast<int>(e));
    t_.steps.push_back({static_cast<int>(e), inst_->edges[e].i, ActionKind::match, Rational(0)});
  }
  std::pair<Rational, Rational> values(std::size_t e) const { return inst_->edges[e].values((*r_)[e]); }
  const Rational& total(std::size_t e) const { return inst_->edges[e].outcomes[(*r_)[e]].total; }

  RunTrace finish() {
    std::sort(t_.matching.begin(), t_.matching.end());
    t_.welfare = trace_welfare(*inst_, *r_, t_);
    return std::move(t_);
  }

 private:
  const MatchingInstance* inst_;
  const Realization* r_;
  RunTrace t_;
};

}  // namespace pandora
