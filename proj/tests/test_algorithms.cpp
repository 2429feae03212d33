#include <gtest/gtest.h>

#include <random>

#include "pandora/algorithms.hpp"
#include "pandora/generators.hpp"
#include "pandora/repro.hpp"

using namespace pandora;

namespace {

Rational R(long n, long d = 1) { return Rational(n, d); }

Orientation orient(std::initializer_list<DirectedPair> ps) { return Orientation(std::set<DirectedPair>(ps)); }

Rational positive_kappa_mean(const AnnotatedBasket& b) {
  Rational s(0);
  const DiscreteDistribution k = kappa1_distribution(b);
  for (const Atom& a : k.atoms()) s += positive_part(a.value) * a.prob;
  return s;
}

MatchingInstance symmetric_edge() {
  const PandoraBox b(DiscreteDistribution({{R(3), R(1, 2)}, {R(-1), R(1, 2)}}), R(1, 2));
  MatchingInstance inst;
  inst.edges.push_back(EdgeSpec::independent("p", "q", b, b));
  return normalize(inst);
}

}  // namespace

TEST(OrientedDescending, NoDessertEdge) {
  const auto inst = no_dessert_edge_instance(R(1, 2));
  EXPECT_EQ(oriented_welfare(inst, orient({{"i", "j"}})), R(1, 2));
  EXPECT_EQ(oriented_welfare(inst, orient({{"j", "i"}})), R(1, 4));
  // Single basket: welfare is the mean positive capped value.
  const OrientedDescending p(inst, orient({{"j", "i"}}));
  EXPECT_EQ(positive_kappa_mean(p.baskets()[0]), R(1, 4));
}

TEST(OrientedDescending, EmptyGraph) {
  const MatchingInstance empty;
  const OrientedDescending p(empty, Orientation{});
  const RunTrace t = p.run({});
  EXPECT_TRUE(t.matching.empty());
  EXPECT_EQ(t.welfare, R(0));
  EXPECT_EQ(expected_welfare(empty, p).value, R(0));
}

TEST(OrientedDescending, StarWithCopiesFromLeaf) {
  const auto inst = no_dessert_star_instance(R(1, 2), 2);
  const Orientation o = copies_from_leaf(inst);
  const OrientedDescending p(inst, o);
  const std::vector<AnnotatedBasket>& bs = p.baskets();
  EXPECT_EQ(oriented_welfare(inst, o), expected_selection(bs).max_capped);
}

TEST(OrientedDescending, StepLogNamesBoxes) {
  const auto inst = no_dessert_edge_instance(R(1, 2));
  const OrientedDescending p(inst, orient({{"j", "i"}}));
  // v_ji = 0, v_ij = 8: open j, then i, then match.
  Realization r{0};
  for (std::size_t k = 0; k < inst.edges[0].outcomes.size(); ++k)
    if (inst.edges[0].values(k) == std::make_pair(R(8), R(0))) r[0] = k;
  const RunTrace t = p.run(r);
  ASSERT_EQ(t.steps.size(), 3u);
  EXPECT_EQ(t.steps[0].at, "j");
  EXPECT_EQ(t.steps[0].index, R(2));
  EXPECT_EQ(t.steps[1].at, "i");
  EXPECT_EQ(t.steps[2].kind, ActionKind::match);
  EXPECT_EQ(t.welfare, R(8) - R(3, 2));
  EXPECT_NO_THROW(check_trace(inst, r, t));
}

TEST(CheckTrace, RejectsBrokenTraces) {
  const auto inst = no_dessert_edge_instance(R(1, 2));
  const Realization r{0};
  RunTrace t;
  t.inspected = {{true, false}};
  t.matching = {0};
  t.welfare = trace_welfare(inst, r, t);
  EXPECT_THROW(check_trace(inst, r, t), ValidationError);
  t.inspected = {{true, true}};
  t.welfare = R(100);
  EXPECT_THROW(check_trace(inst, r, t), ValidationError);
}

TEST(ExpectedWelfare, Examples) {
  EXPECT_EQ(oriented_welfare(no_dessert_edge_instance(R(1, 4)), orient({{"i", "j"}})), R(3, 4));
  const auto ind = indistinguishable_edge_instance();
  const ScriptedPolicy nothing{[&](const Realization& r) { return TraceBuilder(ind, r).finish(); }};
  EXPECT_EQ(expected_welfare(ind, nothing).value, R(0));
  EXPECT_EQ(expected_welfare(ind, VertexBasedDescending(ind)).value, R(1, 4));
}

TEST(ExpectedWelfare, BoundExceededIsInstructive) {
  const auto inst = bundled_star_instance(8);
  try {
    expected_welfare(inst, BundledDescending(inst), EvalMode::exact(100));
    FAIL();
  } catch (const BoundExceeded& e) {
    EXPECT_EQ(e.estimate(), 256);
    EXPECT_NE(std::string(e.what()).find("Monte Carlo"), std::string::npos);
  }
}

TEST(ExpectedWelfare, MonteCarloAgreesWithExact) {
  const auto inst = no_dessert_star_instance(R(1, 2), 2);
  const OrientedDescending p(inst, copies_from_leaf(inst));
  const double exact = expected_welfare(inst, p).value.to_double();
  const auto mc = expected_welfare(inst, p, EvalMode::montecarlo(42, 20000));
  EXPECT_FALSE(mc.exact);
  EXPECT_EQ(mc.trials, 20000u);
  EXPECT_NEAR(mc.mean, exact, 4 * mc.stderr_ + 1e-12);
  const auto again = expected_welfare(inst, p, EvalMode::montecarlo(42, 20000));
  EXPECT_EQ(again.mean, mc.mean);
}

TEST(RandomizedMatching, Examples) {
  EXPECT_EQ(randomized_matching(no_dessert_edge_instance(R(1, 2))).value, R(3, 8));
  EXPECT_EQ(randomized_matching(MatchingInstance{}).value, R(0));
  const auto ind = indistinguishable_edge_instance();
  const Rational a = oriented_welfare(ind, orient({{"i", "j"}}));
  const Rational b = oriented_welfare(ind, orient({{"j", "i"}}));
  EXPECT_EQ(randomized_matching(ind).value, (a + b) / R(2));
}

TEST(RandomizedMatching, FallsBackToMonteCarlo) {
  const auto inst = no_dessert_edge_instance(R(1, 2));
  EvalMode mode = EvalMode::exact(3);
  mode.seed = 9;
  mode.trials = 50000;
  const auto w = randomized_matching(inst, mode);
  EXPECT_FALSE(w.exact);
  EXPECT_NEAR(w.mean, 0.375, 4 * w.stderr_);
}

TEST(BestOfTwo, Examples) {
  const auto nd = no_dessert_edge_instance(R(1, 2));
  const auto b = best_of_two(nd);
  EXPECT_EQ(b.chosen, orient({{"i", "j"}}));
  EXPECT_EQ(b.welfare, R(1, 2));

  const auto sym = symmetric_edge();
  const auto s = best_of_two(sym);
  EXPECT_EQ(s.canonical_welfare, s.reverse_welfare);
  EXPECT_EQ(s.chosen, canonical_orientation(sym));

  const auto star = no_dessert_star_instance(R(1, 4), 2);
  const auto bs = best_of_two(star);
  EXPECT_EQ(bs.chosen, reverse(canonical_orientation(star)));
  EXPECT_GT(bs.reverse_welfare, bs.canonical_welfare);
}

TEST(BundledDescending, Examples) {
  const auto star = bundled_star_instance(4);
  EXPECT_LE(expected_welfare(star, BundledDescending(star)).value, R(1));

  MatchingInstance neg;
  neg.edges.push_back(EdgeSpec::independent("a", "b", PandoraBox(DiscreteDistribution::point(R(1)), R(1)),
                                            PandoraBox(DiscreteDistribution::point(R(0)), R(1))));
  neg = normalize(neg);
  const BundledDescending nb(neg);
  EXPECT_LT(nb.baskets()[0].root().sigma, R(0));
  const RunTrace t = nb.run({0});
  EXPECT_EQ(t.inspected[0], (std::array<bool, 2>{false, false}));

  MatchingInstance two;
  const PandoraBox risky(DiscreteDistribution({{R(4), R(1, 2)}, {R(-2), R(1, 2)}}), R(1, 2));
  const PandoraBox flat(DiscreteDistribution::point(R(0)), R(0));
  two.edges.push_back(EdgeSpec::independent("a", "b", risky, flat));
  two.edges.push_back(EdgeSpec::independent("c", "d", risky, PandoraBox(DiscreteDistribution::point(R(-3)), R(0))));
  two = normalize(two);
  const BundledDescending p(two);
  for_each_realization(two, 1e6, [&](const Realization& r, const Rational&) {
    const RunTrace tr = p.run(r);
    for (std::size_t e = 0; e < 2; ++e) {
      const bool clears = p.baskets()[e].root().sigma.sign() > 0 && two.edges[e].outcomes[r[e]].total.sign() > 0;
      const bool matched = std::find(tr.matching.begin(), tr.matching.end(), static_cast<int>(e)) != tr.matching.end();
      EXPECT_EQ(matched, clears);
      EXPECT_EQ(tr.inspected[e][0], tr.inspected[e][1]);
    }
  });
}

TEST(VertexBased, Examples) {
  const auto ind = indistinguishable_edge_instance();
  EXPECT_EQ(expected_welfare(ind, VertexBasedDescending(ind)).value, R(1, 4));
  const auto swapped = indistinguishable_edge_instance("zi", "j");
  EXPECT_EQ(expected_welfare(swapped, VertexBasedDescending(swapped)).value, R(-3, 2));
  EXPECT_EQ(expected_welfare(MatchingInstance{}, VertexBasedDescending(MatchingInstance{})).value, R(0));
  MatchingInstance joint;
  joint.edges.push_back(EdgeSpec::joint("a", "b", R(0), R(0), {{"x", "y", R(1), R(1)}}));
  joint = normalize(joint);
  EXPECT_THROW(VertexBasedDescending{joint}, UnsupportedModel);
}

TEST(EdgeBased, Examples) {
  for (const Rational& a : {R(1, 2), R(1, 4), R(1, 8)}) {
    const auto nd = no_dessert_edge_instance(a);
    EXPECT_EQ(edge_based_orientation(nd), orient({{"j", "i"}}));
    EXPECT_EQ(oriented_welfare(nd, edge_based_orientation(nd)) / best_of_two(nd).welfare, a);
  }
  const auto sym = symmetric_edge();
  EXPECT_EQ(edge_based_orientation(sym), canonical_orientation(sym));
  const auto star = no_dessert_star_instance(R(1, 4), 2);
  const auto eb = edge_based_orientation(star);
  EXPECT_TRUE(eb.contains("j1", "i"));
  EXPECT_TRUE(eb.contains("j2", "i"));
}

TEST(AlgorithmProperties, RandomInstances) {
  std::mt19937_64 g(3);
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = trial % 2 ? gen::random_joint(g) : gen::random_independent(g);
    for (const Orientation& o : {canonical_orientation(inst), reverse(canonical_orientation(inst))}) {
      const OrientedDescending p(inst, o);
      for_each_realization(inst, 1e6, [&](const Realization& r, const Rational&) {
        const RunTrace t = p.run(r);
        EXPECT_NO_THROW(check_trace(inst, r, t));
        std::vector<int> greedy = greedy_matching(kappa_weights(inst, p, r)).edges;
        EXPECT_EQ(t.matching, greedy);
      });
      const Rational w = expected_welfare(inst, p).value;
      EXPECT_EQ(w, expected_matched_kappa(inst, p));
      EXPECT_GE(w, R(0));
    }
    const BundledDescending bd(inst);
    for_each_realization(inst, 1e6, [&](const Realization& r, const Rational&) {
      EXPECT_NO_THROW(check_trace(inst, r, bd.run(r)));
    });
    if (inst.edges.front().is_independent()) {
      const VertexBasedDescending vb(inst);
      for_each_realization(inst, 1e6, [&](const Realization& r, const Rational&) {
        const RunTrace t = vb.run(r);
        EXPECT_NO_THROW(check_trace(inst, r, t));
        EXPECT_TRUE(vertex_boxes_non_exposed(inst, vb, r, t));
      });
    }
  }
}
