#include <gtest/gtest.h>

#include <functional>
#include <map>
#include <random>

#include "pandora/nested.hpp"
#include "random_laws.hpp"

using namespace pandora;

namespace {

Rational R(long n, long d = 1) { return Rational(n, d); }

// Two-stage edge whose first box has value `a` w.p. pa, `b` otherwise; the
// second box is independent with the given law.
OutcomeNode two_stage(const Rational& c1, std::vector<std::pair<Rational, Rational>> first, const Rational& c2,
                      std::vector<std::pair<Rational, Rational>> second) {
  OutcomeNode root = OutcomeNode::stage(c1);
  for (const auto& [v1, p1] : first) {
    OutcomeNode mid = OutcomeNode::stage(c2);
    for (const auto& [v2, p2] : second) mid.branch(v2.str(), p2, OutcomeNode::leaf(v1 + v2));
    root.branch(v1.str(), p1, std::move(mid));
  }
  return root;
}

// No-dessert edge at alpha = 1/2, inspected i first or j first.
OutcomeNode nd_ij() { return two_stage(R(1), {{R(8), R(1, 2)}, {R(0), R(1, 2)}}, R(1, 2), {{R(0), R(1, 4)}, {R(-6), R(3, 4)}}); }
OutcomeNode nd_ji() { return two_stage(R(1, 2), {{R(0), R(1, 4)}, {R(-6), R(3, 4)}}, R(1), {{R(8), R(1, 2)}, {R(0), R(1, 2)}}); }

OutcomeNode random_tree(std::mt19937_64& g, int depth_left) {
  if (depth_left == 0 || (depth_left < 3 && testgen::uniform(g, 0, 3) == 0))
    return OutcomeNode::leaf(testgen::small_rational(g, -4, 8, 3));
  OutcomeNode n = OutcomeNode::stage(testgen::small_rational(g, 0, 2, 4));
  const int k = static_cast<int>(testgen::uniform(g, 1, 3));
  std::vector<long> w(static_cast<std::size_t>(k));
  long total = 0;
  for (long& x : w) total += (x = testgen::uniform(g, 1, 4));
  for (int b = 0; b < k; ++b)
    n.branch("s" + std::to_string(b), R(w[static_cast<std::size_t>(b)], total), random_tree(g, depth_left - 1));
  return n;
}

// Independent single-selection optimum: DP over the product of tree nodes.
Rational selection_optimum(const std::vector<AnnotatedBasket>& bs) {
  std::map<std::vector<int>, Rational> memo;
  std::function<Rational(const std::vector<int>&)> V = [&](const std::vector<int>& s) -> Rational {
    if (auto it = memo.find(s); it != memo.end()) return it->second;
    Rational best(0);
    for (std::size_t i = 0; i < bs.size(); ++i) {
      const BasketNode& n = bs[i].node(s[i]);
      if (n.is_leaf()) {
        best = max(best, *n.value);
        continue;
      }
      Rational cont = -n.cost;
      for (int c : n.children) {
        std::vector<int> t = s;
        t[i] = c;
        cont += bs[i].node(c).prob * V(t);
      }
      best = max(best, cont);
    }
    return memo[s] = best;
  };
  return V(std::vector<int>(bs.size(), 0));
}

}  // namespace

TEST(Annotate, NoDessertEdgeIJ) {
  const auto b = annotate(nd_ij());
  EXPECT_EQ(b.root().sigma, R(1));
  const int after8 = b.child_by_label(0, "8");
  const int after0 = b.child_by_label(0, "0");
  EXPECT_EQ(b.node(after8).sigma, R(6));
  EXPECT_EQ(b.node(after0).sigma, R(-2));
  const auto k1 = kappa1_distribution(b);
  EXPECT_EQ(k1.probability_of(R(1)), R(1, 2));
  Rational pos(0);
  for (const Atom& a : k1.atoms()) pos += positive_part(a.value) * a.prob;
  EXPECT_EQ(pos, R(1, 2));
}

TEST(Annotate, NoDessertEdgeJI) {
  const auto b = annotate(nd_ji());
  EXPECT_EQ(b.root().sigma, R(2));
  EXPECT_EQ(b.node(b.child_by_label(0, "0")).sigma, R(6));
  EXPECT_EQ(b.node(b.child_by_label(0, "-6")).sigma, R(0));
  const auto k1 = kappa1_distribution(b);
  EXPECT_EQ(k1.probability_of(R(2)), R(1, 8));
  Rational pos(0);
  for (const Atom& a : k1.atoms()) pos += positive_part(a.value) * a.prob;
  EXPECT_EQ(pos, R(1, 4));
}

TEST(Annotate, DepthOneMatchesClassicBox) {
  const PandoraBox box(DiscreteDistribution({{R(9), R(1, 8)}, {R(-3), R(7, 8)}}), R(1));
  const auto b = annotate(box_basket(box));
  EXPECT_EQ(b.root().sigma, weitzman_index(box));
  EXPECT_EQ(kappa1_distribution(annotate(box_basket(PandoraBox(DiscreteDistribution::point(R(5)), R(0))))),
            DiscreteDistribution::point(R(5)));
}

TEST(Annotate, RejectsMalformedTrees) {
  auto bad = OutcomeNode::stage(R(1)).branch("a", R(1, 2), OutcomeNode::leaf(R(1)));
  EXPECT_THROW(annotate(bad), ValidationError);
  auto neg = OutcomeNode::stage(R(-1)).branch("a", R(1), OutcomeNode::leaf(R(1)));
  EXPECT_THROW(annotate(neg), ValidationError);
  auto dup = OutcomeNode::stage(R(1)).branch("a", R(1, 2), OutcomeNode::leaf(R(1))).branch("a", R(1, 2), OutcomeNode::leaf(R(2)));
  try {
    annotate(dup);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_FALSE(e.issues().empty());
  }
  EXPECT_THROW(annotate(OutcomeNode::stage(R(0))), ValidationError);
}

TEST(Sequences, GammaAndKappaFromFigureRealization) {
  std::vector<Rational> s;
  for (const char* x : {"2.75", "2", "3", "1.75", "1", "2.5", "1.5", "2.25"}) s.push_back(Rational::parse(x));
  std::vector<Rational> gamma_expected;
  for (const char* x : {"2.75", "2", "2", "1.75", "1", "1", "1", "1"}) gamma_expected.push_back(Rational::parse(x));
  EXPECT_EQ(gamma_sequence(s), gamma_expected);

  auto with_value = s;
  with_value.push_back(R(3));
  std::vector<Rational> kappa_expected;
  for (const char* x : {"1", "1", "1", "1", "1", "1.5", "1.5", "2.25", "3"}) kappa_expected.push_back(Rational::parse(x));
  EXPECT_EQ(kappa_sequence(with_value), kappa_expected);

  const std::vector<Rational> flat(4, R(2));
  EXPECT_EQ(gamma_sequence(flat), flat);
  EXPECT_THROW(gamma_sequence({}), DomainError);
}

TEST(NonExposure, Examples) {
  const auto b = annotate(nd_ij());
  const std::vector<std::string> path8{"8", "0"};
  const int leaf = b.find_leaf(path8);
  ASSERT_GE(leaf, 0);
  EXPECT_TRUE(check_non_exposure({leaf, 2, true}, b));
  EXPECT_TRUE(check_non_exposure({leaf, 0, false}, b));
  EXPECT_FALSE(check_non_exposure({leaf, 1, false}, b));
  // After observing 0 the next index is -2 < gamma = 1, so stopping is safe.
  EXPECT_TRUE(check_non_exposure({b.find_leaf(std::vector<std::string>{"0", "0"}), 1, false}, b));
  EXPECT_THROW(check_non_exposure({leaf, 1, true}, b), ValidationError);
  EXPECT_THROW(check_non_exposure({leaf, 3, false}, b), ValidationError);
  EXPECT_THROW(check_non_exposure({0, 0, false}, b), ValidationError);
}

TEST(Amortization, Examples) {
  const auto b = annotate(nd_ij());
  const int leaf = b.find_leaf(std::vector<std::string>{"8", "0"});
  const auto none = amortized_contribution({leaf, 0, false}, b);
  EXPECT_EQ(none.welfare, R(0));
  EXPECT_EQ(none.capped_bound, R(0));
  const auto full = amortized_contribution({leaf, 2, true}, b);
  EXPECT_EQ(full.welfare, R(13, 2));
  EXPECT_EQ(full.capped_bound, R(1));

  // Descending policy on the lone basket: equality in expectation.
  Rational w(0), k(0), w_exposed(0), k_exposed(0);
  const std::vector<AnnotatedBasket> bs{b};
  for (int l : b.leaves()) {
    const auto run = descending_select(bs, std::vector<int>{l});
    const auto a = amortized_contribution(run.traces[0], b);
    w += b.reach_probability(l) * a.welfare;
    k += b.reach_probability(l) * a.capped_bound;
    const auto e = amortized_contribution({l, 1, false}, b);
    w_exposed += b.reach_probability(l) * e.welfare;
    k_exposed += b.reach_probability(l) * e.capped_bound;
  }
  EXPECT_EQ(w, R(1, 2));
  EXPECT_EQ(w, k);
  EXPECT_EQ(w_exposed, R(-1));
  EXPECT_EQ(k_exposed, R(0));
}

TEST(DescendingSelect, NegativeRootOpensNothing) {
  const std::vector<AnnotatedBasket> bs{annotate(box_basket(PandoraBox(DiscreteDistribution::point(R(1)), R(2))))};
  const auto run = descending_select(bs, std::vector<int>{bs[0].leaves()[0]});
  EXPECT_EQ(run.traces[0].stage, 0);
  EXPECT_TRUE(run.claimed.empty());
  EXPECT_EQ(expected_selection(bs).welfare, R(0));
}

TEST(DescendingSelect, OutsideOptionDominatesIJCopies) {
  const auto outside = annotate(box_basket(PandoraBox(DiscreteDistribution::point(R(2)), R(0))));
  std::vector<AnnotatedBasket> bs{outside, annotate(nd_ij()), annotate(nd_ij())};
  const auto v = expected_selection(bs);
  EXPECT_EQ(v.welfare, R(2));
  EXPECT_EQ(v.welfare, v.max_capped);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t c = 0; c < 4; ++c) {
      const std::vector<int> leaves{outside.leaves()[0], bs[1].leaves()[a], bs[2].leaves()[c]};
      EXPECT_EQ(descending_select(bs, leaves).claimed, std::vector<int>{0});
    }
  bs[1] = annotate(nd_ji());
  bs[2] = annotate(nd_ji());
  const auto u = expected_selection(bs);
  EXPECT_EQ(u.welfare, u.max_capped);
  EXPECT_EQ(u.welfare, selection_optimum(bs));
}

TEST(DescendingProperties, RandomBaskets) {
  std::mt19937_64 g(99);
  for (int trial = 0; trial < 120; ++trial) {
    std::vector<AnnotatedBasket> bs;
    const int n = static_cast<int>(testgen::uniform(g, 1, 3));
    for (int i = 0; i < n; ++i) bs.push_back(annotate(random_tree(g, 3)));

    for (const auto& b : bs) {
      for (std::size_t id = 0; id < b.size(); ++id) {
        const BasketNode& node = b.node(static_cast<int>(id));
        if (node.is_leaf()) continue;
        if (node.cost.sign() > 0) {
          EXPECT_EQ(surplus(*node.kappa_next, node.sigma), node.cost);
        }
      }
      for (int l : b.leaves()) {
        const auto s = b.path_sigmas(l);
        const auto kap = kappa_sequence(s);
        EXPECT_EQ(kap.front(), b.kappa1(l));
        for (std::size_t x = 1; x < kap.size(); ++x) EXPECT_LE(kap[x - 1], kap[x]);
        std::vector<Rational> stage_sigmas(s.begin(), s.end() - 1);
        if (!stage_sigmas.empty()) {
          EXPECT_EQ(b.kappa1(l), min(gamma_sequence(stage_sigmas).back(), s.back()));
        }
      }
    }

    const auto v = expected_selection(bs);
    EXPECT_EQ(v.welfare, v.max_capped);
    EXPECT_EQ(v.welfare, selection_optimum(bs));

    // Pathwise: non-exposure, pointwise max capped value, gamma equality.
    std::vector<std::size_t> radix;
    for (const auto& b : bs) radix.push_back(b.leaves().size());
    for_each_product(radix, 1e6, [&](std::span<const std::size_t> idx) {
      std::vector<int> leaves;
      for (std::size_t i = 0; i < idx.size(); ++i) leaves.push_back(bs[i].leaves()[idx[i]]);
      const auto run = descending_select(bs, leaves);
      Rational claimed_kappa(0), best(0);
      for (std::size_t i = 0; i < bs.size(); ++i) {
        EXPECT_TRUE(check_non_exposure(run.traces[i], bs[i]));
        claimed_kappa += amortized_contribution(run.traces[i], bs[i]).capped_bound;
        best = max(best, bs[i].kappa1(leaves[i]));
      }
      EXPECT_EQ(claimed_kappa, best);
      for (const auto& step : run.steps) {
        Rational top = step.eligible.front().gamma;
        for (const auto& e : step.eligible) top = max(top, e.gamma);
        for (const auto& e : step.eligible) {
          if (e.basket == step.basket)
            EXPECT_EQ(e.gamma, top);
          else
            EXPECT_EQ(e.gamma, e.sigma);
        }
      }
    });
  }
}
