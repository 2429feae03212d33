#include <gtest/gtest.h>

#include "pandora/repro.hpp"

using namespace pandora;

namespace {
Rational R(long n, long d = 1) { return Rational(n, d); }
}  // namespace

TEST(Repro, DefaultSuiteMatchesEveryRow) {
  const auto rows = report(repro_suite());
  EXPECT_GT(rows.size(), 30u);
  for (const auto& r : rows)
    EXPECT_TRUE(r.ok) << r.instance << " / " << r.quantity << ": " << r.computed << " " << r.relation << " " << r.expected;
}

TEST(Repro, BundledStarTable) {
  EXPECT_EQ(bundled_star(1).expected[0].expected, R(0));
  EXPECT_EQ(bundled_star(4).expected[0].expected, R(3, 4));
  EXPECT_EQ(star_policy_closed_form(10), (R(1) - pow(R(9, 10), 10)) * R(10) - R(1));
  for (const auto& row : evaluate(bundled_star(1))) EXPECT_TRUE(row.ok) << row.quantity;
}

TEST(Repro, NoDessertTables) {
  auto values = [](const NamedInstance& ni) {
    std::vector<Rational> v;
    for (const auto& e : ni.expected) v.push_back(e.expected);
    return v;
  };
  const auto half = values(no_dessert_edge(R(1, 2)));
  EXPECT_EQ(std::vector<Rational>(half.begin(), half.begin() + 4), (std::vector<Rational>{R(1), R(2), R(1, 2), R(1, 4)}));
  const auto quarter = values(no_dessert_edge(R(1, 4)));
  EXPECT_EQ(std::vector<Rational>(quarter.begin(), quarter.begin() + 4),
            (std::vector<Rational>{R(3), R(12), R(3, 4), R(3, 16)}));
  EXPECT_EQ(no_dessert_star(R(1, 2), 2).expected[1].expected, R(0));
  EXPECT_EQ(no_dessert_star(R(1, 4), 2).expected[1].expected, R(1, 8));
  for (const auto& row : evaluate(no_dessert_star(R(1, 3), 0))) EXPECT_TRUE(row.ok) << row.quantity;
  EXPECT_THROW(no_dessert_edge(R(1)), DomainError);
  EXPECT_THROW(no_dessert_edge(R(0)), DomainError);
}

TEST(Repro, PerturbedCostShowsMismatch) {
  NamedInstance ni = indistinguishable_edge();
  ni.instance.edges[0].cost_ij = R(11, 10);
  ni.instance.edges[0].box_ij->cost = R(11, 10);
  const auto rows = evaluate(ni);
  EXPECT_TRUE(std::any_of(rows.begin(), rows.end(), [](const ReportRow& r) { return !r.ok; }));
}

TEST(Repro, EmptySelection) {
  ReproOptions opt;
  opt.only = "bundled_star";
  opt.ns.clear();
  EXPECT_TRUE(report(repro_suite(opt)).empty());
  opt.only = "nope";
  EXPECT_THROW(repro_suite(opt), ValidationError);
}
