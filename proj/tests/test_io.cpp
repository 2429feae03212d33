#include <gtest/gtest.h>

#include "pandora/io.hpp"
#include "pandora/repro.hpp"

using namespace pandora;
using io::json;

namespace {
Rational R(long n, long d = 1) { return Rational(n, d); }
}  // namespace

TEST(RationalJson, AcceptedForms) {
  EXPECT_EQ(io::rational_from_json(json("3/6"), "x"), R(1, 2));
  EXPECT_EQ(io::rational_from_json(json("-0.25"), "x"), R(-1, 4));
  EXPECT_EQ(io::rational_from_json(json(7), "x"), R(7));
  EXPECT_EQ(io::rational_from_json(json(0.375), "x"), R(3, 8));
  EXPECT_EQ(io::rational_to_json(R(-2, 4)), json("-1/2"));
}

TEST(RationalJson, RejectsInexactAndMalformed) {
  EXPECT_THROW(io::rational_from_json(json(0.1), "x"), ValidationError);
  EXPECT_THROW(io::rational_from_json(json("1/0"), "x"), ValidationError);
  EXPECT_THROW(io::rational_from_json(json("abc"), "x"), ValidationError);
  EXPECT_THROW(io::rational_from_json(json::array(), "x"), ValidationError);
  try {
    io::rational_from_json(json(0.1), "edges[0].box_ij.cost");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("edges[0].box_ij.cost"), std::string::npos);
  }
}

TEST(InstanceJson, RoundTripsExactly) {
  for (const MatchingInstance& inst :
       {indistinguishable_edge_instance(), no_dessert_star_instance(R(1, 4), 2), bundled_star_instance(3)}) {
    const json j = io::instance_to_json(inst);
    const MatchingInstance back = io::instance_from_json(json::parse(j.dump()));
    EXPECT_EQ(io::instance_to_json(back), j);
    ASSERT_EQ(back.edges.size(), inst.edges.size());
    for (std::size_t e = 0; e < inst.edges.size(); ++e) {
      EXPECT_EQ(back.edges[e].box_ij->dist.atoms().size(), inst.edges[e].box_ij->dist.atoms().size());
      EXPECT_EQ(back.edges[e].cost_ji, inst.edges[e].cost_ji);
    }
  }
}

TEST(InstanceJson, JointForm) {
  const json j = json::parse(R"({"edges": [{"i": "b", "j": "a", "c_ij": "1/2", "c_ji": 0,
    "joint": [{"label_i": "x", "label_j": "y", "total": "5", "p": "1/2"},
              {"label_i": "x", "label_j": "z", "total": -1, "p": "1/2"}]}]})");
  const MatchingInstance inst = io::instance_from_json(j);
  ASSERT_EQ(inst.edges.size(), 1u);
  EXPECT_EQ(inst.edges[0].i, "a");
  EXPECT_EQ(inst.edges[0].cost_ij, R(0));
  EXPECT_EQ(inst.edges[0].cost_ji, R(1, 2));
  EXPECT_EQ(inst.vertices, (std::vector<VertexId>{"a", "b"}));
  EXPECT_EQ(io::instance_from_json(io::instance_to_json(inst)).edges[0].outcomes.size(), 2u);
}

TEST(InstanceJson, ErrorsNameTheField) {
  auto message = [](const char* text) {
    try {
      io::instance_from_json(json::parse(text));
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message(R"({"edges": [{"i": "a", "j": "b", "box_ij": {"dist": [{"v": 1, "p": "1/2"}], "cost": 0},
    "box_ji": {"dist": [{"v": 1, "p": 1}], "cost": 0}}]})").find("edges[0].box_ij"), std::string::npos);
  EXPECT_NE(message(R"({"edges": [{"i": "a", "j": "b"}]})").find("edges[0]"), std::string::npos);
  EXPECT_NE(message(R"({"edges": [{"i": "a", "j": "b", "box_ij": {"dist": [{"v": 1, "p": 1}]},
    "box_ji": {"dist": [{"v": 1, "p": 1}], "cost": 0}}]})").find("missing field \"cost\""), std::string::npos);
  EXPECT_NE(message(R"({"vertices": []})").find("edges"), std::string::npos);
}

TEST(ParseText, ReportsLineAndColumn) {
  try {
    io::parse_text("{\n  \"edges\": [\n    oops\n  ]\n}", "f.json");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("f.json:3:", 0), 0u) << e.what();
  }
}

TEST(TreeJson, RoundTripAndAnnotation) {
  const json j = json::parse(R"({"cost": 1, "branches": [
    {"label": "hi", "p": "1/2", "node": {"cost": "1/2", "branches": [
      {"label": "a", "p": "1/4", "node": {"value": 8}}, {"label": "b", "p": "3/4", "node": {"value": 2}}]}},
    {"label": "lo", "p": "1/2", "node": {"cost": "1/2", "branches": [
      {"label": "a", "p": "1/4", "node": {"value": 0}}, {"label": "b", "p": "3/4", "node": {"value": -6}}]}}]})");
  const OutcomeNode tree = io::tree_from_json(j);
  EXPECT_EQ(io::tree_from_json(io::tree_to_json(tree)).children.size(), 2u);
  const AnnotatedBasket b = annotate(tree);
  const json out = io::annotated_to_json(b);
  EXPECT_EQ(out["sigma"]["exact"], "1");
  EXPECT_EQ(out["branches"][0]["node"]["sigma"]["exact"], "6");
  EXPECT_EQ(out["branches"][1]["node"]["sigma"]["exact"], "-2");
  EXPECT_THROW(io::tree_from_json(json::parse(R"({"value": 1, "branches": []})")), ValidationError);
  EXPECT_THROW(io::tree_from_json(json::parse(R"({"cost": 0})")), ValidationError);
}

TEST(OrientationText, ParsesAndRejects) {
  const Orientation o = io::orientation_from_text("{(i,j), (k,l)}");
  EXPECT_TRUE(o.contains("i", "j"));
  EXPECT_TRUE(o.contains("k", "l"));
  EXPECT_EQ(o.size(), 2u);
  EXPECT_EQ(io::orientation_to_text(o), "{(i,j),(k,l)}");
  EXPECT_EQ(io::orientation_from_text("{}").size(), 0u);
  EXPECT_THROW(io::orientation_from_text("{(i,j)(k,l)}"), ValidationError);
  EXPECT_THROW(io::orientation_from_text("{(i,j,k)}"), ValidationError);
  EXPECT_THROW(io::orientation_from_text("i,j"), ValidationError);
  EXPECT_EQ(io::orientation_from_json(json::parse(R"([["j","i"]])")), io::orientation_from_text("(j,i)"));
  EXPECT_THROW(io::orientation_from_json(json::parse(R"([["j"]])")), ValidationError);
}
