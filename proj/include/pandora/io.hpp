#pragma once

#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "pandora/algorithms.hpp"
#include "pandora/instance.hpp"
#include "pandora/nested.hpp"

namespace pandora::io {

using nlohmann::json;

// JSON encodings. Rationals are written as "num/den" strings and read from
// strings ("p/q", integers, finite decimals) or from JSON numbers that are
// integers or dyadics with a small denominator. Every error names the JSON
// path of the offending field.

constexpr long kMaxDyadicDenominator = 1L << 20;

inline Rational rational_from_json(const json& j, const std::string& path) {
  try {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number_unsigned()) return Rational(j.get<unsigned long long>());
    if (j.is_number_float()) {
      const Rational r = Rational::from_double(j.get<double>());
      if (r.raw().get_den() > kMaxDyadicDenominator)
        throw ValidationError("number " + j.dump() + " is not exact; write it as a \"p/q\" string");
      return r;
    }
  } catch (const Error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  throw ValidationError(path + ": expected a rational (string or number), got " + std::string(j.type_name()));
}

inline json rational_to_json(const Rational& r) { return r.str(); }

/// {"exact": "p/q", "float": x} for human-facing output.
inline json rational_report(const Rational& r) { return {{"exact", r.str()}, {"float", r.to_double()}}; }

inline const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ValidationError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(path + ": missing field \"" + key + "\"");
  return *it;
}

inline std::string string_field(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_string()) throw ValidationError(path + "." + key + ": expected a string");
  return v.get<std::string>();
}

inline const json& array_field(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_array()) throw ValidationError(path + "." + key + ": expected an array");
  return v;
}

// --- distributions and boxes ---------------------------------------------

inline DiscreteDistribution distribution_from_json(const json& j, const std::string& path = "dist") {
  if (!j.is_array()) throw ValidationError(path + ": expected an array of {\"v\", \"p\"}");
  std::vector<Atom> atoms;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string at = path + "[" + std::to_string(k) + "]";
    atoms.push_back({rational_from_json(field(j[k], "v", at), at + ".v"), rational_from_json(field(j[k], "p", at), at + ".p")});
  }
  try {
    return DiscreteDistribution(std::move(atoms));
  } catch (const Error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline json distribution_to_json(const DiscreteDistribution& d) {
  json out = json::array();
  for (const Atom& a : d.atoms()) out.push_back({{"v", a.value.str()}, {"p", a.prob.str()}});
  return out;
}

inline PandoraBox box_from_json(const json& j, const std::string& path = "box") {
  DiscreteDistribution d = distribution_from_json(field(j, "dist", path), path + ".dist");
  Rational c = rational_from_json(field(j, "cost", path), path + ".cost");
  try {
    return PandoraBox(std::move(d), std::move(c));
  } catch (const Error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline json box_to_json(const PandoraBox& b) { return {{"dist", distribution_to_json(b.dist)}, {"cost", b.cost.str()}}; }

// --- baskets -------------------------------------------------------------

inline OutcomeNode tree_from_json(const json& j, const std::string& path = "node") {
  if (!j.is_object()) throw ValidationError(path + ": expected an object");
  if (j.contains("value")) {
    if (j.contains("branches")) throw ValidationError(path + ": a node has either \"value\" or \"branches\", not both");
    return OutcomeNode::leaf(rational_from_json(j["value"], path + ".value"));
  }
  OutcomeNode n = OutcomeNode::stage(rational_from_json(field(j, "cost", path), path + ".cost"));
  const json& bs = array_field(j, "branches", path);
  for (std::size_t k = 0; k < bs.size(); ++k) {
    const std::string at = path + ".branches[" + std::to_string(k) + "]";
    n.branch(string_field(bs[k], "label", at), rational_from_json(field(bs[k], "p", at), at + ".p"),
             tree_from_json(field(bs[k], "node", at), at + ".node"));
  }
  return n;
}

inline json tree_to_json(const OutcomeNode& n) {
  if (n.is_leaf()) return {{"value", n.value->str()}};
  json bs = json::array();
  for (std::size_t k = 0; k < n.children.size(); ++k)
    bs.push_back({{"label", n.signals[k].label}, {"p", n.signals[k].prob.str()}, {"node", tree_to_json(n.children[k])}});
  return {{"cost", n.cost.str()}, {"branches", bs}};
}

/// Annotated tree: every internal node carries its index and the law of the
/// next capped value; every node carries the law of its own capped value.
inline json annotated_to_json(const AnnotatedBasket& b, int id = 0) {
  const BasketNode& n = b.node(id);
  json out;
  if (n.is_leaf()) {
    out["value"] = n.value->str();
  } else {
    out["cost"] = n.cost.str();
    out["sigma"] = rational_report(n.sigma);
    out["kappa_next"] = distribution_to_json(*n.kappa_next);
    json bs = json::array();
    for (int c : n.children) {
      const BasketNode& child = b.node(c);
      bs.push_back({{"label", child.label}, {"p", child.prob.str()}, {"node", annotated_to_json(b, c)}});
    }
    out["branches"] = bs;
  }
  out["kappa"] = distribution_to_json(n.kappa);
  return out;
}

// --- instances -----------------------------------------------------------

inline EdgeSpec edge_from_json(const json& j, const std::string& path) {
  const VertexId i = string_field(j, "i", path);
  const VertexId v = string_field(j, "j", path);
  const bool independent = j.contains("box_ij") || j.contains("box_ji");
  const bool joint = j.contains("joint");
  if (independent == joint)
    throw ValidationError(path + ": an edge needs either \"box_ij\" and \"box_ji\" or \"c_ij\", \"c_ji\" and \"joint\"");
  if (independent)
    return EdgeSpec::independent(i, v, box_from_json(field(j, "box_ij", path), path + ".box_ij"),
                                 box_from_json(field(j, "box_ji", path), path + ".box_ji"));
  std::vector<JointOutcome> outs;
  const json& arr = array_field(j, "joint", path);
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string at = path + ".joint[" + std::to_string(k) + "]";
    outs.push_back({string_field(arr[k], "label_i", at), string_field(arr[k], "label_j", at),
                    rational_from_json(field(arr[k], "total", at), at + ".total"),
                    rational_from_json(field(arr[k], "p", at), at + ".p")});
  }
  return EdgeSpec::joint(i, v, rational_from_json(field(j, "c_ij", path), path + ".c_ij"),
                         rational_from_json(field(j, "c_ji", path), path + ".c_ji"), std::move(outs));
}

/// Parses and normalizes an instance.
inline MatchingInstance instance_from_json(const json& j) {
  MatchingInstance inst;
  if (!j.is_object()) throw ValidationError("instance: expected an object");
  if (j.contains("vertices")) {
    const json& vs = array_field(j, "vertices", "instance");
    for (std::size_t k = 0; k < vs.size(); ++k) {
      if (!vs[k].is_string()) throw ValidationError("instance.vertices[" + std::to_string(k) + "]: expected a string");
      inst.vertices.push_back(vs[k].get<std::string>());
    }
  }
  const json& es = array_field(j, "edges", "instance");
  for (std::size_t k = 0; k < es.size(); ++k) inst.edges.push_back(edge_from_json(es[k], "edges[" + std::to_string(k) + "]"));
  return normalize(std::move(inst));
}

inline json edge_to_json(const EdgeSpec& e) {
  if (e.is_independent()) return {{"i", e.i}, {"j", e.j}, {"box_ij", box_to_json(*e.box_ij)}, {"box_ji", box_to_json(*e.box_ji)}};
  json outs = json::array();
  for (const auto& o : e.outcomes)
    outs.push_back({{"label_i", o.label_i}, {"label_j", o.label_j}, {"total", o.total.str()}, {"p", o.prob.str()}});
  return {{"i", e.i}, {"j", e.j}, {"c_ij", e.cost_ij.str()}, {"c_ji", e.cost_ji.str()}, {"joint", outs}};
}

inline json instance_to_json(const MatchingInstance& inst) {
  json es = json::array();
  for (const auto& e : inst.edges) es.push_back(edge_to_json(e));
  return {{"vertices", inst.vertices}, {"edges", es}};
}

// --- orientations --------------------------------------------------------

/// [["i","j"], ...] or {"pairs": [["i","j"], ...]}.
inline Orientation orientation_from_json(const json& j) {
  const json& arr = j.is_object() ? array_field(j, "pairs", "orientation") : j;
  if (!arr.is_array()) throw ValidationError("orientation: expected an array of [u, v] pairs");
  Orientation o;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const json& p = arr[k];
    if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
      throw ValidationError("orientation[" + std::to_string(k) + "]: expected a pair of vertex ids");
    o.insert(p[0].get<std::string>(), p[1].get<std::string>());
  }
  return o;
}

/// Inline form "{(i,j),(k,l)}"; braces optional.
inline Orientation orientation_from_text(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.size() >= 2 && s.front() == '{' && s.back() == '}') s = s.substr(1, s.size() - 2);
  static const std::regex pair_re(R"(\(([^,()]+),([^,()]+)\))");
  Orientation o;
  std::size_t consumed = 0;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), pair_re); it != std::sregex_iterator(); ++it) {
    const auto gap = s.substr(consumed, static_cast<std::size_t>(it->position()) - consumed);
    if (gap != (consumed == 0 ? "" : ",")) throw ValidationError("malformed orientation '" + text + "'");
    o.insert((*it)[1].str(), (*it)[2].str());
    consumed = static_cast<std::size_t>(it->position() + it->length());
  }
  if (consumed != s.size()) throw ValidationError("malformed orientation '" + text + "'");
  return o;
}

inline json orientation_to_json(const Orientation& o) {
  json out = json::array();
  for (const auto& [u, v] : o.pairs()) out.push_back({u, v});
  return out;
}

inline std::string orientation_to_text(const Orientation& o) {
  std::string s = "{";
  for (const auto& [u, v] : o.pairs()) s += (s.size() > 1 ? ",(" : "(") + u + "," + v + ")";
  return s + "}";
}

// --- traces --------------------------------------------------------------

inline json trace_to_json(const MatchingInstance& inst, const RunTrace& t) {
  json steps = json::array();
  for (const RunStep& s : t.steps)
    steps.push_back({{"action", s.kind == ActionKind::open ? "open" : "match"},
                     {"edge", {inst.edges[static_cast<std::size_t>(s.edge)].i, inst.edges[static_cast<std::size_t>(s.edge)].j}},
                     {"at", s.at},
                     {"index", s.index.str()}});
  json opened = json::array();
  for (std::size_t e = 0; e < t.inspected.size(); ++e) {
    if (t.inspected[e][0]) opened.push_back({inst.edges[e].i, inst.edges[e].j});
    if (t.inspected[e][1]) opened.push_back({inst.edges[e].j, inst.edges[e].i});
  }
  json matched = json::array();
  for (int e : t.matching) matched.push_back({inst.edges[static_cast<std::size_t>(e)].i, inst.edges[static_cast<std::size_t>(e)].j});
  return {{"opened", opened}, {"matching", matched}, {"welfare", t.welfare.str()}, {"steps", steps}};
}

// --- files ---------------------------------------------------------------

/// Reads a JSON document; syntax errors report line and column.
inline json parse_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    if (auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw ValidationError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

/// Wraps validation errors with the source file name.
template <class F>
auto with_source(const std::string& source, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what(), e.issues());
  }
}

inline MatchingInstance load_instance(const std::string& path) {
  const json j = read_file(path);
  return with_source(path, [&] { return instance_from_json(j); });
}

}  // namespace pandora::io
