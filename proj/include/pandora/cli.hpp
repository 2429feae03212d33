#pragma once

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pandora/checks.hpp"
#include "pandora/io.hpp"
#include "pandora/oracle.hpp"
#include "pandora/repro.hpp"

namespace pandora::cli {

using io::json;

enum class Format { json, csv, text };

/// Exit codes.
enum : int { kOk = 0, kFailed = 1, kBadInput = 2, kTooLarge = 3, kUnsupported = 4 };

struct RunConfig {
  std::string command;  // index | nested-index | run | oracle | repro | check
  std::string instance_path;
  std::string box_path;     // index
  std::string basket_path;  // nested-index
  std::string edge;         // index on an instance: "(u,v)" names the box at u
  std::string policy = "oriented-desc";
  std::string orientation = "canonical";  // canonical | reverse | edge-based | random:SEED | {(u,v),...} | file
  std::string mode = "exact";             // exact | montecarlo
  std::optional<std::uint64_t> seed;
  std::size_t trials = 100000;
  double enum_bound = default_enum_bound();
  Format format = Format::json;
  bool trace = false;
  std::string constraint = "free";
  bool oracle_checks = true;
  std::optional<std::string> only;
  std::vector<std::string> alphas;
  std::vector<long> ns;
  std::optional<long> m;
};

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline std::string float_str(double x) {
  std::ostringstream ss;
  ss << std::setprecision(12) << x;
  return ss.str();
}

inline MatchingInstance require_instance(const RunConfig& cfg) {
  if (cfg.instance_path.empty()) throw ValidationError("--instance is required for '" + cfg.command + "'");
  return io::load_instance(cfg.instance_path);
}

inline EvalMode eval_mode(const RunConfig& cfg) {
  if (cfg.mode == "exact") return EvalMode::exact(cfg.enum_bound);
  if (cfg.mode == "montecarlo") {
    if (!cfg.seed) throw ValidationError("--mode montecarlo requires --seed");
    if (cfg.trials == 0) throw ValidationError("--trials must be positive");
    EvalMode m = EvalMode::montecarlo(*cfg.seed, cfg.trials);
    m.enum_bound = cfg.enum_bound;
    return m;
  }
  throw ValidationError("unknown mode '" + cfg.mode + "' (expected exact or montecarlo)");
}

inline Orientation resolve_orientation(const MatchingInstance& inst, const std::string& src) {
  Orientation o;
  if (src == "canonical") {
    o = canonical_orientation(inst);
  } else if (src == "reverse") {
    o = reverse(canonical_orientation(inst));
  } else if (src == "edge-based") {
    o = edge_based_orientation(inst);
  } else if (src.rfind("random:", 0) == 0) {
    std::uint64_t seed = 0;
    try {
      seed = std::stoull(src.substr(7));
    } catch (const std::exception&) {
      throw ValidationError("malformed orientation seed in '" + src + "'");
    }
    std::mt19937_64 gen(seed);
    const std::size_t m = inst.edges.size();
    std::uint64_t bits = 0;
    for (std::size_t e = 0; e < m; ++e) bits |= (gen() & 1u) << e;
    o = orientation_from_bits(inst, bits);
  } else if (!src.empty() && src.front() == '{') {
    o = io::orientation_from_text(src);
  } else if (std::filesystem::exists(src)) {
    const json j = io::read_file(src);
    o = io::with_source(src, [&] { return io::orientation_from_json(j); });
  } else {
    throw ValidationError("unknown orientation '" + src +
                          "' (expected canonical, reverse, edge-based, random:SEED, {(u,v),...} or a JSON file)");
  }
  check_orients(o, inst);
  return o;
}

inline Constraint parse_constraint(const std::string& s) {
  if (s == "free") return Constraint::free;
  if (s == "oriented") return Constraint::oriented;
  if (s == "bundled") return Constraint::bundled;
  throw ValidationError("unknown constraint '" + s + "' (expected free, oriented or bundled)");
}

inline json estimate_json(const WelfareEstimate& w) {
  if (w.exact) return io::rational_report(w.value);
  return {{"mean", w.mean}, {"stderr", w.stderr_}, {"trials", w.trials}};
}

/// Per-realization traces in exact mode, or the first sampled realizations in
/// Monte Carlo mode.
template <class Policy>
json traces_json(const MatchingInstance& inst, const Policy& p, const EvalMode& mode) {
  json out = json::array();
  auto emit = [&](const Realization& r, const std::optional<Rational>& prob) {
    json item = io::trace_to_json(inst, p.run(r));
    json outcome = json::array();
    for (std::size_t e = 0; e < r.size(); ++e) {
      const auto& o = inst.edges[e].outcomes[r[e]];
      outcome.push_back({{"edge", {inst.edges[e].i, inst.edges[e].j}}, {"label_i", o.label_i}, {"label_j", o.label_j},
                         {"total", o.total.str()}});
    }
    item["realization"] = outcome;
    if (prob) item["p"] = prob->str();
    out.push_back(std::move(item));
  };
  if (mode.kind == EvalMode::Kind::exact) {
    for_each_realization(inst, mode.enum_bound, [&](const Realization& r, const Rational& pr) { emit(r, pr); });
  } else {
    std::mt19937_64 gen(mode.seed);
    const RealizationSampler sampler(inst);
    for (std::size_t k = 0; k < std::min<std::size_t>(mode.trials, 100); ++k) emit(sampler.draw(gen), std::nullopt);
  }
  return out;
}

struct RunResult {
  WelfareEstimate welfare;
  std::optional<Orientation> orientation;
  json extra = json::object();
  json traces;
};

template <class Policy>
RunResult evaluate_policy(const MatchingInstance& inst, const Policy& p, const EvalMode& mode, bool trace) {
  RunResult r;
  r.welfare = expected_welfare(inst, p, mode);
  if (trace) r.traces = traces_json(inst, p, mode);
  return r;
}

inline RunResult run_policy(const MatchingInstance& inst, const RunConfig& cfg, const EvalMode& mode) {
  const std::string& name = cfg.policy;
  if (name == "oriented-desc" || name == "edge-based") {
    const Orientation o = name == "edge-based" ? edge_based_orientation(inst) : resolve_orientation(inst, cfg.orientation);
    const OrientedDescending p(inst, o);
    RunResult r = evaluate_policy(inst, p, mode, cfg.trace);
    r.orientation = o;
    return r;
  }
  if (name == "bundled") return evaluate_policy(inst, BundledDescending(inst), mode, cfg.trace);
  if (name == "vertex-based") {
    const VertexBasedDescending p(inst);
    return evaluate_policy(inst, p, mode, cfg.trace);
  }
  if (name == "randomized") {
    RunResult r;
    r.welfare = randomized_matching(inst, mode);
    return r;
  }
  if (name == "best-of-two") {
    const BestOfTwo b = best_of_two(inst, mode.enum_bound);
    const OrientedDescending p(inst, b.chosen);
    RunResult r = evaluate_policy(inst, p, mode, cfg.trace);
    r.orientation = b.chosen;
    r.extra = {{"canonical_welfare", io::rational_report(b.canonical_welfare)},
               {"reverse_welfare", io::rational_report(b.reverse_welfare)}};
    return r;
  }
  throw ValidationError("unknown policy '" + name +
                        "' (expected oriented-desc, randomized, best-of-two, bundled, vertex-based or edge-based)");
}

inline int cmd_index(const RunConfig& cfg, std::ostream& out) {
  PandoraBox box = [&] {
    if (!cfg.box_path.empty()) {
      const json j = io::read_file(cfg.box_path);
      return io::with_source(cfg.box_path, [&] { return io::box_from_json(j); });
    }
    const MatchingInstance inst = require_instance(cfg);
    if (cfg.edge.empty()) throw ValidationError("index on an instance needs --edge '(u,v)' naming the box at u");
    const Orientation o = io::orientation_from_text(cfg.edge);
    if (o.size() != 1) throw ValidationError("--edge names exactly one directed pair");
    const auto& [u, v] = *o.pairs().begin();
    const int e = inst.find_edge(u, v);
    if (e < 0) throw ValidationError("no edge {" + u + "," + v + "} in the instance");
    const EdgeSpec& ed = inst.edges[static_cast<std::size_t>(e)];
    if (!ed.is_independent()) throw UnsupportedModel("edge {" + u + "," + v + "} is joint; it has no per-endpoint box");
    return u == ed.i ? *ed.box_ij : *ed.box_ji;
  }();
  const Rational s = weitzman_index(box);
  if (cfg.format == Format::text) {
    out << s.str() << "\n";
  } else if (cfg.format == Format::csv) {
    out << "sigma_exact,sigma_float\n" << s.str() << "," << float_str(s.to_double()) << "\n";
  } else {
    out << json{{"sigma", io::rational_report(s)}}.dump(2) << "\n";
  }
  return kOk;
}

inline int cmd_nested_index(const RunConfig& cfg, std::ostream& out) {
  if (cfg.basket_path.empty()) throw ValidationError("--basket is required for 'nested-index'");
  const json j = io::read_file(cfg.basket_path);
  const AnnotatedBasket b = io::with_source(cfg.basket_path, [&] { return annotate(io::tree_from_json(j)); });
  if (cfg.format == Format::text) {
    out << b.root().sigma.str() << "\n";
  } else if (cfg.format == Format::csv) {
    out << "sigma1_exact,sigma1_float\n" << b.root().sigma.str() << "," << float_str(b.root().sigma.to_double()) << "\n";
  } else {
    out << io::annotated_to_json(b).dump(2) << "\n";
  }
  return kOk;
}

inline std::optional<Rational> free_opt_if_small(const MatchingInstance& inst, double bound) {
  try {
    return optimal_welfare(inst, Constraint::free, std::nullopt, bound).value;
  } catch (const BoundExceeded&) {
    return std::nullopt;
  }
}

inline int cmd_run(const RunConfig& cfg, std::ostream& out) {
  const MatchingInstance inst = require_instance(cfg);
  const EvalMode mode = eval_mode(cfg);
  const RunResult r = run_policy(inst, cfg, mode);
  const std::optional<Rational> opt = free_opt_if_small(inst, cfg.enum_bound);
  std::optional<double> ratio;
  if (opt && opt->sign() > 0) ratio = r.welfare.exact ? (r.welfare.value / *opt).to_double() : r.welfare.mean / opt->to_double();
  const std::string orient = r.orientation ? io::orientation_to_text(*r.orientation) : std::string();

  if (cfg.format == Format::text) {
    if (r.welfare.exact)
      out << r.welfare.value.str() << "\n";
    else
      out << float_str(r.welfare.mean) << " +- " << float_str(r.welfare.stderr_) << "\n";
  } else if (cfg.format == Format::csv) {
    out << "instance,policy,orientation,mode,value_exact,value_float,ratio_to_opt\n";
    out << csv_field(cfg.instance_path) << "," << cfg.policy << "," << csv_field(orient) << "," << cfg.mode << ","
        << (r.welfare.exact ? r.welfare.value.str() : "") << "," << float_str(r.welfare.mean) << ","
        << (ratio ? float_str(*ratio) : "") << "\n";
  } else {
    json j{{"instance", cfg.instance_path}, {"policy", cfg.policy}, {"mode", cfg.mode}, {"welfare", estimate_json(r.welfare)}};
    if (r.orientation) j["orientation"] = io::orientation_to_json(*r.orientation);
    if (opt) j["oracle_free"] = io::rational_report(*opt);
    j["ratio_to_opt"] = ratio ? json(*ratio) : json(nullptr);
    for (auto it = r.extra.begin(); it != r.extra.end(); ++it) j[it.key()] = it.value();
    if (cfg.trace) j["traces"] = r.traces.is_null() ? json::array() : r.traces;
    out << j.dump(2) << "\n";
  }
  return kOk;
}

inline int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
  const MatchingInstance inst = require_instance(cfg);
  const Constraint c = parse_constraint(cfg.constraint);
  std::optional<Orientation> o;
  if (c == Constraint::oriented) o = resolve_orientation(inst, cfg.orientation);
  const OptimalPolicy opt(inst, c, o, cfg.enum_bound);
  const PolicyValue v = opt.result();
  if (cfg.format == Format::text) {
    out << v.value.str() << "\n";
    return kOk;
  }
  if (cfg.format == Format::csv) {
    out << "instance,constraint,orientation,value_exact,value_float\n"
        << csv_field(cfg.instance_path) << "," << to_string(c) << "," << csv_field(o ? io::orientation_to_text(*o) : "")
        << "," << v.value.str() << "," << float_str(v.value.to_double()) << "\n";
    return kOk;
  }
  json j{{"instance", cfg.instance_path},
         {"constraint", to_string(c)},
         {"value", io::rational_report(v.value)},
         {"state_space", static_cast<long long>(v.state_space)},
         {"states_visited", v.states_visited}};
  if (o) j["orientation"] = io::orientation_to_json(*o);
  const OracleAction& a = v.root_action;
  if (a.kind == OracleAction::Kind::stop) {
    j["first_action"] = {{"action", "stop"}};
  } else {
    const EdgeSpec& e = inst.edges[static_cast<std::size_t>(a.edge)];
    j["first_action"] = {{"action", a.kind == OracleAction::Kind::open ? "open" : "open_both"}, {"edge", {e.i, e.j}}, {"at", a.at}};
  }
  if (cfg.trace) j["optimal_action_trace"] = traces_json(inst, opt, EvalMode::exact(cfg.enum_bound));
  out << j.dump(2) << "\n";
  return kOk;
}

inline int cmd_repro(const RunConfig& cfg, std::ostream& out) {
  ReproOptions opt;
  opt.only = cfg.only;
  if (!cfg.alphas.empty()) {
    opt.alphas.clear();
    for (const auto& a : cfg.alphas) opt.alphas.push_back(Rational::parse(a));
  }
  if (!cfg.ns.empty()) opt.ns = cfg.ns;
  if (cfg.m) opt.m = *cfg.m;
  const auto rows = report(repro_suite(opt));
  bool all = true;
  for (const auto& r : rows) all = all && r.ok;
  if (cfg.format == Format::csv) {
    out << "instance,quantity,computed_exact,computed_float,relation,expected_exact,expected_float,ok\n";
    for (const auto& r : rows)
      out << csv_field(r.instance) << "," << csv_field(r.quantity) << "," << r.computed.str() << ","
          << float_str(r.computed.to_double()) << "," << csv_field(r.relation) << "," << r.expected.str() << ","
          << float_str(r.expected.to_double()) << "," << (r.ok ? "true" : "false") << "\n";
  } else if (cfg.format == Format::text) {
    for (const auto& r : rows)
      out << (r.ok ? "ok    " : "FAIL  ") << r.instance << "  " << r.quantity << ": " << r.computed.str() << " "
          << r.relation << " " << r.expected.str() << "\n";
  } else {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"instance", r.instance},
                     {"quantity", r.quantity},
                     {"computed", io::rational_report(r.computed)},
                     {"relation", r.relation},
                     {"expected", io::rational_report(r.expected)},
                     {"ok", r.ok}});
    out << json{{"rows", arr}, {"all_ok", all}}.dump(2) << "\n";
  }
  return all ? kOk : kFailed;
}

inline int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const MatchingInstance inst = require_instance(cfg);
  CheckOptions opt;
  opt.enum_bound = cfg.enum_bound;
  opt.state_bound = cfg.enum_bound;
  opt.oracle = cfg.oracle_checks;
  const auto results = check_instance(inst, opt);
  bool all = true;
  for (const auto& r : results) all = all && r.ok;
  if (cfg.format == Format::csv) {
    out << "check,ok,detail\n";
    for (const auto& r : results) out << csv_field(r.name) << "," << (r.ok ? "true" : "false") << "," << csv_field(r.detail) << "\n";
  } else if (cfg.format == Format::text) {
    for (const auto& r : results) out << (r.ok ? "PASS  " : "FAIL  ") << r.name << ": " << r.detail << "\n";
  } else {
    json arr = json::array();
    for (const auto& r : results) arr.push_back({{"check", r.name}, {"ok", r.ok}, {"detail", r.detail}});
    out << json{{"instance", cfg.instance_path}, {"checks", arr}, {"all_ok", all}}.dump(2) << "\n";
  }
  return all ? kOk : kFailed;
}

}  // namespace detail

/// Executes one command; errors go to `err` with a nonzero exit status.
inline int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "index") return detail::cmd_index(cfg, out);
    if (cfg.command == "nested-index") return detail::cmd_nested_index(cfg, out);
    if (cfg.command == "run") return detail::cmd_run(cfg, out);
    if (cfg.command == "oracle") return detail::cmd_oracle(cfg, out);
    if (cfg.command == "repro") return detail::cmd_repro(cfg, out);
    if (cfg.command == "check") return detail::cmd_check(cfg, out);
    err << "error: unknown command '" << cfg.command << "'\n";
    return kBadInput;
  } catch (const BoundExceeded& e) {
    err << "error: " << e.what() << " (estimate " << std::llround(e.estimate()) << ", bound " << std::llround(e.bound())
        << "; set with --enum-bound or PANDORA_ENUM_BOUND)\n";
    return kTooLarge;
  } catch (const UnsupportedModel& e) {
    err << "error: " << e.what() << "\n";
    return kUnsupported;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    for (const auto& issue : e.issues()) err << "  " << issue << "\n";
    return kBadInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }
}

}  // namespace pandora::cli
