#include <iostream>

#include "CLI11.hpp"
#include "pandora/cli.hpp"

using pandora::cli::Format;
using pandora::cli::RunConfig;

namespace {

void add_format(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--format", cfg.format, "Output format")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"json", Format::json}, {"csv", Format::csv}, {"text", Format::text}}));
}

void add_bound(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--enum-bound", cfg.enum_bound, "Largest exact enumeration or state space (default: PANDORA_ENUM_BOUND or 2e6)")
      ->check(CLI::PositiveNumber);
}

void add_orientation(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--orientation", cfg.orientation,
                  "canonical, reverse, edge-based, random:SEED, inline '{(u,v),...}' or a JSON file of [u, v] pairs");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pandora's box matching: indices, policies, optimal policies and reproduction tables"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* index = app.add_subcommand("index", "Weitzman index of a box");
  index->add_option("--box", cfg.box_path, "Box JSON {\"dist\": [...], \"cost\": ...}");
  index->add_option("--instance", cfg.instance_path, "Instance JSON");
  index->add_option("--edge", cfg.edge, "With --instance: '(u,v)' selects the box at u of edge {u,v}");
  add_format(index, cfg);

  auto* nested = app.add_subcommand("nested-index", "Annotate a basket outcome tree with its nested indices");
  nested->add_option("--basket", cfg.basket_path, "Basket tree JSON")->required();
  add_format(nested, cfg);

  auto* run = app.add_subcommand("run", "Expected welfare of a matching policy");
  run->add_option("--instance", cfg.instance_path, "Instance JSON")->required();
  run->add_option("--policy", cfg.policy, "Policy")
      ->check(CLI::IsMember({"oriented-desc", "randomized", "best-of-two", "bundled", "vertex-based", "edge-based"}));
  add_orientation(run, cfg);
  run->add_option("--mode", cfg.mode, "exact or montecarlo")->check(CLI::IsMember({"exact", "montecarlo"}));
  run->add_option("--seed", cfg.seed, "Monte Carlo seed");
  run->add_option("--trials", cfg.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  run->add_flag("--trace", cfg.trace, "Include per-realization traces");
  add_bound(run, cfg);
  add_format(run, cfg);

  auto* oracle = app.add_subcommand("oracle", "Optimal policy value by exhaustive dynamic programming");
  oracle->add_option("--instance", cfg.instance_path, "Instance JSON")->required();
  oracle->add_option("--constraint", cfg.constraint, "free, oriented or bundled")
      ->check(CLI::IsMember({"free", "oriented", "bundled"}));
  add_orientation(oracle, cfg);
  oracle->add_flag("--trace", cfg.trace, "Include the optimal policy's trace on every realization");
  add_bound(oracle, cfg);
  add_format(oracle, cfg);

  auto* repro = app.add_subcommand("repro", "Rebuild the worked-example tables and compare every entry");
  repro->add_option("--only", cfg.only, "Instance family")
      ->check(CLI::IsMember(pandora::repro_families()));
  repro->add_option("--alpha", cfg.alphas, "Values of alpha, as p/q (repeatable)");
  repro->add_option("--n", cfg.ns, "Star sizes (repeatable)")->check(CLI::PositiveNumber);
  repro->add_option("--m", cfg.m, "Copies in the star instance")->check(CLI::NonNegativeNumber);
  add_format(repro, cfg);

  auto* check = app.add_subcommand("check", "Run the invariant suite on an instance");
  check->add_option("--instance", cfg.instance_path, "Instance JSON")->required();
  bool no_oracle = false;
  check->add_flag("--no-oracle", no_oracle, "Skip checks that need the optimal policy");
  add_bound(check, cfg);
  add_format(check, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : pandora::cli::kBadInput;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  cfg.oracle_checks = !no_oracle;
  return pandora::cli::run_command(cfg, std::cout, std::cerr);
}
