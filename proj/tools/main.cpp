#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "beliefsim/commands.hpp"

namespace {

beliefsim::ScenarioKind parse_kind_or_exit(const std::string& text) {
  if (text == "ring") return beliefsim::ScenarioKind::Ring;
  if (text == "star") return beliefsim::ScenarioKind::Star;
  if (text == "random") return beliefsim::ScenarioKind::Random;
  throw CLI::ValidationError("--kind", "expected ring, star, or random");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sample-based social learning simulator and bound toolkit"};
  app.require_subcommand(1);

  // run
  std::string run_config;
  std::string run_out;
  std::uint64_t run_seed = 0;
  int run_seeds = 0;
  long long run_horizon = 0;
  std::string run_rule;
  long long run_thin = 0;
  double run_threshold = 0.0;
  int run_jobs = 0;
  auto* run_cmd = app.add_subcommand("run", "simulate and write trace files plus a summary");
  run_cmd->add_option("--config", run_config, "config file path")->required();
  run_cmd->add_option("--out", run_out, "output directory")->required();
  auto* run_seed_opt = run_cmd->add_option("--seed", run_seed, "override the base seed");
  auto* run_seeds_opt = run_cmd->add_option("--seeds", run_seeds, "run N consecutive seeds");
  auto* run_horizon_opt = run_cmd->add_option("--horizon", run_horizon, "override the horizon");
  auto* run_rule_opt =
      run_cmd->add_option("--rule", run_rule,
                          "geometric-sample | full-belief | sample-arithmetic");
  auto* run_thin_opt = run_cmd->add_option("--thin", run_thin, "record every K rounds");
  auto* run_threshold_opt =
      run_cmd->add_option("--threshold", run_threshold, "learning threshold for the summary");
  run_cmd->add_option("--jobs", run_jobs, "worker cap (0 = library default)");

  // bounds
  std::string bounds_config;
  std::string bounds_out;
  auto* bounds_cmd = app.add_subcommand("bounds", "analytic bound report for a config");
  bounds_cmd->add_option("--config", bounds_config, "config file path")->required();
  auto* bounds_out_opt = bounds_cmd->add_option("--out", bounds_out, "write report here instead of stdout");

  // verify
  std::string verify_config;
  std::string verify_out;
  int verify_seeds = 0;
  double verify_threshold = 0.0;
  long long verify_burn_in = -1;
  int verify_jobs = 0;
  auto* verify_cmd =
      app.add_subcommand("verify", "run an ensemble and evaluate the criteria table");
  verify_cmd->add_option("--config", verify_config, "config file path")->required();
  verify_cmd->add_option("--out", verify_out, "output directory")->required();
  auto* verify_seeds_opt = verify_cmd->add_option("--seeds", verify_seeds, "ensemble size");
  auto* verify_threshold_opt =
      verify_cmd->add_option("--threshold", verify_threshold, "learning threshold");
  auto* verify_burn_in_opt = verify_cmd->add_option("--burn-in", verify_burn_in,
                                                    "first round included in tail statistics");
  verify_cmd->add_option("--jobs", verify_jobs, "worker cap (0 = library default)");

  // gen
  std::string gen_kind = "ring";
  int gen_n = 5;
  int gen_m = 2;
  double gen_self = 0.6;
  double gen_p = 0.4;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen", "generate a runnable config");
  gen_cmd->add_option("--kind", gen_kind, "ring | star | random");
  gen_cmd->add_option("--n", gen_n, "agent count");
  gen_cmd->add_option("--m", gen_m, "state count");
  gen_cmd->add_option("--self", gen_self, "self-confidence weight");
  gen_cmd->add_option("--p", gen_p, "edge probability (random kind)");
  gen_cmd->add_option("--seed", gen_seed, "generator seed");
  gen_cmd->add_option("--out", gen_out, "config file to write")->required();

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) {
    beliefsim::RunOptions options;
    options.config_path = run_config;
    options.out_dir = run_out;
    if (run_seed_opt->count() > 0) options.seed = run_seed;
    if (run_seeds_opt->count() > 0) options.seeds_count = run_seeds;
    if (run_horizon_opt->count() > 0) options.horizon = run_horizon;
    if (run_rule_opt->count() > 0) {
      const auto rule = beliefsim::parse_rule(run_rule);
      if (!rule) {
        std::cerr << "unknown rule '" << run_rule << "'\n";
        return beliefsim::kExitValidationFailure;
      }
      options.rule = *rule;
    }
    if (run_thin_opt->count() > 0) options.thinning = run_thin;
    if (run_threshold_opt->count() > 0) options.threshold = run_threshold;
    options.parallelism = run_jobs;
    return beliefsim::cmd_run(options, std::cout, std::cerr);
  }
  if (bounds_cmd->parsed()) {
    beliefsim::BoundsOptions options;
    options.config_path = bounds_config;
    if (bounds_out_opt->count() > 0) options.out_file = bounds_out;
    return beliefsim::cmd_bounds(options, std::cout, std::cerr);
  }
  if (verify_cmd->parsed()) {
    beliefsim::VerifyOptions options;
    options.config_path = verify_config;
    options.out_dir = verify_out;
    if (verify_seeds_opt->count() > 0) options.seeds_count = verify_seeds;
    if (verify_threshold_opt->count() > 0) options.threshold = verify_threshold;
    if (verify_burn_in_opt->count() > 0) options.burn_in = verify_burn_in;
    options.parallelism = verify_jobs;
    return beliefsim::cmd_verify(options, std::cout, std::cerr);
  }
  if (gen_cmd->parsed()) {
    beliefsim::GenOptions options;
    try {
      options.kind = parse_kind_or_exit(gen_kind);
    } catch (const CLI::ValidationError& ex) {
      std::cerr << ex.what() << "\n";
      return beliefsim::kExitValidationFailure;
    }
    options.n = gen_n;
    options.m = gen_m;
    options.self_weight = gen_self;
    options.edge_prob = gen_p;
    options.seed = gen_seed;
    options.out_path = gen_out;
    return beliefsim::cmd_gen(options, std::cout, std::cerr);
  }
  return beliefsim::kExitOk;
}
