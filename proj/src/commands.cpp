#include "beliefsim/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "beliefsim/errors.hpp"

namespace beliefsim {

namespace {

using nlohmann::ordered_json;

constexpr double kLearningRateGeometric = 0.95;
constexpr double kFloorViolationLimit = 0.01;
constexpr double kCountGrowthFloor = 0.5;
constexpr long long kPlateauBound = 3;
constexpr double kPlateauSeedFraction = 0.9;

std::filesystem::path trace_file_name(std::uint64_t seed) {
  return "trace_seed" + std::to_string(seed) + ".csv";
}

void ensure_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ValidationError& ex) {
    err << "validation error: " << ex.what() << "\n";
    return kExitValidationFailure;
  } catch (const IoError& ex) {
    err << "io error: " << ex.what() << "\n";
    return kExitIoFailure;
  }
}

}  // namespace

std::vector<std::uint64_t> effective_seeds(const ConfigDoc& doc,
                                           std::optional<std::uint64_t> seed_override,
                                           std::optional<int> seeds_count) {
  std::vector<std::uint64_t> seeds = doc.seeds;
  if (seed_override) seeds = {*seed_override};
  if (seeds_count) {
    if (*seeds_count < 1) {
      throw ValidationError(ErrorCode::BadConfig, "--seeds must be at least 1");
    }
    const std::uint64_t base = seeds.front();
    seeds.clear();
    for (int k = 0; k < *seeds_count; ++k) {
      seeds.push_back(base + static_cast<std::uint64_t>(k));
    }
  }
  return seeds;
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    ConfigDoc doc = load_config(options.config_path);
    const std::string base_hash = base_config_hash(doc);

    if (options.horizon) doc.horizon = *options.horizon;
    if (options.rule) doc.rule = *options.rule;
    if (options.thinning) doc.thinning = *options.thinning;
    if (options.threshold) doc.diagnostics.threshold = *options.threshold;
    const auto seeds = effective_seeds(doc, options.seed, options.seeds_count);
    doc.seeds = seeds;

    SimulationConfig config = build_sim_config(doc);
    ensure_out_dir(options.out_dir);

    const auto ensemble = run_ensemble(config, seeds, options.parallelism);

    ordered_json summary;
    summary["base_config_hash"] = base_hash;
    summary["rule"] = std::string(rule_name(config.rule));
    summary["horizon"] = config.horizon;
    summary["thinning"] = config.thinning;
    summary["threshold"] = doc.diagnostics.threshold;
    ordered_json runs = ordered_json::array();
    int all_learned = 0;
    for (const SimulationTrace& trace : ensemble) {
      const auto file_name = trace_file_name(trace.seed);
      write_text_file(options.out_dir / file_name, trace_csv_string(trace));

      const auto verdicts =
          detect_learning(trace, config.space.true_state, doc.diagnostics.threshold);
      ordered_json agents = ordered_json::array();
      bool everyone = true;
      for (int i = 0; i < config.net.n; ++i) {
        const LearningVerdict& v = verdicts[static_cast<std::size_t>(i)];
        agents.push_back({{"agent", i},
                          {"learned", v.learned},
                          {"learning_time", v.learning_time},
                          {"final_belief", v.final_belief}});
        everyone = everyone && v.learned;
      }
      if (everyone) ++all_learned;
      runs.push_back({{"seed", trace.seed},
                      {"effective_config_hash", trace.config_hash},
                      {"trace_file", file_name.string()},
                      {"all_learned", everyone},
                      {"invariant_violations", trace.invariant_violations},
                      {"agents", std::move(agents)}});
    }
    summary["runs"] = std::move(runs);
    summary["all_learned_rate"] =
        static_cast<double>(all_learned) / static_cast<double>(ensemble.size());
    write_text_file(options.out_dir / "summary.json", summary.dump(2) + "\n");

    out << "wrote " << ensemble.size() << " trace file(s) and summary.json to "
        << options.out_dir.string() << "\n";
    return kExitOk;
  });
}

int cmd_bounds(const BoundsOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    const ConfigDoc doc = load_config(options.config_path);
    const SimulationConfig config = build_sim_config(doc);
    const BoundReport report = build_bound_report(config, {}, doc.diagnostics);

    for (const ThetaGeometry& geom : report.per_theta) {
      if (geom.empty_expert_set) {
        err << "warning: no expert separates state " << geom.theta
            << " from the true state; bounds omitted for it\n";
      }
    }
    if (!report.collective) {
      err << "warning: collective distinguishability fails for pairs:";
      for (const auto& [a, b] : report.violating_pairs) err << " (" << a << "," << b << ")";
      err << "\n";
    }

    const std::string text = bound_report_to_json(report).dump(2) + "\n";
    if (options.out_file) {
      write_text_file(*options.out_file, text);
      out << "wrote bound report to " << options.out_file->string() << "\n";
    } else {
      out << text;
    }
    return kExitOk;
  });
}

std::vector<CriterionResult> evaluate_criteria(const SimulationConfig& config,
                                               const std::vector<SimulationTrace>& ensemble,
                                               const BoundReport& report,
                                               const DiagnosticsOptions& options) {
  std::vector<CriterionResult> results;
  const bool counting_rule = config.rule == Rule::GeometricSample;
  const EmpiricalStats& emp = *report.empirical;

  {
    CriterionResult c;
    c.name = "learning-convergence";
    std::ostringstream detail;
    if (config.rule == Rule::SampleArithmetic) {
      c.applicable = false;
      detail << "no convergence guarantee for sample-arithmetic; all-agent rate "
             << emp.all_learned_rate;
    } else {
      const double required =
          config.rule == Rule::FullBeliefArithmetic ? 1.0 : kLearningRateGeometric;
      c.passed = emp.all_learned_rate >= required - 1e-12;
      detail << "all-agent learning rate " << emp.all_learned_rate << " (required >= " << required
             << ", threshold " << options.threshold << ")";
    }
    c.detail = detail.str();
    results.push_back(std::move(c));
  }

  {
    CriterionResult c;
    c.name = "true-state-floor";
    if (!counting_rule) {
      c.applicable = false;
      c.detail = "pooled-belief floor check applies to the geometric-sample rule";
    } else {
      c.passed = emp.floor.overall_frequency <= kFloorViolationLimit;
      std::ostringstream detail;
      detail << "violation frequency " << emp.floor.overall_frequency << " over "
             << emp.floor.checks << " checks (limit " << kFloorViolationLimit << ")";
      c.detail = detail.str();
    }
    results.push_back(std::move(c));
  }

  {
    CriterionResult c;
    c.name = "count-growth";
    if (!counting_rule) {
      c.applicable = false;
      c.detail = "counter growth applies to the geometric-sample rule";
    } else {
      // Quantified over seeds where every agent learned.
      int passing_seeds = 0;
      double worst = 1.0;
      bool ok = true;
      for (std::size_t s = 0; s < ensemble.size(); ++s) {
        const auto verdicts =
            detect_learning(ensemble[s], config.space.true_state, options.threshold);
        const bool everyone = std::all_of(verdicts.begin(), verdicts.end(),
                                          [](const LearningVerdict& v) { return v.learned; });
        if (!everyone) continue;
        ++passing_seeds;
        for (int i = 0; i < config.net.n; ++i) {
          const double ratio = emp.growth.final_ratio[static_cast<std::size_t>(i)][s];
          worst = std::min(worst, ratio);
          ok = ok && ratio >= kCountGrowthFloor;
        }
      }
      c.passed = ok;
      std::ostringstream detail;
      if (passing_seeds == 0) {
        detail << "vacuous: no seed had every agent learn";
      } else {
        detail << "min n(theta*)/(T+1) over " << passing_seeds << " passing seed(s) = " << worst
               << " (floor " << kCountGrowthFloor << ")";
      }
      c.detail = detail.str();
    }
    results.push_back(std::move(c));
  }

  {
    CriterionResult c;
    c.name = "plateau";
    if (!counting_rule) {
      c.applicable = false;
      c.detail = "wrong-count plateau applies to the geometric-sample rule";
    } else {
      bool ok = true;
      double worst_fraction = 1.0;
      for (const auto& entry : emp.plateau.entries) {
        const double fraction = entry.fraction_within(kPlateauBound);
        worst_fraction = std::min(worst_fraction, fraction);
        ok = ok && fraction >= kPlateauSeedFraction;
      }
      c.passed = ok;
      std::ostringstream detail;
      detail << emp.plateau.entries.size() << " identifiable pair(s); worst share of seeds with"
             << " delta <= " << kPlateauBound << " is " << worst_fraction << " (required >= "
             << kPlateauSeedFraction << ")";
      c.detail = detail.str();
    }
    results.push_back(std::move(c));
  }

  {
    CriterionResult c;
    c.name = "bound-geometry";
    bool ok = report.collective;
    std::ostringstream detail;
    for (const ThetaGeometry& geom : report.per_theta) {
      if (geom.empty_expert_set) {
        ok = false;
        detail << "state " << geom.theta << " has no expert; ";
        continue;
      }
      for (double bt : geom.geometry.beta_tilde) ok = ok && bt < 1.0;
      for (const PairBound& pair : geom.pairs) {
        if (pair.identifiable) ok = ok && pair.gamma > 0.0;
      }
    }
    c.passed = ok;
    detail << (report.collective ? "collective distinguishability holds"
                                 : "collective distinguishability fails")
           << "; beta_tilde < 1 and gamma > 0 " << (ok ? "verified" : "violated");
    c.detail = detail.str();
    results.push_back(std::move(c));
  }

  {
    CriterionResult c;
    c.name = "round-invariants";
    long long violations = 0;
    for (const SimulationTrace& trace : ensemble) violations += trace.invariant_violations;
    c.passed = violations == 0;
    std::ostringstream detail;
    detail << violations << " violation(s) across " << ensemble.size() << " run(s)";
    c.detail = detail.str();
    results.push_back(std::move(c));
  }

  {
    CriterionResult c;
    c.name = "replay-determinism";
    SimulationConfig replay_config = config;
    replay_config.seed = ensemble.front().seed;
    const SimulationTrace replay = run(replay_config);
    c.passed = trace_csv_string(replay) == trace_csv_string(ensemble.front());
    c.detail = c.passed ? "rerun of first seed is byte-identical"
                        : "rerun of first seed diverged";
    results.push_back(std::move(c));
  }

  return results;
}

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    ConfigDoc doc = load_config(options.config_path);
    if (options.threshold) doc.diagnostics.threshold = *options.threshold;
    if (options.burn_in) doc.diagnostics.burn_in = *options.burn_in;
    const auto seeds = effective_seeds(doc, std::nullopt, options.seeds_count);
    doc.seeds = seeds;

    SimulationConfig config = build_sim_config(doc);
    ensure_out_dir(options.out_dir);

    const auto ensemble = run_ensemble(config, seeds, options.parallelism);
    DiagnosticsOptions diag = doc.diagnostics;
    if (diag.burn_in < 0) diag.burn_in = default_burn_in(config.horizon);

    const BoundReport report = build_bound_report(config, ensemble, diag);
    write_text_file(options.out_dir / "bound_report.json",
                    bound_report_to_json(report).dump(2) + "\n");

    const auto criteria = evaluate_criteria(config, ensemble, report, diag);
    bool all_passed = true;
    ordered_json criteria_json = ordered_json::array();
    for (const CriterionResult& c : criteria) {
      const char* status = !c.applicable ? "N/A " : (c.passed ? "PASS" : "FAIL");
      out << status << "  " << std::left << std::setw(22) << c.name << " " << c.detail << "\n";
      if (c.applicable && !c.passed) all_passed = false;
      criteria_json.push_back({{"name", c.name},
                               {"applicable", c.applicable},
                               {"passed", c.passed},
                               {"detail", c.detail}});
    }
    write_text_file(options.out_dir / "criteria.json", criteria_json.dump(2) + "\n");

    out << (all_passed ? "all applicable criteria passed" : "criteria failures present") << "\n";
    return all_passed ? kExitOk : kExitCriteriaFailure;
  });
}

LikelihoodModel generate_distinguishable_model(int n, int m, int true_state, RngStream& rng) {
  LikelihoodModel model;
  std::vector<double> base(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Weakly informative base row, kept away from the designated tilts below.
    base[static_cast<std::size_t>(i)] = 0.3 + 0.15 * rng.next_unit();
    AgentSensor sensor;
    sensor.signals = {"s0", "s1"};
    sensor.likelihood.assign(static_cast<std::size_t>(m),
                             {base[static_cast<std::size_t>(i)],
                              1.0 - base[static_cast<std::size_t>(i)]});
    model.agents.push_back(std::move(sensor));
  }

  // Round-robin designation; tilts per agent are mutually distinct and
  // disjoint from every base value, so each designated row separates its
  // wrong state from the true state and from the agent's other rows.
  std::vector<int> assignments_per_agent(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> assigned(static_cast<std::size_t>(n));
  int next_agent = 0;
  for (int theta = 0; theta < m; ++theta) {
    if (theta == true_state) continue;
    assigned[static_cast<std::size_t>(next_agent)].push_back(theta);
    assignments_per_agent[static_cast<std::size_t>(next_agent)] += 1;
    next_agent = (next_agent + 1) % n;
  }
  for (int i = 0; i < n; ++i) {
    const int count = assignments_per_agent[static_cast<std::size_t>(i)];
    for (int idx = 0; idx < count; ++idx) {
      const int theta = assigned[static_cast<std::size_t>(i)][static_cast<std::size_t>(idx)];
      const double tilt = 0.55 + 0.4 * static_cast<double>(idx + 1) / static_cast<double>(count + 1);
      model.agents[static_cast<std::size_t>(i)].likelihood[static_cast<std::size_t>(theta)] = {
          tilt, 1.0 - tilt};
    }
  }
  return model;
}

int cmd_gen(const GenOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    if (options.m < 2) {
      throw ValidationError(ErrorCode::BadConfig, "--m must be at least 2");
    }
    ConfigDoc doc;
    doc.space.true_state = 0;
    for (int k = 0; k < options.m; ++k) {
      doc.space.states.push_back("state" + std::to_string(k));
    }

    ScenarioParams params;
    params.self_weight = options.self_weight;
    params.edge_prob = options.edge_prob;
    RngStream net_rng(derive_stream_seed(options.seed, 0, StreamPurpose::Scenario));
    doc.network_matrix = scenario_weights(options.kind, options.n, params, net_rng);

    RngStream lik_rng(derive_stream_seed(options.seed, 1, StreamPurpose::Scenario));
    doc.model = generate_distinguishable_model(options.n, options.m, doc.space.true_state, lik_rng);

    doc.rule = Rule::GeometricSample;
    doc.horizon = 2000;
    doc.thinning = 10;
    doc.seeds = {1, 2, 3};

    const SimulationConfig config = build_sim_config(doc);  // full validation
    const auto report = distinguishability(config.model, config.space);
    if (!report.collective) {
      throw ValidationError(ErrorCode::BadConfig,
                            "generated model unexpectedly not collectively distinguishable");
    }

    write_text_file(options.out_path, serialize_config(doc));
    out << "wrote config to " << options.out_path.string() << "\n";
    return kExitOk;
  });
}

}  // namespace beliefsim
