#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "beliefsim/agent.hpp"
#include "beliefsim/core_model.hpp"
#include "beliefsim/graph.hpp"

namespace beliefsim {

enum class Rule {
  GeometricSample,      // private Bayes + geometric pooling of neighbor empiricals
  FullBeliefArithmetic, // arithmetic pooling of full neighbor beliefs
  SampleArithmetic,     // arithmetic pooling of neighbor action indicators
};

std::string_view rule_name(Rule rule);
std::optional<Rule> parse_rule(std::string_view name);

struct SimulationConfig {
  StateSpace space;
  LikelihoodModel model;
  Network net;
  long long horizon = 1;
  std::uint64_t seed = 1;
  Rule rule = Rule::GeometricSample;
  long long thinning = 1;
};

/// Throws ValidationError unless all module-level invariants hold.
void validate_config(const SimulationConfig& config);

struct AgentRound {
  int signal = -1;
  int action = -1;
  std::vector<double> pooled;       // linear, sums to 1
  std::vector<double> log_private;  // kept in log space; linear underflows at long horizons
  std::vector<long long> counters;
};

struct RoundRecord {
  long long t = 0;
  std::vector<AgentRound> agents;
};

struct SimulationTrace {
  std::string config_hash;
  std::uint64_t seed = 0;
  Rule rule = Rule::GeometricSample;
  int m = 0;
  int n = 0;
  long long horizon = 0;
  long long thinning = 1;
  std::vector<RoundRecord> rounds;          // multiples of thinning plus the final round
  long long invariant_violations = 0;       // per-round checks that failed (expected 0)

  const RoundRecord& final_round() const { return rounds.back(); }
};

/// Canonical serialization hash of the effective per-run configuration
/// (model, network, rule, horizon, thinning, seed). Implemented alongside the
/// config serializer so file and in-memory hashing agree.
std::string config_hash(const SimulationConfig& config);

/// One full simulation; pure function of (config, seed).
SimulationTrace run(const SimulationConfig& config);

/// Per-seed independent runs, output order matching seed order regardless of
/// scheduling. parallelism <= 0 picks the OpenMP default; the
/// BELIEF_SAMPLER_PARALLELISM environment variable caps the worker count.
std::vector<SimulationTrace> run_ensemble(const SimulationConfig& config,
                                          std::span<const std::uint64_t> seeds,
                                          int parallelism = 0);

/// Serial reference for the parallel runner; used by tests and the benchmark.
std::vector<SimulationTrace> run_ensemble_serial(const SimulationConfig& config,
                                                 std::span<const std::uint64_t> seeds);

int effective_parallelism(int requested);

}  // namespace beliefsim
