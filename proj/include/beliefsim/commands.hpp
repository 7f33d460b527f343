#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "beliefsim/config_io.hpp"

namespace beliefsim {

// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIoFailure = 1;
inline constexpr int kExitValidationFailure = 2;
inline constexpr int kExitCriteriaFailure = 3;

struct RunOptions {
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> seeds_count;
  std::optional<long long> horizon;
  std::optional<Rule> rule;
  std::optional<long long> thinning;
  std::optional<double> threshold;
  int parallelism = 0;
};

struct BoundsOptions {
  std::filesystem::path config_path;
  std::optional<std::filesystem::path> out_file;
};

struct VerifyOptions {
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  std::optional<int> seeds_count;
  std::optional<double> threshold;
  std::optional<long long> burn_in;
  int parallelism = 0;
};

struct GenOptions {
  ScenarioKind kind = ScenarioKind::Ring;
  int n = 5;
  int m = 2;
  double self_weight = 0.6;
  double edge_prob = 0.4;
  std::uint64_t seed = 1;
  std::filesystem::path out_path;
};

/// Effective seed list after --seed/--seeds overrides: --seed replaces the
/// base, --seeds N expands to N consecutive seeds from the base.
std::vector<std::uint64_t> effective_seeds(const ConfigDoc& doc,
                                           std::optional<std::uint64_t> seed_override,
                                           std::optional<int> seeds_count);

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_bounds(const BoundsOptions& options, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err);
int cmd_gen(const GenOptions& options, std::ostream& out, std::ostream& err);

struct CriterionResult {
  std::string name;
  bool applicable = true;
  bool passed = true;
  std::string detail;
};

/// The fixed pass/fail table cmd_verify prints: convergence rate, floor and
/// plateau bounds, count growth, bound geometry, per-round invariants, and
/// byte-exact replay. Criteria that need action counters apply only to the
/// sampling rules.
std::vector<CriterionResult> evaluate_criteria(const SimulationConfig& config,
                                               const std::vector<SimulationTrace>& ensemble,
                                               const BoundReport& report,
                                               const DiagnosticsOptions& options);

/// Deterministic likelihood construction where every wrong state is separated
/// from the true state by a designated agent (round-robin), which also pins
/// collective distinguishability.
LikelihoodModel generate_distinguishable_model(int n, int m, int true_state, RngStream& rng);

}  // namespace beliefsim
