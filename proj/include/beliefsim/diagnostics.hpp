#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "beliefsim/engine.hpp"

namespace beliefsim {

struct DiagnosticsOptions {
  double threshold = 0.95;
  long long burn_in = -1;  // < 0 picks default_burn_in(horizon)
  double beta_fraction = 0.5;
};

/// max(100, 1% of the horizon); early rounds are excluded uniformly.
long long default_burn_in(long long horizon);

struct LearningVerdict {
  bool learned = false;
  long long learning_time = -1;  // earliest recorded round from which the
                                 // threshold holds through the final round
  double final_belief = 0.0;
};

/// Threshold-and-hold reading of belief convergence on recorded rounds.
std::vector<LearningVerdict> detect_learning(const SimulationTrace& trace, int true_state,
                                             double threshold = 0.95);

struct SlopeEstimate {
  int agent = 0;
  int theta = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double band99 = 0.0;  // 2.5758 * std_error
  double kl_reference = 0.0;
  int seeds = 0;
  long long t_eval = 0;
};

/// Mean with standard error; requires at least two values.
std::pair<double, double> mean_and_std_error(std::span<const double> values);

/// Per-seed private log-ratio slope (1/t) ln(mu^P(theta)/mu^P(theta*)) at the
/// last recorded round, averaged across the ensemble. The i.i.d. log-ratio sum
/// has mean -KL(l_i(.|theta*) || l_i(.|theta)), reported alongside.
SlopeEstimate private_decay_slope(std::span<const SimulationTrace> ensemble, int agent,
                                  int theta, const SimulationConfig& config);

struct FloorStats {
  long long burn_in = 0;
  std::vector<double> per_agent_frequency;
  double overall_frequency = 0.0;
  long long checks = 0;
  long long violations = 0;
  std::vector<std::pair<long long, double>> trend;  // (bucket end round, frequency)
};

/// Frequency of recorded rounds where the true-state belief drops strictly
/// below 1 / (m (t+1)^(1-a_ii)), past burn-in.
FloorStats check_true_state_floor(std::span<const SimulationTrace> ensemble,
                                  const SimulationConfig& config, long long burn_in);

struct CountGrowthStats {
  long long burn_in = 0;
  std::vector<std::vector<double>> final_ratio;  // [agent][seed] n_iT(theta*)/(T+1)
  std::vector<double> min_final_ratio;           // per agent, over seeds
  std::vector<double> min_poly_ratio;            // per agent: min n_it/(t+1)^(1-a_ii)
};

CountGrowthStats check_count_growth(std::span<const SimulationTrace> ensemble,
                                    const SimulationConfig& config, long long burn_in);

struct PlateauStats {
  long long half_round = 0;  // recorded round closest below horizon/2
  struct Entry {
    int agent = 0;
    int theta = 0;
    std::vector<long long> deltas;  // per seed, n_iT - n_i,half
    double fraction_within(long long bound) const;
    long long max_delta() const;
  };
  std::vector<Entry> entries;
};

/// Late-half count increments for every identifiable (agent, wrong state) pair.
PlateauStats check_identifiable_plateau(std::span<const SimulationTrace> ensemble,
                                        const SimulationConfig& config);

struct PairBound {
  int agent = 0;
  int theta = 0;
  bool identifiable = false;
  double kl = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double alpha_star = 0.0;
};

struct ThetaGeometry {
  int theta = 0;
  bool empty_expert_set = false;
  ExpertGeometry geometry;
  std::vector<PairBound> pairs;
};

struct CountExponentRow {
  int agent = 0;
  int theta = 0;
  int dist = 0;
  double max_exponent = 0.0;  // max over t >= burn_in of ln n_it(theta) / ln(t+1)
  double ceiling = 0.0;       // beta_bar[dist]
};

struct EmpiricalStats {
  int seeds = 0;
  long long horizon = 0;
  long long burn_in = 0;
  double threshold = 0.95;
  double all_learned_rate = 0.0;
  std::vector<double> per_agent_learned_rate;
  std::vector<SlopeEstimate> slopes;
  FloorStats floor;
  CountGrowthStats growth;
  PlateauStats plateau;
  std::vector<CountExponentRow> count_exponents;
};

struct BoundReport {
  bool collective = false;
  std::vector<std::pair<int, int>> violating_pairs;
  double beta_fraction = 0.5;
  double grid_step = 1e-4;
  std::string refinement = "golden-section";
  std::vector<ThetaGeometry> per_theta;
  std::optional<EmpiricalStats> empirical;
};

/// Joins the analytic quantities (divergences, exponents, expert geometry)
/// with ensemble statistics. Pass an empty ensemble for the analytic half
/// alone. Degrades rather than fails: missing experts are flagged per state.
BoundReport build_bound_report(const SimulationConfig& config,
                               std::span<const SimulationTrace> ensemble,
                               const DiagnosticsOptions& options);

}  // namespace beliefsim
