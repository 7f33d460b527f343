#include "beliefsim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "beliefsim/errors.hpp"

namespace beliefsim {

long long default_burn_in(long long horizon) {
  return std::max<long long>(100, horizon / 100);
}

std::vector<LearningVerdict> detect_learning(const SimulationTrace& trace, int true_state,
                                             double threshold) {
  std::vector<LearningVerdict> verdicts(static_cast<std::size_t>(trace.n));
  if (trace.rounds.empty()) return verdicts;
  for (int i = 0; i < trace.n; ++i) {
    LearningVerdict& v = verdicts[static_cast<std::size_t>(i)];
    v.final_belief = trace.final_round().agents[static_cast<std::size_t>(i)]
                         .pooled[static_cast<std::size_t>(true_state)];
    // Walk backward: the learning time is the earliest recorded round whose
    // suffix stays at or above the threshold.
    long long earliest = -1;
    for (auto it = trace.rounds.rbegin(); it != trace.rounds.rend(); ++it) {
      const double belief =
          it->agents[static_cast<std::size_t>(i)].pooled[static_cast<std::size_t>(true_state)];
      if (belief >= threshold) {
        earliest = it->t;
      } else {
        break;
      }
    }
    v.learned = earliest >= 0;
    v.learning_time = earliest;
  }
  return verdicts;
}

std::pair<double, double> mean_and_std_error(std::span<const double> values) {
  if (values.size() < 2) {
    throw ValidationError(ErrorCode::BadConfig, "need at least 2 values for a standard error");
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double variance = ss / static_cast<double>(values.size() - 1);
  return {mean, std::sqrt(variance / static_cast<double>(values.size()))};
}

SlopeEstimate private_decay_slope(std::span<const SimulationTrace> ensemble, int agent,
                                  int theta, const SimulationConfig& config) {
  const auto report = distinguishability(config.model, config.space);
  if (!report.identifiable[static_cast<std::size_t>(agent)][static_cast<std::size_t>(theta)]) {
    std::ostringstream msg;
    msg << "state " << theta << " is not identifiable for agent " << agent;
    throw ValidationError(ErrorCode::NotIdentifiable, msg.str());
  }
  std::vector<double> slopes;
  long long t_eval = 0;
  for (const SimulationTrace& trace : ensemble) {
    const RoundRecord& rec = trace.final_round();
    t_eval = rec.t;
    const auto& logs = rec.agents[static_cast<std::size_t>(agent)].log_private;
    slopes.push_back((logs[static_cast<std::size_t>(theta)] -
                      logs[static_cast<std::size_t>(config.space.true_state)]) /
                     static_cast<double>(rec.t));
  }
  const auto [mean, se] = mean_and_std_error(slopes);

  const auto& lik = config.model.agents[static_cast<std::size_t>(agent)].likelihood;
  SlopeEstimate est;
  est.agent = agent;
  est.theta = theta;
  est.mean = mean;
  est.std_error = se;
  est.band99 = 2.5758293035489004 * se;
  est.kl_reference = kl_divergence(lik[static_cast<std::size_t>(config.space.true_state)],
                                   lik[static_cast<std::size_t>(theta)]);
  est.seeds = static_cast<int>(ensemble.size());
  est.t_eval = t_eval;
  return est;
}

FloorStats check_true_state_floor(std::span<const SimulationTrace> ensemble,
                                  const SimulationConfig& config, long long burn_in) {
  const int n = config.net.n;
  const int m = config.space.size();
  FloorStats stats;
  stats.burn_in = burn_in;
  stats.per_agent_frequency.assign(static_cast<std::size_t>(n), 0.0);

  std::vector<long long> agent_checks(static_cast<std::size_t>(n), 0);
  std::vector<long long> agent_violations(static_cast<std::size_t>(n), 0);

  constexpr int kBuckets = 10;
  std::vector<long long> bucket_checks(kBuckets, 0);
  std::vector<long long> bucket_violations(kBuckets, 0);
  const long long horizon = config.horizon;

  for (const SimulationTrace& trace : ensemble) {
    for (const RoundRecord& rec : trace.rounds) {
      if (rec.t < burn_in) continue;
      const int bucket = std::min<int>(
          kBuckets - 1, static_cast<int>((rec.t - 1) * kBuckets / std::max<long long>(horizon, 1)));
      for (int i = 0; i < n; ++i) {
        const double floor =
            1.0 / (static_cast<double>(m) *
                   std::pow(static_cast<double>(rec.t + 1), 1.0 - config.net.self_weight(i)));
        const double belief = rec.agents[static_cast<std::size_t>(i)]
                                  .pooled[static_cast<std::size_t>(config.space.true_state)];
        agent_checks[static_cast<std::size_t>(i)] += 1;
        bucket_checks[static_cast<std::size_t>(bucket)] += 1;
        if (belief < floor) {
          agent_violations[static_cast<std::size_t>(i)] += 1;
          bucket_violations[static_cast<std::size_t>(bucket)] += 1;
        }
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    stats.checks += agent_checks[static_cast<std::size_t>(i)];
    stats.violations += agent_violations[static_cast<std::size_t>(i)];
    stats.per_agent_frequency[static_cast<std::size_t>(i)] =
        agent_checks[static_cast<std::size_t>(i)] == 0
            ? 0.0
            : static_cast<double>(agent_violations[static_cast<std::size_t>(i)]) /
                  static_cast<double>(agent_checks[static_cast<std::size_t>(i)]);
  }
  stats.overall_frequency =
      stats.checks == 0 ? 0.0 : static_cast<double>(stats.violations) / static_cast<double>(stats.checks);
  for (int b = 0; b < kBuckets; ++b) {
    if (bucket_checks[static_cast<std::size_t>(b)] == 0) continue;
    stats.trend.emplace_back((b + 1) * horizon / kBuckets,
                             static_cast<double>(bucket_violations[static_cast<std::size_t>(b)]) /
                                 static_cast<double>(bucket_checks[static_cast<std::size_t>(b)]));
  }
  return stats;
}

CountGrowthStats check_count_growth(std::span<const SimulationTrace> ensemble,
                                    const SimulationConfig& config, long long burn_in) {
  const int n = config.net.n;
  CountGrowthStats stats;
  stats.burn_in = burn_in;
  stats.final_ratio.assign(static_cast<std::size_t>(n), {});
  stats.min_final_ratio.assign(static_cast<std::size_t>(n), 1.0);
  stats.min_poly_ratio.assign(static_cast<std::size_t>(n),
                              std::numeric_limits<double>::infinity());
  const int star = config.space.true_state;

  for (const SimulationTrace& trace : ensemble) {
    for (int i = 0; i < n; ++i) {
      const auto& final_counters = trace.final_round().agents[static_cast<std::size_t>(i)].counters;
      const double ratio = static_cast<double>(final_counters[static_cast<std::size_t>(star)]) /
                           static_cast<double>(trace.horizon + 1);
      stats.final_ratio[static_cast<std::size_t>(i)].push_back(ratio);
      stats.min_final_ratio[static_cast<std::size_t>(i)] =
          std::min(stats.min_final_ratio[static_cast<std::size_t>(i)], ratio);
    }
    for (const RoundRecord& rec : trace.rounds) {
      if (rec.t < burn_in) continue;
      for (int i = 0; i < n; ++i) {
        const double denom =
            std::pow(static_cast<double>(rec.t + 1), 1.0 - config.net.self_weight(i));
        const double value =
            static_cast<double>(
                rec.agents[static_cast<std::size_t>(i)].counters[static_cast<std::size_t>(star)]) /
            denom;
        stats.min_poly_ratio[static_cast<std::size_t>(i)] =
            std::min(stats.min_poly_ratio[static_cast<std::size_t>(i)], value);
      }
    }
  }
  return stats;
}

double PlateauStats::Entry::fraction_within(long long bound) const {
  if (deltas.empty()) return 1.0;
  long long within = 0;
  for (long long d : deltas) {
    if (d <= bound) ++within;
  }
  return static_cast<double>(within) / static_cast<double>(deltas.size());
}

long long PlateauStats::Entry::max_delta() const {
  long long best = 0;
  for (long long d : deltas) best = std::max(best, d);
  return best;
}

PlateauStats check_identifiable_plateau(std::span<const SimulationTrace> ensemble,
                                        const SimulationConfig& config) {
  PlateauStats stats;
  if (ensemble.empty()) return stats;
  const auto report = distinguishability(config.model, config.space);
  const long long half_target = config.horizon / 2;

  // Largest recorded round not past horizon/2; falls back to the first record
  // when thinning is coarser than the half-horizon.
  const SimulationTrace& first = ensemble.front();
  std::size_t half_index = 0;
  for (std::size_t r = 0; r < first.rounds.size(); ++r) {
    if (first.rounds[r].t <= half_target) half_index = r;
  }
  stats.half_round = first.rounds[half_index].t;

  for (int i = 0; i < config.net.n; ++i) {
    for (int theta = 0; theta < config.space.size(); ++theta) {
      if (!report.identifiable[static_cast<std::size_t>(i)][static_cast<std::size_t>(theta)]) {
        continue;
      }
      PlateauStats::Entry entry;
      entry.agent = i;
      entry.theta = theta;
      for (const SimulationTrace& trace : ensemble) {
        const auto& half = trace.rounds[half_index].agents[static_cast<std::size_t>(i)].counters;
        const auto& last = trace.final_round().agents[static_cast<std::size_t>(i)].counters;
        entry.deltas.push_back(last[static_cast<std::size_t>(theta)] -
                               half[static_cast<std::size_t>(theta)]);
      }
      stats.entries.push_back(std::move(entry));
    }
  }
  return stats;
}

BoundReport build_bound_report(const SimulationConfig& config,
                               std::span<const SimulationTrace> ensemble,
                               const DiagnosticsOptions& options) {
  BoundReport report;
  report.beta_fraction = options.beta_fraction;

  const auto dist_report = distinguishability(config.model, config.space);
  report.collective = dist_report.collective;
  report.violating_pairs = dist_report.violating_pairs;

  const int m = config.space.size();
  const int star = config.space.true_state;
  for (int theta = 0; theta < m; ++theta) {
    if (theta == star) continue;
    ThetaGeometry geom;
    geom.theta = theta;
    try {
      geom.geometry = expert_geometry(theta, dist_report, config.net);
    } catch (const ValidationError& err) {
      if (err.code() != ErrorCode::EmptyExpertSet) throw;
      geom.empty_expert_set = true;
    }
    for (int i = 0; i < config.net.n; ++i) {
      PairBound pair;
      pair.agent = i;
      pair.theta = theta;
      pair.identifiable =
          dist_report.identifiable[static_cast<std::size_t>(i)][static_cast<std::size_t>(theta)];
      if (pair.identifiable) {
        const auto& lik = config.model.agents[static_cast<std::size_t>(i)].likelihood;
        pair.kl = kl_divergence(lik[static_cast<std::size_t>(star)],
                                lik[static_cast<std::size_t>(theta)]);
        const auto spec = decay_exponent_gamma(options.beta_fraction * pair.kl,
                                               lik[static_cast<std::size_t>(star)],
                                               lik[static_cast<std::size_t>(theta)]);
        pair.beta = spec.beta;
        pair.gamma = spec.gamma;
        pair.alpha_star = spec.alpha_star;
      }
      geom.pairs.push_back(pair);
    }
    report.per_theta.push_back(std::move(geom));
  }

  if (ensemble.empty()) return report;

  EmpiricalStats emp;
  emp.seeds = static_cast<int>(ensemble.size());
  emp.horizon = config.horizon;
  emp.burn_in = options.burn_in >= 0 ? options.burn_in : default_burn_in(config.horizon);
  emp.threshold = options.threshold;

  emp.per_agent_learned_rate.assign(static_cast<std::size_t>(config.net.n), 0.0);
  int all_learned = 0;
  for (const SimulationTrace& trace : ensemble) {
    const auto verdicts = detect_learning(trace, star, options.threshold);
    bool everyone = true;
    for (int i = 0; i < config.net.n; ++i) {
      if (verdicts[static_cast<std::size_t>(i)].learned) {
        emp.per_agent_learned_rate[static_cast<std::size_t>(i)] += 1.0;
      } else {
        everyone = false;
      }
    }
    if (everyone) ++all_learned;
  }
  for (double& rate : emp.per_agent_learned_rate) rate /= static_cast<double>(emp.seeds);
  emp.all_learned_rate = static_cast<double>(all_learned) / static_cast<double>(emp.seeds);

  const bool counting_rule = config.rule == Rule::GeometricSample;
  if (counting_rule) {
    if (emp.seeds >= 2) {
      for (int i = 0; i < config.net.n; ++i) {
        for (int theta = 0; theta < m; ++theta) {
          if (!dist_report.identifiable[static_cast<std::size_t>(i)][static_cast<std::size_t>(theta)]) {
            continue;
          }
          emp.slopes.push_back(private_decay_slope(ensemble, i, theta, config));
        }
      }
    }
    emp.floor = check_true_state_floor(ensemble, config, emp.burn_in);
    emp.growth = check_count_growth(ensemble, config, emp.burn_in);
    emp.plateau = check_identifiable_plateau(ensemble, config);

    for (const ThetaGeometry& geom : report.per_theta) {
      if (geom.empty_expert_set) continue;
      for (int i = 0; i < config.net.n; ++i) {
        CountExponentRow row;
        row.agent = i;
        row.theta = geom.theta;
        row.dist = geom.geometry.dist[static_cast<std::size_t>(i)];
        row.ceiling = geom.geometry.beta_bar[static_cast<std::size_t>(row.dist)];
        double max_exponent = 0.0;
        for (const SimulationTrace& trace : ensemble) {
          for (const RoundRecord& rec : trace.rounds) {
            if (rec.t < emp.burn_in) continue;
            const double count = static_cast<double>(
                rec.agents[static_cast<std::size_t>(i)].counters[static_cast<std::size_t>(geom.theta)]);
            max_exponent = std::max(
                max_exponent, std::log(count) / std::log(static_cast<double>(rec.t + 1)));
          }
        }
        row.max_exponent = max_exponent;
        emp.count_exponents.push_back(row);
      }
    }
  }

  report.empirical = std::move(emp);
  return report;
}

}  // namespace beliefsim
