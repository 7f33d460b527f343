#include "beliefsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "beliefsim/errors.hpp"

namespace beliefsim {

std::string_view rule_name(Rule rule) {
  switch (rule) {
    case Rule::GeometricSample: return "geometric-sample";
    case Rule::FullBeliefArithmetic: return "full-belief";
    case Rule::SampleArithmetic: return "sample-arithmetic";
  }
  return "unknown";
}

std::optional<Rule> parse_rule(std::string_view name) {
  if (name == "geometric-sample") return Rule::GeometricSample;
  if (name == "full-belief") return Rule::FullBeliefArithmetic;
  if (name == "sample-arithmetic") return Rule::SampleArithmetic;
  return std::nullopt;
}

void validate_config(const SimulationConfig& config) {
  validate_model(config.model, config.space);
  if (config.model.num_agents() != config.net.n) {
    throw ValidationError(ErrorCode::DimensionMismatch,
                          "likelihood model and network disagree on agent count");
  }
  validate_network(config.net.weights);
  if (config.horizon < 1) {
    throw ValidationError(ErrorCode::BadConfig, "horizon must be >= 1");
  }
  if (config.thinning < 1) {
    throw ValidationError(ErrorCode::BadConfig, "thinning must be >= 1");
  }
}

namespace {

struct InvariantCounter {
  long long violations = 0;

  void check_log_distribution(std::span<const double> log_probs) {
    double sum = 0.0;
    bool positive = true;
    for (double v : log_probs) {
      if (!std::isfinite(v)) positive = false;  // -inf log means zero mass
      sum += std::exp(v);
    }
    if (!positive || std::abs(sum - 1.0) > 1e-9) ++violations;
  }

  void check_linear_distribution(std::span<const double> probs) {
    double sum = 0.0;
    bool positive = true;
    for (double v : probs) {
      if (!(v > 0.0)) positive = false;
      sum += v;
    }
    if (!positive || std::abs(sum - 1.0) > 1e-9) ++violations;
  }

  void check_counters(std::span<const long long> counters, long long t, int m) {
    long long sum = 0;
    for (long long c : counters) {
      if (c < 1) ++violations;
      sum += c;
    }
    if (sum != t + m) ++violations;
  }
};

std::vector<double> linear_from_log(std::span<const double> log_probs) {
  std::vector<double> out(log_probs.size());
  for (std::size_t k = 0; k < log_probs.size(); ++k) out[k] = std::exp(log_probs[k]);
  return out;
}

std::vector<double> log_from_linear(std::span<const double> probs) {
  std::vector<double> out(probs.size());
  for (std::size_t k = 0; k < probs.size(); ++k) out[k] = std::log(probs[k]);
  return out;
}

class Simulation {
 public:
  explicit Simulation(const SimulationConfig& config)
      : cfg_(config),
        n_(config.net.n),
        m_(config.space.size()),
        hash_(config_hash(config)) {
    for (int i = 0; i < n_; ++i) {
      signal_streams_.emplace_back(derive_stream_seed(cfg_.seed, static_cast<std::uint64_t>(i),
                                                      StreamPurpose::Signal));
      action_streams_.emplace_back(derive_stream_seed(cfg_.seed, static_cast<std::uint64_t>(i),
                                                      StreamPurpose::Action));
      neighbor_lists_.push_back(cfg_.net.neighbors(i));
      std::vector<double> weights;
      for (int j : neighbor_lists_.back()) {
        weights.push_back(cfg_.net.weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
      }
      neighbor_weights_.push_back(std::move(weights));
    }
  }

  SimulationTrace execute() {
    SimulationTrace trace;
    trace.config_hash = hash_;
    trace.seed = cfg_.seed;
    trace.rule = cfg_.rule;
    trace.m = m_;
    trace.n = n_;
    trace.horizon = cfg_.horizon;
    trace.thinning = cfg_.thinning;

    switch (cfg_.rule) {
      case Rule::GeometricSample: run_geometric(trace); break;
      case Rule::FullBeliefArithmetic: run_arithmetic(trace, /*sample_based=*/false); break;
      case Rule::SampleArithmetic: run_arithmetic(trace, /*sample_based=*/true); break;
    }
    trace.invariant_violations = invariants_.violations;
    return trace;
  }

 private:
  bool recorded_round(long long t) const {
    return t % cfg_.thinning == 0 || t == cfg_.horizon;
  }

  // Main dynamics. Synchronous round: signals and private Bayes first, then
  // pooling against empirical distributions frozen at the end of the previous
  // round, then simultaneous action draws, then counter updates.
  void run_geometric(SimulationTrace& trace) {
    std::vector<AgentState> agents;
    for (int i = 0; i < n_; ++i) agents.push_back(init_agent(m_));

    std::vector<int> signals(static_cast<std::size_t>(n_));
    std::vector<int> actions(static_cast<std::size_t>(n_));
    std::vector<EmpiricalDistribution> snapshot(static_cast<std::size_t>(n_));
    std::vector<double> lik_column(static_cast<std::size_t>(m_));

    for (long long t = 1; t <= cfg_.horizon; ++t) {
      for (int i = 0; i < n_; ++i) {
        const int s = sample_signal(i, cfg_.space.true_state, cfg_.model, signal_streams_[static_cast<std::size_t>(i)]);
        signals[static_cast<std::size_t>(i)] = s;
        const Matrix& lik = cfg_.model.agents[static_cast<std::size_t>(i)].likelihood;
        for (int theta = 0; theta < m_; ++theta) {
          lik_column[static_cast<std::size_t>(theta)] =
              lik[static_cast<std::size_t>(theta)][static_cast<std::size_t>(s)];
        }
        private_bayes_update(agents[static_cast<std::size_t>(i)], lik_column);
      }

      for (int j = 0; j < n_; ++j) {
        snapshot[static_cast<std::size_t>(j)] = empirical_view(agents[static_cast<std::size_t>(j)]);
      }
      std::vector<EmpiricalDistribution> neighbor_emps;
      for (int i = 0; i < n_; ++i) {
        neighbor_emps.clear();
        for (int j : neighbor_lists_[static_cast<std::size_t>(i)]) {
          neighbor_emps.push_back(snapshot[static_cast<std::size_t>(j)]);
        }
        pool_beliefs(agents[static_cast<std::size_t>(i)], neighbor_emps,
                     cfg_.net.self_weight(i), neighbor_weights_[static_cast<std::size_t>(i)]);
      }

      for (int i = 0; i < n_; ++i) {
        actions[static_cast<std::size_t>(i)] =
            sample_action(agents[static_cast<std::size_t>(i)], action_streams_[static_cast<std::size_t>(i)]);
      }
      for (int i = 0; i < n_; ++i) {
        record_action(agents[static_cast<std::size_t>(i)], actions[static_cast<std::size_t>(i)]);
      }

      for (int i = 0; i < n_; ++i) {
        const AgentState& a = agents[static_cast<std::size_t>(i)];
        invariants_.check_log_distribution(a.log_private);
        invariants_.check_log_distribution(a.log_pooled);
        invariants_.check_counters(a.counters, t, m_);
      }

      if (recorded_round(t)) {
        RoundRecord rec;
        rec.t = t;
        for (int i = 0; i < n_; ++i) {
          const AgentState& a = agents[static_cast<std::size_t>(i)];
          AgentRound ar;
          ar.signal = signals[static_cast<std::size_t>(i)];
          ar.action = actions[static_cast<std::size_t>(i)];
          ar.pooled = linear_from_log(a.log_pooled);
          ar.log_private = a.log_private;
          ar.counters = a.counters;
          rec.agents.push_back(std::move(ar));
        }
        trace.rounds.push_back(std::move(rec));
      }
    }
  }

  // Both baselines: a Bayesian self term plus arithmetic neighbor terms. With
  // sample_based the neighbor terms are last-round action indicators, else the
  // neighbors' full previous-round beliefs. Agents still declare an action
  // each round (sampled from the updated belief) so traces stay uniform.
  void run_arithmetic(SimulationTrace& trace, bool sample_based) {
    std::vector<std::vector<double>> beliefs(
        static_cast<std::size_t>(n_),
        std::vector<double>(static_cast<std::size_t>(m_), 1.0 / static_cast<double>(m_)));
    std::vector<std::vector<long long>> counters(
        static_cast<std::size_t>(n_), std::vector<long long>(static_cast<std::size_t>(m_), 1));
    std::vector<int> prev_actions(static_cast<std::size_t>(n_), -1);
    std::vector<int> signals(static_cast<std::size_t>(n_));
    std::vector<int> actions(static_cast<std::size_t>(n_));

    for (long long t = 1; t <= cfg_.horizon; ++t) {
      std::vector<std::vector<double>> next(static_cast<std::size_t>(n_));
      for (int i = 0; i < n_; ++i) {
        const int s = sample_signal(i, cfg_.space.true_state, cfg_.model, signal_streams_[static_cast<std::size_t>(i)]);
        signals[static_cast<std::size_t>(i)] = s;
        const Matrix& lik = cfg_.model.agents[static_cast<std::size_t>(i)].likelihood;
        const auto& mine = beliefs[static_cast<std::size_t>(i)];

        double normalizer = 0.0;
        for (int theta = 0; theta < m_; ++theta) {
          normalizer += lik[static_cast<std::size_t>(theta)][static_cast<std::size_t>(s)] *
                        mine[static_cast<std::size_t>(theta)];
        }

        const double self = cfg_.net.self_weight(i);
        std::vector<double> updated(static_cast<std::size_t>(m_), 0.0);
        for (int theta = 0; theta < m_; ++theta) {
          updated[static_cast<std::size_t>(theta)] =
              self * lik[static_cast<std::size_t>(theta)][static_cast<std::size_t>(s)] *
              mine[static_cast<std::size_t>(theta)] / normalizer;
        }
        const auto& nbrs = neighbor_lists_[static_cast<std::size_t>(i)];
        const auto& wts = neighbor_weights_[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
          const int j = nbrs[k];
          const double a_ij = wts[k];
          if (!sample_based) {
            for (int theta = 0; theta < m_; ++theta) {
              updated[static_cast<std::size_t>(theta)] +=
                  a_ij * beliefs[static_cast<std::size_t>(j)][static_cast<std::size_t>(theta)];
            }
          } else if (prev_actions[static_cast<std::size_t>(j)] < 0) {
            // No declared actions exist before round 1; spread the neighbor
            // mass uniformly, mirroring the pseudocount-uniform empiricals.
            for (int theta = 0; theta < m_; ++theta) {
              updated[static_cast<std::size_t>(theta)] += a_ij / static_cast<double>(m_);
            }
          } else {
            updated[static_cast<std::size_t>(prev_actions[static_cast<std::size_t>(j)])] += a_ij;
          }
        }
        next[static_cast<std::size_t>(i)] = std::move(updated);
      }
      beliefs = std::move(next);

      for (int i = 0; i < n_; ++i) {
        actions[static_cast<std::size_t>(i)] = draw_categorical(
            beliefs[static_cast<std::size_t>(i)], action_streams_[static_cast<std::size_t>(i)].next_unit());
      }
      for (int i = 0; i < n_; ++i) {
        counters[static_cast<std::size_t>(i)][static_cast<std::size_t>(actions[static_cast<std::size_t>(i)])] += 1;
      }
      prev_actions = actions;

      for (int i = 0; i < n_; ++i) {
        invariants_.check_linear_distribution(beliefs[static_cast<std::size_t>(i)]);
        invariants_.check_counters(counters[static_cast<std::size_t>(i)], t, m_);
      }

      if (recorded_round(t)) {
        RoundRecord rec;
        rec.t = t;
        for (int i = 0; i < n_; ++i) {
          AgentRound ar;
          ar.signal = signals[static_cast<std::size_t>(i)];
          ar.action = actions[static_cast<std::size_t>(i)];
          ar.pooled = beliefs[static_cast<std::size_t>(i)];
          ar.log_private = log_from_linear(beliefs[static_cast<std::size_t>(i)]);
          ar.counters = counters[static_cast<std::size_t>(i)];
          rec.agents.push_back(std::move(ar));
        }
        trace.rounds.push_back(std::move(rec));
      }
    }
  }

  const SimulationConfig& cfg_;
  int n_;
  int m_;
  std::string hash_;
  std::vector<RngStream> signal_streams_;
  std::vector<RngStream> action_streams_;
  std::vector<std::vector<int>> neighbor_lists_;
  std::vector<std::vector<double>> neighbor_weights_;
  InvariantCounter invariants_;
};

}  // namespace

SimulationTrace run(const SimulationConfig& config) {
  validate_config(config);
  Simulation sim(config);
  return sim.execute();
}

int effective_parallelism(int requested) {
  int workers = requested;
#ifdef _OPENMP
  if (workers <= 0) workers = omp_get_max_threads();
#else
  if (workers <= 0) workers = 1;
#endif
  if (const char* cap_text = std::getenv("BELIEF_SAMPLER_PARALLELISM")) {
    const int cap = std::atoi(cap_text);
    if (cap > 0) workers = std::min(workers, cap);
  }
  return std::max(workers, 1);
}

namespace {

void require_distinct_seeds(std::span<const std::uint64_t> seeds) {
  std::vector<std::uint64_t> sorted(seeds.begin(), seeds.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError(ErrorCode::BadConfig, "ensemble seeds must be distinct");
  }
}

}  // namespace

std::vector<SimulationTrace> run_ensemble_serial(const SimulationConfig& config,
                                                 std::span<const std::uint64_t> seeds) {
  require_distinct_seeds(seeds);
  std::vector<SimulationTrace> traces;
  traces.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    SimulationConfig per_seed = config;
    per_seed.seed = seed;
    traces.push_back(run(per_seed));
  }
  return traces;
}

std::vector<SimulationTrace> run_ensemble(const SimulationConfig& config,
                                          std::span<const std::uint64_t> seeds,
                                          int parallelism) {
  validate_config(config);
  require_distinct_seeds(seeds);
  const int workers = effective_parallelism(parallelism);
  std::vector<SimulationTrace> traces(seeds.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(workers)
#endif
  for (long long k = 0; k < static_cast<long long>(seeds.size()); ++k) {
    SimulationConfig per_seed = config;
    per_seed.seed = seeds[static_cast<std::size_t>(k)];
    Simulation sim(per_seed);
    traces[static_cast<std::size_t>(k)] = sim.execute();
  }
  (void)workers;
  return traces;
}

}  // namespace beliefsim
