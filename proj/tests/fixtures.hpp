#pragma once

// Shared scenario fixtures and independent test oracles. Everything here is
// deliberately written without reusing the library's own computation paths so
// the checks stay meaningful.

#include <cmath>
#include <vector>

#include "beliefsim/config_io.hpp"
#include "beliefsim/engine.hpp"

namespace fixtures {

using beliefsim::AgentSensor;
using beliefsim::LikelihoodModel;
using beliefsim::Matrix;
using beliefsim::Rule;
using beliefsim::SimulationConfig;
using beliefsim::StateSpace;

inline StateSpace binary_space() { return {{"A", "B"}, 0}; }

inline StateSpace ternary_space() { return {{"A", "B", "C"}, 0}; }

inline AgentSensor sensor_rows(std::vector<std::vector<double>> rows) {
  AgentSensor sensor;
  const int cols = static_cast<int>(rows.front().size());
  for (int k = 0; k < cols; ++k) sensor.signals.push_back("s" + std::to_string(k));
  sensor.likelihood = std::move(rows);
  return sensor;
}

inline Matrix ring_matrix(int n, double self) {
  Matrix w(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = self;
    w[static_cast<std::size_t>(i)][static_cast<std::size_t>((i + 1) % n)] = 1.0 - self;
  }
  return w;
}

/// Single Bayesian agent, states (A, B), rows ((0.9,0.1),(0.5,0.5)).
inline SimulationConfig lone_agent_config(long long horizon, std::uint64_t seed) {
  SimulationConfig config;
  config.space = binary_space();
  config.model.agents.push_back(sensor_rows({{0.9, 0.1}, {0.5, 0.5}}));
  config.net = beliefsim::validate_network({{1.0}});
  config.horizon = horizon;
  config.seed = seed;
  config.rule = Rule::GeometricSample;
  config.thinning = horizon;  // final round only
  return config;
}

/// Every agent fully informative; learning is fast. Good positive fixture.
inline SimulationConfig all_expert_ring(int n, long long horizon, std::uint64_t seed) {
  SimulationConfig config;
  config.space = ternary_space();
  for (int i = 0; i < n; ++i) {
    config.model.agents.push_back(
        sensor_rows({{0.8, 0.1, 0.1}, {0.1, 0.8, 0.1}, {0.1, 0.1, 0.8}}));
  }
  config.net = beliefsim::validate_network(ring_matrix(n, 0.6));
  config.horizon = horizon;
  config.seed = seed;
  config.rule = Rule::GeometricSample;
  config.thinning = 1;
  return config;
}

/// 5-agent directed ring, m = 3, exactly one expert per wrong state
/// (agent 0 for state 1, agent 1 for state 2), everyone else uninformative.
inline SimulationConfig single_expert_ring(long long horizon, std::uint64_t seed,
                                           long long thinning) {
  SimulationConfig config;
  config.space = ternary_space();
  config.model.agents.push_back(sensor_rows({{0.9, 0.1}, {0.1, 0.9}, {0.9, 0.1}}));
  config.model.agents.push_back(sensor_rows({{0.9, 0.1}, {0.9, 0.1}, {0.1, 0.9}}));
  for (int i = 2; i < 5; ++i) {
    config.model.agents.push_back(sensor_rows({{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}}));
  }
  config.net = beliefsim::validate_network(ring_matrix(5, 0.6));
  config.horizon = horizon;
  config.seed = seed;
  config.rule = Rule::GeometricSample;
  config.thinning = thinning;
  return config;
}

/// 3-agent cycle whose shortest paths to the sole expert (agent 2) use
/// weight-0.4 edges: 0 -> 1 -> 2.
inline beliefsim::Network expert_chain_network() {
  return beliefsim::validate_network(
      {{0.6, 0.4, 0.0}, {0.0, 0.6, 0.4}, {0.4, 0.0, 0.6}});
}

// ---- independent oracles ----

inline double kl_oracle(const std::vector<double>& p, const std::vector<double>& q) {
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) sum += p[k] * std::log(p[k] / q[k]);
  return sum;
}

inline double renyi_oracle(double alpha, const std::vector<double>& p,
                           const std::vector<double>& q) {
  if (alpha == 1.0) return kl_oracle(p, q);
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    sum += std::pow(p[k], alpha) * std::pow(q[k], 1.0 - alpha);
  }
  return std::log(sum) / (alpha - 1.0);
}

/// Dense-grid maximization of (1-a)(D_a - beta), step 1e-5; the certified
/// bracket the implementation must match or beat.
inline double gamma_grid_oracle(double beta, const std::vector<double>& p,
                                const std::vector<double>& q) {
  double best = 0.0;
  for (double alpha = 1e-5; alpha < 1.0; alpha += 1e-5) {
    const double d = renyi_oracle(alpha, p, q);
    if (d > beta) best = std::max(best, (1.0 - alpha) * (d - beta));
  }
  return best;
}

/// Boolean transitive closure over the off-diagonal support; pairwise
/// reachability check by repeated support multiplication.
inline bool strongly_connected_oracle(const Matrix& w) {
  const int n = static_cast<int>(w.size());
  std::vector<std::vector<bool>> reach(static_cast<std::size_t>(n),
                                       std::vector<bool>(static_cast<std::size_t>(n), false));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] > 0.0) {
        reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
      }
    }
  }
  for (int step = 0; step < n; ++step) {
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        if (!reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]) continue;
        for (int j = 0; j < n; ++j) {
          if (reach[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]) {
            reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
          }
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && !reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) return false;
    }
  }
  return true;
}

}  // namespace fixtures
