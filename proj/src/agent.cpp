#include "beliefsim/agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "beliefsim/errors.hpp"

namespace beliefsim {

long long AgentState::actions_recorded() const {
  long long sum = 0;
  for (long long c : counters) sum += c;
  return sum - num_states();
}

AgentState init_agent(int m) {
  if (m < 2) {
    throw ValidationError(ErrorCode::DimensionMismatch, "agent needs at least 2 states");
  }
  AgentState state;
  const double log_uniform = -std::log(static_cast<double>(m));
  state.log_private.assign(static_cast<std::size_t>(m), log_uniform);
  state.log_pooled.assign(static_cast<std::size_t>(m), log_uniform);
  state.counters.assign(static_cast<std::size_t>(m), 1);
  return state;
}

double normalize_log_distribution(std::span<double> log_weights) {
  double max_log = -std::numeric_limits<double>::infinity();
  for (double v : log_weights) max_log = std::max(max_log, v);
  double sum = 0.0;
  for (double v : log_weights) sum += std::exp(v - max_log);
  const double log_norm = max_log + std::log(sum);
  for (double& v : log_weights) v -= log_norm;
  return log_norm;
}

void private_bayes_update(AgentState& state, std::span<const double> likelihood_per_state) {
  for (std::size_t theta = 0; theta < state.log_private.size(); ++theta) {
    state.log_private[theta] += std::log(likelihood_per_state[theta]);
  }
  normalize_log_distribution(state.log_private);
}

void record_action(AgentState& state, int action) {
  state.counters[static_cast<std::size_t>(action)] += 1;
  state.last_action = action;
}

EmpiricalDistribution empirical_view(const AgentState& state) {
  EmpiricalDistribution emp;
  emp.rounds = state.actions_recorded();
  const double denom = static_cast<double>(emp.rounds + state.num_states());
  emp.probs.resize(state.counters.size());
  for (std::size_t theta = 0; theta < state.counters.size(); ++theta) {
    emp.probs[theta] = static_cast<double>(state.counters[theta]) / denom;
  }
  return emp;
}

void pool_beliefs(AgentState& state, std::span<const EmpiricalDistribution> neighbor_empiricals,
                  double self_weight, std::span<const double> neighbor_weights) {
  if (neighbor_empiricals.size() != neighbor_weights.size()) {
    throw ValidationError(ErrorCode::LengthMismatch,
                          "neighbor empiricals and weights differ in length");
  }
  double total = self_weight;
  for (double w : neighbor_weights) total += w;
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "pooling weights sum to " << total;
    throw ValidationError(ErrorCode::WeightMismatch, msg.str());
  }
  for (std::size_t theta = 0; theta < state.log_pooled.size(); ++theta) {
    double acc = self_weight * state.log_private[theta];
    for (std::size_t j = 0; j < neighbor_empiricals.size(); ++j) {
      acc += neighbor_weights[j] * std::log(neighbor_empiricals[j].probs[theta]);
    }
    state.log_pooled[theta] = acc;
  }
  normalize_log_distribution(state.log_pooled);
}

int sample_action(const AgentState& state, RngStream& rng) {
  const double u = rng.next_unit();
  double cum = 0.0;
  const int last = state.num_states() - 1;
  for (int theta = 0; theta < last; ++theta) {
    cum += std::exp(state.log_pooled[static_cast<std::size_t>(theta)]);
    if (u < cum) return theta;
  }
  return last;
}

}  // namespace beliefsim
