#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "beliefsim/rng.hpp"

namespace beliefsim {

/// Pseudocount-smoothed action frequencies; strictly positive by construction.
struct EmpiricalDistribution {
  std::vector<double> probs;
  long long rounds = 0;  // recorded actions behind this view
};

/// One agent's dynamic state. Beliefs live in log space; counters are exact
/// integers (one pseudocount per state).
struct AgentState {
  std::vector<double> log_private;
  std::vector<double> log_pooled;
  std::vector<long long> counters;
  int last_action = -1;

  int num_states() const { return static_cast<int>(counters.size()); }
  long long actions_recorded() const;
};

/// Uniform beliefs, all counters at 1, no action yet.
AgentState init_agent(int m);

/// Bayes step in log space: adds per-state log likelihood of the observed
/// signal, then renormalizes. `likelihood_per_state[theta]` = l_i(signal|theta).
void private_bayes_update(AgentState& state, std::span<const double> likelihood_per_state);

void record_action(AgentState& state, int action);

/// counters / (t + m), exact integer arithmetic converted once.
EmpiricalDistribution empirical_view(const AgentState& state);

/// Weighted geometric pooling of the private belief with observed peers'
/// empirical distributions, log-sum-exp normalized.
/// Requires self_weight + sum(neighbor_weights) == 1 within 1e-9.
void pool_beliefs(AgentState& state, std::span<const EmpiricalDistribution> neighbor_empiricals,
                  double self_weight, std::span<const double> neighbor_weights);

/// Inverse-CDF draw from the pooled belief over the fixed state order.
int sample_action(const AgentState& state, RngStream& rng);

/// In-place log-sum-exp normalization; returns the log normalizer.
double normalize_log_distribution(std::span<double> log_weights);

}  // namespace beliefsim
