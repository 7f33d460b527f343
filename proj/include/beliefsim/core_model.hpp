#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "beliefsim/rng.hpp"

namespace beliefsim {

using Matrix = std::vector<std::vector<double>>;

/// Finite hypothesis set plus the index of the realized state.
struct StateSpace {
  std::vector<std::string> states;
  int true_state = 0;

  int size() const { return static_cast<int>(states.size()); }
};

/// One agent's private information source: a finite signal alphabet and one
/// conditional signal distribution per state (rows indexed by state).
struct AgentSensor {
  std::vector<std::string> signals;
  Matrix likelihood;  // m rows, |signals| columns, all entries > 0
};

struct LikelihoodModel {
  std::vector<AgentSensor> agents;

  int num_agents() const { return static_cast<int>(agents.size()); }
};

/// Which state pairs each agent can tell apart, and whether the group as a
/// whole separates every pair.
struct DistinguishabilityReport {
  int m = 0;
  int true_state = 0;
  // equivalent[i][a][b]: agent i's signal distributions for states a and b
  // match within tolerance. Symmetric with a true diagonal.
  std::vector<std::vector<std::vector<bool>>> equivalent;
  // identifiable[i][theta]: theta differs from the true state in agent i's
  // likelihoods. False at theta == true_state.
  std::vector<std::vector<bool>> identifiable;
  bool collective = false;
  std::vector<std::pair<int, int>> violating_pairs;  // a < b, separated by no agent

  /// Agents that separate `theta` from the true state.
  std::vector<int> expert_set(int theta) const;
};

/// A feasible decay target beta together with the tail exponent it certifies.
struct ExponentSpec {
  double beta = 0.0;
  double gamma = 0.0;
  double alpha_star = 0.5;  // maximizing Renyi order, in (0,1)
};

/// Checks likelihood rows are strictly positive probability vectors of
/// consistent dimensions. Throws ValidationError; returns the model unchanged.
LikelihoodModel validate_model(LikelihoodModel model, const StateSpace& space);

void validate_distribution(std::span<const double> p, double tol = 1e-9);

/// One private observation for `agent` conditioned on `true_state`,
/// inverse-CDF over the declared signal order.
int sample_signal(int agent, int true_state, const LikelihoodModel& model, RngStream& rng);

/// KL divergence in nats. Inputs must be strictly positive distributions.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// alpha-Renyi divergence; alpha == 1 delegates to kl_divergence.
double renyi_divergence(double alpha, std::span<const double> p, std::span<const double> q);

/// Largest certified tail exponent for a decay target 0 < beta < KL(P||Q):
/// maximizes (1-alpha)*(D_alpha(P||Q) - beta) over alpha in (0,1) by a dense
/// grid (step 1e-4) plus golden-section refinement of the bracketing cell.
ExponentSpec decay_exponent_gamma(double beta, std::span<const double> p,
                                  std::span<const double> q);

/// Pairwise observational-equivalence scan, max-abs row comparison.
DistinguishabilityReport distinguishability(const LikelihoodModel& model,
                                            const StateSpace& space,
                                            double tolerance = 1e-12);

}  // namespace beliefsim
