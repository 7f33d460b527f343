#pragma once

#include <cstdint>
#include <vector>

#include "beliefsim/core_model.hpp"
#include "beliefsim/rng.hpp"

namespace beliefsim {

/// Row-stochastic trust matrix with positive diagonal over a strongly
/// connected observation graph (edge i->j iff a_ij > 0, i != j).
struct Network {
  int n = 0;
  Matrix weights;

  double self_weight(int i) const {
    return weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
  }

  /// Observed peers of i (j != i with a_ij > 0), ascending.
  std::vector<int> neighbors(int i) const;
};

Network validate_network(Matrix weights);

/// Distance layering toward the experts for one wrong state, the resulting
/// per-level count exponents, and the per-agent pooled exponent.
struct ExpertGeometry {
  int theta = -1;
  std::vector<int> expert_set;
  std::vector<int> dist;          // hops to the expert set; 0 for experts
  std::vector<int> sigma;         // next hop toward the set; -1 for experts
  int h = 0;                      // max distance
  std::vector<double> beta_bar;   // levels 0..h
  std::vector<double> beta_tilde; // a_ii + sum_j a_ij * beta_bar[dist(j)]
  bool skipped_level = false;     // a level had no agents and carried forward
};

ExpertGeometry expert_geometry(int theta, const DistinguishabilityReport& report,
                               const Network& net);
ExpertGeometry expert_geometry_from_set(int theta, const std::vector<int>& experts,
                                        const Network& net);

enum class ScenarioKind { Ring, Star, Random };

struct ScenarioParams {
  double self_weight = 0.6;
  double edge_prob = 0.4;  // random kind only
  int max_attempts = 1000;
};

/// Test-fixture network construction; every result passes validate_network.
Matrix scenario_weights(ScenarioKind kind, int n, const ScenarioParams& params,
                        RngStream& rng);

}  // namespace beliefsim
