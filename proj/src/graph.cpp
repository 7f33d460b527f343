#include "beliefsim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "beliefsim/errors.hpp"

namespace beliefsim {

std::vector<int> Network::neighbors(int i) const {
  std::vector<int> out;
  for (int j = 0; j < n; ++j) {
    if (j != i && weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] > 0.0) {
      out.push_back(j);
    }
  }
  return out;
}

namespace {

// Reachability sweep over positive off-diagonal support. Self-loops never
// create inter-agent reachability.
std::vector<bool> reachable_from(int start, const Matrix& weights, bool reversed) {
  const int n = static_cast<int>(weights.size());
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::deque<int> frontier{start};
  seen[static_cast<std::size_t>(start)] = true;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop_front();
    for (int v = 0; v < n; ++v) {
      if (v == u || seen[static_cast<std::size_t>(v)]) continue;
      const double w = reversed ? weights[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)]
                                : weights[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
      if (w > 0.0) {
        seen[static_cast<std::size_t>(v)] = true;
        frontier.push_back(v);
      }
    }
  }
  return seen;
}

}  // namespace

Network validate_network(Matrix weights) {
  const int n = static_cast<int>(weights.size());
  if (n < 1) {
    throw ValidationError(ErrorCode::DimensionMismatch, "network has no agents");
  }
  for (int i = 0; i < n; ++i) {
    const auto& row = weights[static_cast<std::size_t>(i)];
    if (static_cast<int>(row.size()) != n) {
      std::ostringstream msg;
      msg << "row " << i << " has " << row.size() << " entries, expected " << n;
      throw ValidationError(ErrorCode::DimensionMismatch, msg.str());
    }
    double sum = 0.0;
    for (double v : row) {
      if (v < 0.0) {
        std::ostringstream msg;
        msg << "row " << i << " has negative weight " << v;
        throw ValidationError(ErrorCode::NotRowStochastic, msg.str());
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      std::ostringstream msg;
      msg << "row " << i << " sums to " << sum;
      throw ValidationError(ErrorCode::NotRowStochastic, msg.str());
    }
    if (!(row[static_cast<std::size_t>(i)] > 0.0)) {
      std::ostringstream msg;
      msg << "agent " << i << " has zero self-confidence";
      throw ValidationError(ErrorCode::ZeroDiagonal, msg.str());
    }
  }

  // Two sweeps from node 0 suffice: forward and reverse reachability of a
  // single node covers strong connectivity.
  const auto fwd = reachable_from(0, weights, /*reversed=*/false);
  const auto bwd = reachable_from(0, weights, /*reversed=*/true);
  for (int v = 0; v < n; ++v) {
    if (!fwd[static_cast<std::size_t>(v)]) {
      std::ostringstream msg;
      msg << "agent " << v << " unreachable from agent 0";
      throw ValidationError(ErrorCode::NotStronglyConnected, msg.str());
    }
    if (!bwd[static_cast<std::size_t>(v)]) {
      std::ostringstream msg;
      msg << "agent 0 unreachable from agent " << v;
      throw ValidationError(ErrorCode::NotStronglyConnected, msg.str());
    }
  }

  Network net;
  net.n = n;
  net.weights = std::move(weights);
  return net;
}

ExpertGeometry expert_geometry_from_set(int theta, const std::vector<int>& experts,
                                        const Network& net) {
  if (experts.empty()) {
    std::ostringstream msg;
    msg << "no agent separates state " << theta << " from the true state";
    throw ValidationError(ErrorCode::EmptyExpertSet, msg.str());
  }
  const int n = net.n;
  ExpertGeometry geom;
  geom.theta = theta;
  geom.expert_set = experts;
  std::sort(geom.expert_set.begin(), geom.expert_set.end());
  geom.dist.assign(static_cast<std::size_t>(n), -1);
  geom.sigma.assign(static_cast<std::size_t>(n), -1);

  // Multi-source BFS from the expert set over reversed observation edges;
  // a path i -> sigma_i -> ... -> expert follows edges with a_{i,next} > 0.
  std::deque<int> frontier;
  for (int e : geom.expert_set) {
    geom.dist[static_cast<std::size_t>(e)] = 0;
    frontier.push_back(e);
  }
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop_front();
    for (int v = 0; v < n; ++v) {
      if (v == u || geom.dist[static_cast<std::size_t>(v)] >= 0) continue;
      if (net.weights[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] > 0.0) {
        geom.dist[static_cast<std::size_t>(v)] = geom.dist[static_cast<std::size_t>(u)] + 1;
        frontier.push_back(v);
      }
    }
  }

  geom.h = 0;
  for (int i = 0; i < n; ++i) {
    // Validated networks are strongly connected, so every agent reaches the set.
    geom.h = std::max(geom.h, geom.dist[static_cast<std::size_t>(i)]);
  }

  // sigma_i: lowest-index observed peer one level closer to the experts.
  for (int i = 0; i < n; ++i) {
    const int d = geom.dist[static_cast<std::size_t>(i)];
    if (d == 0) continue;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      if (net.weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] > 0.0 &&
          geom.dist[static_cast<std::size_t>(j)] == d - 1) {
        geom.sigma[static_cast<std::size_t>(i)] = j;
        break;
      }
    }
  }

  geom.beta_bar.assign(static_cast<std::size_t>(geom.h) + 1, 0.0);
  geom.beta_bar[0] = 0.75;
  for (int level = 1; level <= geom.h; ++level) {
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      if (geom.dist[static_cast<std::size_t>(i)] != level) continue;
      const int s = geom.sigma[static_cast<std::size_t>(i)];
      const double a_is = net.weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)];
      best = std::max(best, 1.0 - a_is * (1.0 - geom.beta_bar[static_cast<std::size_t>(level) - 1]));
    }
    if (best < 0.0) {
      // BFS layering never leaves a gap, but carry the previous level forward
      // and flag it rather than fault.
      geom.beta_bar[static_cast<std::size_t>(level)] = geom.beta_bar[static_cast<std::size_t>(level) - 1];
      geom.skipped_level = true;
    } else {
      geom.beta_bar[static_cast<std::size_t>(level)] = best;
    }
  }

  geom.beta_tilde.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = net.self_weight(i);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double a_ij = net.weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (a_ij > 0.0) {
        acc += a_ij * geom.beta_bar[static_cast<std::size_t>(geom.dist[static_cast<std::size_t>(j)])];
      }
    }
    geom.beta_tilde[static_cast<std::size_t>(i)] = acc;
  }
  return geom;
}

ExpertGeometry expert_geometry(int theta, const DistinguishabilityReport& report,
                               const Network& net) {
  return expert_geometry_from_set(theta, report.expert_set(theta), net);
}

namespace {

Matrix ring_weights(int n, double self_weight) {
  Matrix w(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = self_weight;
    w[static_cast<std::size_t>(i)][static_cast<std::size_t>((i + 1) % n)] = 1.0 - self_weight;
  }
  return w;
}

Matrix star_weights(int n, double self_weight) {
  Matrix w(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  const double hub_share = (1.0 - self_weight) / static_cast<double>(n - 1);
  w[0][0] = self_weight;
  for (int k = 1; k < n; ++k) {
    w[0][static_cast<std::size_t>(k)] = hub_share;
    w[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] = self_weight;
    w[static_cast<std::size_t>(k)][0] = 1.0 - self_weight;
  }
  return w;
}

Matrix random_weights(int n, const ScenarioParams& params, RngStream& rng) {
  constexpr double kSelfFloor = 0.1;
  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    Matrix w(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        if (rng.next_unit() < params.edge_prob) {
          w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = rng.next_unit();
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      double off = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j != i) off += w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
      const double self = std::max(kSelfFloor, rng.next_unit());
      w[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = self;
      const double total = self + off;
      for (int j = 0; j < n; ++j) {
        w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] /= total;
      }
    }
    try {
      validate_network(w);
      return w;
    } catch (const ValidationError&) {
      // support not strongly connected; resample
    }
  }
  throw ValidationError(ErrorCode::GenerationBudgetExceeded,
                        "no strongly connected support found within attempt budget");
}

}  // namespace

Matrix scenario_weights(ScenarioKind kind, int n, const ScenarioParams& params,
                        RngStream& rng) {
  if (n < 2) {
    throw ValidationError(ErrorCode::DimensionMismatch, "generators need n >= 2");
  }
  if (!(params.self_weight > 0.0) || !(params.self_weight < 1.0)) {
    throw ValidationError(ErrorCode::BadConfig, "self_weight must lie in (0, 1)");
  }
  switch (kind) {
    case ScenarioKind::Ring: return ring_weights(n, params.self_weight);
    case ScenarioKind::Star: return star_weights(n, params.self_weight);
    case ScenarioKind::Random: return random_weights(n, params, rng);
  }
  throw ValidationError(ErrorCode::BadConfig, "unknown scenario kind");
}

}  // namespace beliefsim
