#include "beliefsim/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "beliefsim/errors.hpp"

namespace beliefsim {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveEntry: return "NonPositiveEntry";
    case ErrorCode::RowSumMismatch: return "RowSumMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::BetaOutOfRange: return "BetaOutOfRange";
    case ErrorCode::NotRowStochastic: return "NotRowStochastic";
    case ErrorCode::ZeroDiagonal: return "ZeroDiagonal";
    case ErrorCode::NotStronglyConnected: return "NotStronglyConnected";
    case ErrorCode::EmptyExpertSet: return "EmptyExpertSet";
    case ErrorCode::WeightMismatch: return "WeightMismatch";
    case ErrorCode::GenerationBudgetExceeded: return "GenerationBudgetExceeded";
    case ErrorCode::NotIdentifiable: return "NotIdentifiable";
    case ErrorCode::BadConfig: return "BadConfig";
  }
  return "UnknownError";
}

std::vector<int> DistinguishabilityReport::expert_set(int theta) const {
  std::vector<int> experts;
  for (int i = 0; i < static_cast<int>(identifiable.size()); ++i) {
    if (identifiable[static_cast<std::size_t>(i)][static_cast<std::size_t>(theta)]) {
      experts.push_back(i);
    }
  }
  return experts;
}

LikelihoodModel validate_model(LikelihoodModel model, const StateSpace& space) {
  const int m = space.size();
  if (m < 2) {
    throw ValidationError(ErrorCode::DimensionMismatch, "state space needs at least 2 states");
  }
  if (space.true_state < 0 || space.true_state >= m) {
    throw ValidationError(ErrorCode::DimensionMismatch, "true_state index out of range");
  }
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      if (space.states[static_cast<std::size_t>(a)] == space.states[static_cast<std::size_t>(b)]) {
        throw ValidationError(ErrorCode::DimensionMismatch,
                              "duplicate state identifier '" + space.states[static_cast<std::size_t>(a)] + "'");
      }
    }
  }
  if (model.agents.empty()) {
    throw ValidationError(ErrorCode::DimensionMismatch, "model has no agents");
  }
  for (int i = 0; i < model.num_agents(); ++i) {
    const AgentSensor& sensor = model.agents[static_cast<std::size_t>(i)];
    const int s = static_cast<int>(sensor.signals.size());
    if (s < 2) {
      std::ostringstream msg;
      msg << "agent " << i << " needs at least 2 signals";
      throw ValidationError(ErrorCode::DimensionMismatch, msg.str());
    }
    if (static_cast<int>(sensor.likelihood.size()) != m) {
      std::ostringstream msg;
      msg << "agent " << i << " likelihood has " << sensor.likelihood.size()
          << " rows, expected " << m;
      throw ValidationError(ErrorCode::DimensionMismatch, msg.str());
    }
    for (int theta = 0; theta < m; ++theta) {
      const auto& row = sensor.likelihood[static_cast<std::size_t>(theta)];
      if (static_cast<int>(row.size()) != s) {
        std::ostringstream msg;
        msg << "agent " << i << " state " << theta << " row has " << row.size()
            << " entries, expected " << s;
        throw ValidationError(ErrorCode::DimensionMismatch, msg.str());
      }
      double sum = 0.0;
      for (int k = 0; k < s; ++k) {
        const double v = row[static_cast<std::size_t>(k)];
        if (!(v > 0.0)) {
          std::ostringstream msg;
          msg << "agent " << i << " state " << theta << " signal " << k << " entry " << v;
          throw ValidationError(ErrorCode::NonPositiveEntry, msg.str());
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "agent " << i << " state " << theta << " row sums to " << sum;
        throw ValidationError(ErrorCode::RowSumMismatch, msg.str());
      }
    }
  }
  return model;
}

void validate_distribution(std::span<const double> p, double tol) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v > 0.0)) {
      throw ValidationError(ErrorCode::NonPositiveEntry, "distribution entry must be positive");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol) {
    std::ostringstream msg;
    msg << "distribution sums to " << sum;
    throw ValidationError(ErrorCode::RowSumMismatch, msg.str());
  }
}

int sample_signal(int agent, int true_state, const LikelihoodModel& model, RngStream& rng) {
  const auto& row =
      model.agents[static_cast<std::size_t>(agent)].likelihood[static_cast<std::size_t>(true_state)];
  return draw_categorical(row, rng.next_unit());
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw ValidationError(ErrorCode::LengthMismatch, "KL inputs differ in length");
  }
  validate_distribution(p);
  validate_distribution(q);
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    sum += p[k] * std::log(p[k] / q[k]);
  }
  return sum;
}

double renyi_divergence(double alpha, std::span<const double> p, std::span<const double> q) {
  if (alpha < 0.0) {
    throw ValidationError(ErrorCode::BetaOutOfRange, "Renyi order must be nonnegative");
  }
  if (alpha == 1.0) return kl_divergence(p, q);
  if (p.size() != q.size()) {
    throw ValidationError(ErrorCode::LengthMismatch, "Renyi inputs differ in length");
  }
  validate_distribution(p);
  validate_distribution(q);
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    sum += std::pow(p[k], alpha) * std::pow(q[k], 1.0 - alpha);
  }
  return std::log(sum) / (alpha - 1.0);
}

namespace {

double tail_objective(double alpha, double beta, std::span<const double> p,
                      std::span<const double> q) {
  return (1.0 - alpha) * (renyi_divergence(alpha, p, q) - beta);
}

}  // namespace

ExponentSpec decay_exponent_gamma(double beta, std::span<const double> p,
                                  std::span<const double> q) {
  const double kl = kl_divergence(p, q);
  if (!(beta > 0.0) || !(beta < kl)) {
    std::ostringstream msg;
    msg << "beta " << beta << " must lie in (0, " << kl << ")";
    throw ValidationError(ErrorCode::BetaOutOfRange, msg.str());
  }

  constexpr double kGridStep = 1e-4;
  double best_alpha = 0.0;
  double best_value = -1.0;
  for (double alpha = kGridStep; alpha < 1.0; alpha += kGridStep) {
    const double value = tail_objective(alpha, beta, p, q);
    if (value > best_value) {
      best_value = value;
      best_alpha = alpha;
    }
  }

  // Golden-section refinement on the grid cell bracketing the maximizer.
  double lo = std::max(best_alpha - kGridStep, kGridStep * 0.5);
  double hi = std::min(best_alpha + kGridStep, 1.0 - kGridStep * 0.5);
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = tail_objective(x1, beta, p, q);
  double f2 = tail_objective(x2, beta, p, q);
  while (hi - lo > 1e-12) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = tail_objective(x2, beta, p, q);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = tail_objective(x1, beta, p, q);
    }
  }
  const double alpha_star = 0.5 * (lo + hi);
  const double gamma = tail_objective(alpha_star, beta, p, q);

  ExponentSpec spec;
  spec.beta = beta;
  spec.gamma = std::max(gamma, best_value);
  spec.alpha_star = gamma >= best_value ? alpha_star : best_alpha;
  return spec;
}

DistinguishabilityReport distinguishability(const LikelihoodModel& model,
                                            const StateSpace& space, double tolerance) {
  const int m = space.size();
  const int n = model.num_agents();
  DistinguishabilityReport report;
  report.m = m;
  report.true_state = space.true_state;
  report.equivalent.assign(
      static_cast<std::size_t>(n),
      std::vector<std::vector<bool>>(static_cast<std::size_t>(m),
                                     std::vector<bool>(static_cast<std::size_t>(m), false)));
  report.identifiable.assign(static_cast<std::size_t>(n),
                             std::vector<bool>(static_cast<std::size_t>(m), false));

  for (int i = 0; i < n; ++i) {
    const Matrix& lik = model.agents[static_cast<std::size_t>(i)].likelihood;
    for (int a = 0; a < m; ++a) {
      report.equivalent[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)]
                       [static_cast<std::size_t>(a)] = true;
      for (int b = a + 1; b < m; ++b) {
        double max_abs = 0.0;
        for (std::size_t k = 0; k < lik[static_cast<std::size_t>(a)].size(); ++k) {
          max_abs = std::max(max_abs, std::abs(lik[static_cast<std::size_t>(a)][k] -
                                               lik[static_cast<std::size_t>(b)][k]));
        }
        const bool equal = max_abs <= tolerance;
        report.equivalent[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)]
                         [static_cast<std::size_t>(b)] = equal;
        report.equivalent[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)]
                         [static_cast<std::size_t>(a)] = equal;
      }
    }
    for (int theta = 0; theta < m; ++theta) {
      report.identifiable[static_cast<std::size_t>(i)][static_cast<std::size_t>(theta)] =
          theta != space.true_state &&
          !report.equivalent[static_cast<std::size_t>(i)][static_cast<std::size_t>(theta)]
                            [static_cast<std::size_t>(space.true_state)];
    }
  }

  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      bool separated = false;
      for (int i = 0; i < n && !separated; ++i) {
        separated = !report.equivalent[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)]
                                      [static_cast<std::size_t>(b)];
      }
      if (!separated) report.violating_pairs.emplace_back(a, b);
    }
  }
  report.collective = report.violating_pairs.empty();
  return report;
}

}  // namespace beliefsim
