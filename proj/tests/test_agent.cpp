#include "doctest.h"

#include <cmath>
#include <vector>

#include "beliefsim/agent.hpp"
#include "beliefsim/errors.hpp"

using namespace beliefsim;

namespace {

std::vector<double> linear(const std::vector<double>& logs) {
  std::vector<double> out;
  for (double v : logs) out.push_back(std::exp(v));
  return out;
}

double sum_linear(const std::vector<double>& logs) {
  double s = 0.0;
  for (double v : logs) s += std::exp(v);
  return s;
}

}  // namespace

TEST_CASE("init_agent starts uniform with unit counters") {
  const auto a2 = init_agent(2);
  CHECK(linear(a2.log_private)[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(linear(a2.log_pooled)[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(a2.counters == std::vector<long long>{1, 1});
  CHECK(a2.last_action == -1);
  CHECK(a2.actions_recorded() == 0);

  const auto a4 = init_agent(4);
  for (double v : linear(a4.log_private)) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));

  const auto emp = empirical_view(init_agent(3));
  for (double v : emp.probs) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(emp.rounds == 0);

  CHECK_THROWS_AS(init_agent(1), ValidationError);
}

TEST_CASE("bayes update reproduces the hand posterior") {
  auto state = init_agent(2);
  private_bayes_update(state, std::vector<double>{0.7, 0.3});
  const auto post = linear(state.log_private);
  CHECK(post[0] == doctest::Approx(0.7).epsilon(1e-12));  // 0.5*0.7/(0.5*0.7+0.5*0.3)
  CHECK(post[1] == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("uninformative likelihood leaves the belief unchanged") {
  auto state = init_agent(3);
  private_bayes_update(state, std::vector<double>{0.4, 0.4, 0.4});
  for (double v : linear(state.log_private)) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("two sequential updates equal one batched update") {
  const std::vector<double> l1{0.7, 0.3};
  const std::vector<double> l2{0.2, 0.8};

  auto sequential = init_agent(2);
  private_bayes_update(sequential, l1);
  private_bayes_update(sequential, l2);

  auto batched = init_agent(2);
  private_bayes_update(batched, std::vector<double>{l1[0] * l2[0], l1[1] * l2[1]});

  for (int k = 0; k < 2; ++k) {
    CHECK(sequential.log_private[static_cast<std::size_t>(k)] ==
          doctest::Approx(batched.log_private[static_cast<std::size_t>(k)]).epsilon(1e-12));
  }
}

TEST_CASE("record_action increments exactly one counter") {
  auto state = init_agent(3);
  record_action(state, 0);
  CHECK(state.counters == std::vector<long long>{2, 1, 1});
  CHECK(state.last_action == 0);
  record_action(state, 0);
  const auto emp = empirical_view(state);  // t = 2, denominator t + m = 5
  CHECK(emp.probs[0] == doctest::Approx(3.0 / 5.0).epsilon(1e-15));
  CHECK(emp.probs[1] == doctest::Approx(1.0 / 5.0).epsilon(1e-15));
  CHECK(emp.probs[2] == doctest::Approx(1.0 / 5.0).epsilon(1e-15));
  CHECK(state.actions_recorded() == 2);
}

TEST_CASE("counter sum tracks rounds") {
  auto state = init_agent(4);
  RngStream rng(5);
  for (int t = 1; t <= 200; ++t) {
    record_action(state, static_cast<int>(rng.next_unit() * 4));
    long long sum = 0;
    for (long long c : state.counters) sum += c;
    CHECK(sum == t + 4);
  }
}

TEST_CASE("pooling reproduces the closed-form two-state example") {
  auto state = init_agent(2);
  state.log_private = {std::log(0.8), std::log(0.2)};
  EmpiricalDistribution emp;
  emp.probs = {0.5, 0.5};
  pool_beliefs(state, std::vector<EmpiricalDistribution>{emp}, 0.5, std::vector<double>{0.5});
  const auto pooled = linear(state.log_pooled);
  CHECK(pooled[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));  // sqrt(0.8/0.2) = 2, normalized
  CHECK(pooled[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("pooling identical distributions is a fixed point") {
  auto state = init_agent(3);
  EmpiricalDistribution emp;
  emp.probs = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  pool_beliefs(state, std::vector<EmpiricalDistribution>{emp, emp}, 0.4,
               std::vector<double>{0.3, 0.3});
  for (double v : linear(state.log_pooled)) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("degenerate self weight reduces pooling to the private belief") {
  auto state = init_agent(2);
  state.log_private = {std::log(0.9), std::log(0.1)};
  pool_beliefs(state, {}, 1.0, {});
  for (int k = 0; k < 2; ++k) {
    CHECK(state.log_pooled[static_cast<std::size_t>(k)] ==
          doctest::Approx(state.log_private[static_cast<std::size_t>(k)]).epsilon(1e-12));
  }
}

TEST_CASE("pooling rejects weights that do not sum to one") {
  auto state = init_agent(2);
  EmpiricalDistribution emp;
  emp.probs = {0.5, 0.5};
  try {
    pool_beliefs(state, std::vector<EmpiricalDistribution>{emp}, 0.5, std::vector<double>{0.4});
    FAIL("expected WeightMismatch");
  } catch (const ValidationError& err) {
    CHECK(err.code() == ErrorCode::WeightMismatch);
  }
}

TEST_CASE("pooling is invariant to a constant shift in the log domain") {
  EmpiricalDistribution emp;
  emp.probs = {0.7, 0.2, 0.1};

  auto base = init_agent(3);
  base.log_private = {std::log(0.5), std::log(0.3), std::log(0.2)};
  auto shifted = base;
  for (double& v : shifted.log_private) v += 17.0;  // scales every factor by e^(a_ii * 17)

  pool_beliefs(base, std::vector<EmpiricalDistribution>{emp}, 0.6, std::vector<double>{0.4});
  pool_beliefs(shifted, std::vector<EmpiricalDistribution>{emp}, 0.6, std::vector<double>{0.4});
  for (int k = 0; k < 3; ++k) {
    CHECK(base.log_pooled[static_cast<std::size_t>(k)] ==
          doctest::Approx(shifted.log_pooled[static_cast<std::size_t>(k)]).epsilon(1e-12));
  }
}

TEST_CASE("beliefs stay normalized through random operation sequences") {
  RngStream rng(61);
  auto state = init_agent(3);
  EmpiricalDistribution emp;
  for (int step = 0; step < 500; ++step) {
    const double x = 0.1 + 0.8 * rng.next_unit();
    private_bayes_update(state, std::vector<double>{x, 1.0 - x, 0.5});
    emp.probs = {0.2 + 0.6 * rng.next_unit(), 0.1, 0.0};
    emp.probs[2] = 1.0 - emp.probs[0] - emp.probs[1];
    pool_beliefs(state, std::vector<EmpiricalDistribution>{emp}, 0.7, std::vector<double>{0.3});
    record_action(state, static_cast<int>(rng.next_unit() * 3));
    CHECK(std::abs(sum_linear(state.log_private) - 1.0) <= 1e-9);
    CHECK(std::abs(sum_linear(state.log_pooled) - 1.0) <= 1e-9);
  }
}

TEST_CASE("private log-ratio equals the accumulated signal log-ratios") {
  // With a uniform prior the normalized private belief
  // keeps exactly the summed per-signal log-ratios.
  RngStream rng(8);
  const std::vector<double> row_true{0.65, 0.35};
  const std::vector<double> row_other{0.4, 0.6};
  auto state = init_agent(2);
  double accumulated = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int signal = rng.next_unit() < row_true[0] ? 0 : 1;
    private_bayes_update(state, std::vector<double>{row_true[static_cast<std::size_t>(signal)],
                                                    row_other[static_cast<std::size_t>(signal)]});
    accumulated += std::log(row_other[static_cast<std::size_t>(signal)] /
                            row_true[static_cast<std::size_t>(signal)]);
    CHECK(state.log_private[1] - state.log_private[0] == doctest::Approx(accumulated).epsilon(1e-9));
  }
}

TEST_CASE("action sampling follows the pooled belief") {
  auto state = init_agent(2);
  state.log_pooled = {std::log(0.1), std::log(0.9)};
  RngStream rng(321);
  int ones = 0;
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) ones += sample_action(state, rng);
  CHECK(static_cast<double>(ones) / draws == doctest::Approx(0.9).epsilon(0.011));

  // near-degenerate belief never yields the vanishing state in practice
  auto pinned = init_agent(2);
  pinned.log_pooled = {std::log(1.0 - 1e-15), std::log(1e-15)};
  RngStream rng2(11);
  for (int k = 0; k < 1000; ++k) CHECK(sample_action(pinned, rng2) == 0);
}
