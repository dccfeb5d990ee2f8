// Copyright 2026 The gain-index Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>

#include "doctest.h"
#include "support/oracles.hpp"
#include "uoi/lagrange.hpp"

namespace {

using uoi::Criterion;

std::vector<uoi::LagrangeBandit> random_bandits(std::uint64_t seed, int count,
                                                double beta, int l = 6) {
  std::mt19937_64 gen(seed);
  std::vector<uoi::LagrangeBandit> out;
  for (int i = 0; i < count; ++i) {
    const double rho = i % 2 ? 0.8 : 1.0;
    out.push_back({uoi::build_truncated(
        oracle::random_bandit(gen, 2 + i % 2, rho), l, beta)});
  }
  return out;
}

// Mean and standard error of discounted activation counts along sampled
// trajectories of `policy`.
std::pair<double, double> monte_carlo_activations(const uoi::FiniteMdp& mdp,
                                                  const uoi::Policy& policy,
                                                  int start, int runs) {
  std::mt19937_64 gen(1234);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int horizon = static_cast<int>(
      std::ceil(std::log(1e-9) / std::log(mdp.discount)));
  double sum = 0.0, sum_sq = 0.0;
  for (int r = 0; r < runs; ++r) {
    int s = start;
    double w = 1.0, total = 0.0;
    for (int t = 0; t < horizon; ++t) {
      total += w * policy[s];
      w *= mdp.discount;
      const auto& row = policy[s] ? mdp.active[s] : mdp.passive[s];
      double x = u(gen), acc = 0.0;
      int next = row.back().target;
      for (const auto& tr : row) {
        acc += tr.prob;
        if (x < acc) {
          next = tr.target;
          break;
        }
      }
      s = next;
    }
    sum += total;
    sum_sq += total * total;
  }
  const double mean = sum / runs;
  return {mean, std::sqrt((sum_sq / runs - mean * mean) / (runs - 1))};
}

}  // namespace

TEST_CASE("problem construction validates the channel count") {
  auto bandits = random_bandits(1, 2, 0.9);
  CHECK_THROWS_AS(uoi::LagrangeProblem::make(bandits, 2, Criterion::kDiscounted),
                  uoi::Error);
  CHECK_THROWS_AS(uoi::LagrangeProblem::make(bandits, 0, Criterion::kDiscounted),
                  uoi::Error);
  const auto p = uoi::LagrangeProblem::make(bandits, 1, Criterion::kDiscounted);
  CHECK(p.stepsize_c == doctest::Approx(0.1 * p.entropy_bound()));
  CHECK(p.epsilon == doctest::Approx(1e-3 * p.entropy_bound()));
  bandits[1].mdp = bandits[1].mdp.with_discount(0.8);
  CHECK_THROWS_AS(uoi::LagrangeProblem::make(bandits, 1, Criterion::kDiscounted),
                  uoi::Error);
}

TEST_CASE("activation derivatives at the extreme policies") {
  const auto b = random_bandits(2, 1, 0.9)[0];
  const int n = b.mdp.n_states();
  CHECK(uoi::derivative_discounted(b.mdp.mdp(), uoi::all_active(n), 0) ==
        doctest::Approx(10.0).epsilon(1e-12));
  CHECK(uoi::derivative_discounted(b.mdp.mdp(), uoi::all_passive(n), 0) == 0.0);
  CHECK(uoi::derivative_average(b.mdp.mdp(), uoi::all_active(n)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(uoi::derivative_average(b.mdp.mdp(), uoi::all_passive(n)) == 0.0);
}

TEST_CASE("discounted activation count matches sampled trajectories") {
  const auto b = random_bandits(3, 2, 0.9)[1];
  std::mt19937_64 gen(77);
  uoi::Policy policy(b.mdp.n_states());
  for (auto& a : policy) a = gen() & 1U;
  const double exact = uoi::derivative_discounted(b.mdp.mdp(), policy, 0);
  const auto [mean, se] =
      monte_carlo_activations(b.mdp.mdp(), policy, 0, 100000);
  CHECK(std::abs(mean - exact) <= 3.0 * se + 1e-12);
}

TEST_CASE("activation rate of an omega-only policy") {
  // rho = 1: from omega the bandit resets to T_k^1, then ages back to omega
  // in L passive steps, so one activation per L + 1 slots.
  const auto bandit = uoi::BanditSpec::make(
      uoi::validate_chain(oracle::sticky_pair_matrix()), 1.0, "sticky");
  const int l = 5;
  const auto mdp = uoi::build_truncated(bandit, l, 1.0);
  uoi::Policy policy = uoi::all_passive(mdp.n_states());
  policy[0] = 1;
  CHECK(uoi::derivative_average(mdp.mdp(), policy) ==
        doctest::Approx(1.0 / (l + 1)).epsilon(1e-12));
  // Stationary law of the induced chain by power iteration.
  auto p = oracle::policy_matrix(mdp.mdp(), policy);
  std::vector<double> x(mdp.n_states(), 0.0);
  x[0] = 1.0;
  std::vector<double> avg(mdp.n_states(), 0.0);
  const int steps = 6000;
  for (int t = 0; t < steps; ++t) {
    std::vector<double> y(x.size(), 0.0);
    for (std::size_t s = 0; s < x.size(); ++s) {
      for (std::size_t j = 0; j < x.size(); ++j) y[j] += x[s] * p[s][j];
    }
    x.swap(y);
    for (std::size_t s = 0; s < x.size(); ++s) avg[s] += x[s] / steps;
  }
  CHECK(avg[0] == doctest::Approx(1.0 / (l + 1)).epsilon(1e-3));
}

TEST_CASE("derivative endpoints of the dual") {
  for (std::uint64_t seed = 5; seed < 9; ++seed) {
    const auto disc = uoi::LagrangeProblem::make(random_bandits(seed, 4, 0.9),
                                                 2, Criterion::kDiscounted);
    CHECK(uoi::objective_derivative(disc, 0.0) ==
          doctest::Approx(2.0 / 0.1).epsilon(1e-12));
    CHECK(uoi::objective_derivative(disc, 1e6) ==
          doctest::Approx(-2.0 / 0.1).epsilon(1e-12));
    const auto avg = uoi::LagrangeProblem::make(random_bandits(seed, 4, 1.0),
                                                1, Criterion::kAverage);
    CHECK(uoi::objective_derivative(avg, 0.0) ==
          doctest::Approx(3.0).epsilon(1e-12));
    CHECK(uoi::objective_derivative(avg, 1e6) ==
          doctest::Approx(-1.0).epsilon(1e-12));
  }
  const auto p = uoi::LagrangeProblem::make(random_bandits(5, 3, 0.9), 1,
                                            Criterion::kDiscounted);
  CHECK_THROWS_AS(uoi::objective_derivative(p, -1.0), uoi::Error);
}

TEST_CASE("gradient search on two copies of the two-state chain") {
  const auto bandit = uoi::BanditSpec::make(
      uoi::validate_chain(oracle::sticky_pair_matrix()), 1.0, "sticky");
  const auto mdp = uoi::build_truncated(bandit, 12, 0.9);
  const auto problem = uoi::LagrangeProblem::make({{mdp}, {mdp}}, 1,
                                                  Criterion::kDiscounted,
                                                  std::nullopt, 1e-3);
  const auto trace = uoi::gradient_search(problem);
  REQUIRE(trace.stop_reason == uoi::StopReason::kConverged);
  const auto& it = trace.iterates;
  REQUIRE(it.size() >= 2);
  const auto& a = it[it.size() - 2];
  const auto& b = it.back();
  CHECK(a.derivative * b.derivative <= 0.0);
  CHECK(std::abs(a.lambda - b.lambda) < 1e-3);
  CHECK(trace.lambda_star == std::min(a.lambda, b.lambda));
  for (const auto& x : it) CHECK(x.lambda >= 0.0);

  // Dense sweep: the derivative changes sign inside the bracket.
  const double step = 1e-3 / 10;
  double lo = uoi::objective_derivative(problem, trace.bracket_low);
  bool sign_change = false;
  for (double l = trace.bracket_low + step; l <= trace.bracket_high + 1e-15;
       l += step) {
    const double d = uoi::objective_derivative(problem, l);
    if (lo * d <= 0.0) sign_change = true;
    lo = d;
  }
  const double hi = uoi::objective_derivative(problem, trace.bracket_high);
  CHECK((sign_change ||
         uoi::objective_derivative(problem, trace.bracket_low) * hi <= 0.0));
}

TEST_CASE("dual derivative is nonincreasing along increasing lambda") {
  const auto problem = uoi::LagrangeProblem::make(random_bandits(21, 3, 0.85),
                                                  1, Criterion::kDiscounted);
  double prev = 1e18;
  for (double l = 0.0; l <= 15.0; l += 0.25) {
    const double d = uoi::objective_derivative(problem, l);
    CHECK(d <= prev + 1e-6);
    prev = d;
  }
}

TEST_CASE("warm and cold searches agree") {
  for (std::uint64_t seed = 30; seed < 33; ++seed) {
    for (auto c : {Criterion::kDiscounted, Criterion::kAverage}) {
      const double beta = c == Criterion::kDiscounted ? 0.9 : 1.0;
      const auto problem =
          uoi::LagrangeProblem::make(random_bandits(seed, 3, beta), 1, c);
      const auto warm = uoi::gradient_search(problem, true);
      const auto cold = uoi::gradient_search(problem, false);
      CHECK(std::abs(warm.lambda_star - cold.lambda_star) < problem.epsilon);
      // Stopping certificate.
      CHECK(uoi::objective_derivative(problem, warm.bracket_low) >= -1e-9);
      CHECK(uoi::objective_derivative(problem, warm.bracket_high) <= 1e-9);
    }
  }
}

TEST_CASE("iteration budget is enforced") {
  const auto problem = uoi::LagrangeProblem::make(
      random_bandits(40, 3, 0.9), 1, Criterion::kDiscounted, 1e-6, 1e-9, 3);
  try {
    uoi::gradient_search(problem);
    FAIL("expected MaxItersExceeded");
  } catch (const uoi::MaxItersExceeded& e) {
    CHECK(e.kind() == uoi::ErrorKind::kMaxItersExceeded);
    CHECK(e.trace().iterates.size() == 4);
    CHECK(e.trace().stop_reason == uoi::StopReason::kMaxIters);
  }
}
