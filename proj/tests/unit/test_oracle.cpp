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
#include "uoi/oracle.hpp"

namespace {

using uoi::Criterion;

uoi::RMABInstance pair_instance(std::uint64_t seed, int l, Criterion c,
                                double beta) {
  std::mt19937_64 gen(seed);
  std::vector<uoi::TruncatedBeliefMDP> models;
  for (int i = 0; i < 2; ++i) {
    models.push_back(uoi::build_truncated(
        oracle::random_bandit(gen, 2 + (seed + i) % 2, i ? 0.8 : 1.0), l,
        c == Criterion::kDiscounted ? beta : 1.0));
  }
  return uoi::RMABInstance::make(models, 1, c, beta, {}, seed);
}

// Dense joint transition matrix of a two-bandit, one-channel model where
// `active_first` says which bandit gets the channel.
oracle::Matrix joint_matrix(const uoi::RMABInstance& inst, bool active_first) {
  const auto& a = inst.bandits[0].mdp();
  const auto& b = inst.bandits[1].mdp();
  const auto pa = oracle::policy_matrix(
      a, active_first ? uoi::all_active(a.n_states())
                      : uoi::all_passive(a.n_states()));
  const auto pb = oracle::policy_matrix(
      b, active_first ? uoi::all_passive(b.n_states())
                      : uoi::all_active(b.n_states()));
  const int na = a.n_states(), nb = b.n_states();
  oracle::Matrix p(na * nb, std::vector<double>(na * nb, 0.0));
  for (int s0 = 0; s0 < na; ++s0) {
    for (int s1 = 0; s1 < nb; ++s1) {
      for (int t0 = 0; t0 < na; ++t0) {
        for (int t1 = 0; t1 < nb; ++t1) {
          p[s0 + na * s1][t0 + na * t1] = pa[s0][t0] * pb[s1][t1];
        }
      }
    }
  }
  return p;
}

std::vector<double> joint_cost(const uoi::RMABInstance& inst) {
  const auto& a = inst.bandits[0].mdp();
  const auto& b = inst.bandits[1].mdp();
  std::vector<double> c;
  for (int s1 = 0; s1 < b.n_states(); ++s1) {
    for (int s0 = 0; s0 < a.n_states(); ++s0) {
      c.push_back(a.cost[s0] + b.cost[s1]);
    }
  }
  return c;
}

double dot(const std::vector<double>& row, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += row[i] * v[i];
  return s;
}

}  // namespace

TEST_CASE("joint model layout") {
  std::mt19937_64 gen(1);
  std::vector<uoi::TruncatedBeliefMDP> models;
  for (int i = 0; i < 3; ++i) {
    models.push_back(
        uoi::build_truncated(oracle::random_bandit(gen, 2, 0.7), 2 + i, 0.9));
  }
  const auto inst =
      uoi::RMABInstance::make(models, 2, Criterion::kDiscounted, 0.9);
  const auto joint = uoi::JointMDP::make(inst);
  CHECK(joint.n_states() == 5 * 7 * 9);
  REQUIRE(joint.n_actions() == 3);
  CHECK(joint.actions()[0] == std::vector<int>{0, 1});
  CHECK(joint.actions()[1] == std::vector<int>{0, 2});
  CHECK(joint.actions()[2] == std::vector<int>{1, 2});
  const std::vector<int> st = {3, 6, 2};
  CHECK(joint.decode(joint.encode(st)) == st);
  for (std::int64_t s = 0; s < joint.n_states(); s += 7) {
    for (int a = 0; a < joint.n_actions(); ++a) {
      double total = 0.0;
      joint.for_each_successor(s, a, [&](std::int64_t t, double p) {
        CHECK(t < joint.n_states());
        total += p;
      });
      CHECK(std::abs(total - 1.0) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(uoi::JointMDP::make(inst, 100), uoi::Error);
  try {
    uoi::joint_solve_discounted(inst, 1e-6, 100);
  } catch (const uoi::Error& e) {
    CHECK(e.kind() == uoi::ErrorKind::kStateSpaceTooLarge);
  }
}

TEST_CASE("discounted oracle matches dense value iteration") {
  const auto inst = pair_instance(2, 3, Criterion::kDiscounted, 0.85);
  const auto sol = uoi::joint_solve_discounted(inst, 1e-10);
  const auto p0 = joint_matrix(inst, true);
  const auto p1 = joint_matrix(inst, false);
  const auto c = joint_cost(inst);
  std::vector<double> v(c.size(), 0.0);
  for (int it = 0; it < 400; ++it) {
    std::vector<double> next(v.size());
    for (std::size_t s = 0; s < v.size(); ++s) {
      next[s] = c[s] + 0.85 * std::min(dot(p0[s], v), dot(p1[s], v));
    }
    v.swap(next);
  }
  for (std::size_t s = 0; s < v.size(); ++s) {
    CHECK(std::abs(sol.values[s] - v[s]) <= 1e-9);
  }
  CHECK(sol.value == sol.values[sol.initial_state]);
}

TEST_CASE("average oracle matches dense relative value iteration") {
  const auto inst = pair_instance(3, 3, Criterion::kAverage, 0.0);
  const auto sol = uoi::joint_solve_average(inst, 1e-11);
  const auto p0 = joint_matrix(inst, true);
  const auto p1 = joint_matrix(inst, false);
  const auto c = joint_cost(inst);
  // Lazy chain so that relative values converge for periodic policies too.
  std::vector<double> h(c.size(), 0.0);
  double g = 0.0;
  for (int it = 0; it < 20000; ++it) {
    std::vector<double> next(h.size());
    for (std::size_t s = 0; s < h.size(); ++s) {
      next[s] = c[s] +
                0.5 * (h[s] + std::min(dot(p0[s], h), dot(p1[s], h)));
    }
    g = next[0] - h[0];
    const double pin = next[0];
    for (double& x : next) x -= pin;
    h.swap(next);
  }
  CHECK(sol.value == doctest::Approx(g).epsilon(1e-8));
}

TEST_CASE("identical bandits give a symmetric value") {
  std::mt19937_64 gen(4);
  const auto b = uoi::build_truncated(oracle::random_bandit(gen, 3, 0.9), 4,
                                      0.9);
  const auto inst =
      uoi::RMABInstance::make({b, b}, 1, Criterion::kDiscounted, 0.9);
  const auto sol = uoi::joint_solve_discounted(inst, 1e-9);
  const auto joint = uoi::JointMDP::make(inst);
  for (int i = 0; i < b.n_states(); ++i) {
    for (int j = 0; j < b.n_states(); ++j) {
      CHECK(sol.values[joint.encode({i, j})] ==
            doctest::Approx(sol.values[joint.encode({j, i})]).epsilon(1e-9));
    }
  }
}

TEST_CASE("oracle is sandwiched by the relaxation and feasible policies") {
  for (std::uint64_t seed = 5; seed < 8; ++seed) {
    for (auto c : {Criterion::kDiscounted, Criterion::kAverage}) {
      const double beta = c == Criterion::kDiscounted ? 0.9 : 0.0;
      const auto inst = pair_instance(seed, 8, c, beta);
      const auto sol = c == Criterion::kDiscounted
                           ? uoi::joint_solve_discounted(inst, 1e-9)
                           : uoi::joint_solve_average(inst, 1e-10);
      std::vector<uoi::LagrangeBandit> lb;
      for (const auto& b : inst.bandits) lb.push_back({b});
      const auto problem = uoi::LagrangeProblem::make(lb, 1, c);
      const double lambda = uoi::gradient_search(problem).lambda_star;
      CHECK(sol.value >= uoi::evaluate_dual(problem, lambda).objective - 1e-8);

      uoi::SimOptions opt;
      opt.horizon = c == Criterion::kDiscounted ? 0 : 20000;
      opt.runs = c == Criterion::kDiscounted ? 4000 : 20;
      for (auto kind : {uoi::PolicyKind::kMyopic, uoi::PolicyKind::kRoundRobin}) {
        const auto r = uoi::simulate(inst, {kind, {}}, opt);
        CHECK(sol.value <= r.mean + 3.0 * r.stderr_mean);
      }
    }
  }
}

TEST_CASE("oracle rejects mismatched criteria") {
  const auto inst = pair_instance(9, 3, Criterion::kAverage, 0.0);
  CHECK_THROWS_AS(uoi::joint_solve_discounted(inst), uoi::Error);
  const auto d = pair_instance(9, 3, Criterion::kDiscounted, 0.9);
  CHECK_THROWS_AS(uoi::joint_solve_average(d), uoi::Error);
}
