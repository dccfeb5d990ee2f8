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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "uoi/belief_mdp.hpp"
#include "uoi/index_policy.hpp"
#include "uoi/lagrange.hpp"
#include "uoi/simulator.hpp"
#include "uoi/solvers.hpp"

namespace {

uoi::BanditSpec bandit(std::mt19937_64& gen, int n, double rho) {
  std::uniform_real_distribution<double> u(0.02, 1.0);
  Eigen::MatrixXd r(n, n);
  for (int c = 0; c < n; ++c) {
    for (int k = 0; k < n; ++k) r(k, c) = u(gen);
    r.col(c) /= r.col(c).sum();
  }
  const Eigen::MatrixXd t = 0.8 * Eigen::MatrixXd::Identity(n, n) + 0.2 * r;
  return uoi::BanditSpec::make(uoi::validate_chain(t), rho, "b");
}

std::vector<uoi::TruncatedBeliefMDP> models(int count, int n, int l,
                                            double discount) {
  std::mt19937_64 gen(17);
  std::vector<uoi::TruncatedBeliefMDP> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(uoi::build_truncated(bandit(gen, n, 0.8), l, discount));
  }
  return out;
}

void BM_PolicyIterationDiscounted(benchmark::State& state) {
  const auto mdp = models(1, static_cast<int>(state.range(0)),
                          static_cast<int>(state.range(1)), 0.95)[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(uoi::policy_iteration_discounted(mdp.mdp(), 0.5));
  }
  state.counters["states"] = mdp.n_states();
}
BENCHMARK(BM_PolicyIterationDiscounted)
    ->Args({2, 50})
    ->Args({4, 100})
    ->Args({8, 200});

void BM_PolicyIterationAverage(benchmark::State& state) {
  const auto mdp = models(1, static_cast<int>(state.range(0)),
                          static_cast<int>(state.range(1)), 1.0)[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(uoi::policy_iteration_average(mdp.mdp(), 0.5));
  }
  state.counters["states"] = mdp.n_states();
}
BENCHMARK(BM_PolicyIterationAverage)->Args({2, 50})->Args({4, 100});

void BM_GradientSearch(benchmark::State& state) {
  std::vector<uoi::LagrangeBandit> lb;
  for (const auto& m : models(static_cast<int>(state.range(0)), 3, 40, 0.9)) {
    lb.push_back({m});
  }
  const auto problem = uoi::LagrangeProblem::make(
      lb, static_cast<int>(state.range(0)) / 2, uoi::Criterion::kDiscounted);
  for (auto _ : state) {
    benchmark::DoNotOptimize(uoi::gradient_search(problem));
  }
}
BENCHMARK(BM_GradientSearch)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_SimulateGainIndex(benchmark::State& state) {
  const int count = static_cast<int>(state.range(0));
  const auto ms = models(count, 3, 40, 1.0);
  std::vector<uoi::GainIndexTable> tables;
  for (const auto& m : ms) tables.push_back(uoi::gain_indices_average(m, 0.4));
  const auto instance = uoi::RMABInstance::make(
      ms, count / 2, uoi::Criterion::kAverage, 0.0, {}, 3);
  uoi::SimOptions options;
  options.runs = 1;
  options.horizon = 10000;
  options.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(uoi::simulate(
        instance, {uoi::PolicyKind::kGainIndex, tables}, options));
  }
  state.SetItemsProcessed(state.iterations() * options.horizon);
}
BENCHMARK(BM_SimulateGainIndex)->Arg(4)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
