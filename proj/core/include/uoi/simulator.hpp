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

#ifndef UOI_SIMULATOR_HPP_
#define UOI_SIMULATOR_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uoi/belief_mdp.hpp"
#include "uoi/index_policy.hpp"
#include "uoi/solvers.hpp"

namespace uoi {

struct RMABInstance {
  std::vector<TruncatedBeliefMDP> bandits;
  int m = 1;
  Criterion criterion = Criterion::kDiscounted;
  // Discount factor; ignored for the average criterion.
  double beta = 0.0;
  // Truncated state index of every bandit at t = 1.
  std::vector<int> initial_states;
  std::uint64_t seed = 0;

  int n_bandits() const { return static_cast<int>(bandits.size()); }
  // Largest log2 N over the bandits.
  double entropy_bound() const;

  // Checks 1 <= m < M and initial states in range. Missing initial states
  // default to the equilibrium belief.
  static RMABInstance make(std::vector<TruncatedBeliefMDP> bandits, int m,
                           Criterion criterion, double beta,
                           std::vector<int> initial_states = {},
                           std::uint64_t seed = 0);
};

enum class PolicyKind {
  kGainIndex,
  kMyopic,
  kRoundRobin,
  kOrRounded,
  // Activates every bandit the relaxed policy would, so the number of active
  // bandits varies. Diagnostic only.
  kOrRelaxed,
};

std::string to_string(PolicyKind kind);
// Throws Error(kInvalidArgument) on unknown names.
PolicyKind policy_kind_from_string(const std::string& name);
bool needs_tables(PolicyKind kind);

struct PolicySpec {
  PolicyKind kind = PolicyKind::kRoundRobin;
  // One table per bandit, in instance order; required by the index policies.
  std::vector<GainIndexTable> tables;
};

class SchedulingPolicy {
 public:
  virtual ~SchedulingPolicy() = default;
  // Writes the positions of the bandits to activate, given their current
  // truncated states.
  virtual void select(std::span<const int> states,
                      std::vector<int>& selected) = 0;
  // False for policies whose activation count may differ from m.
  virtual bool fixed_activation_count() const { return true; }
};

std::unique_ptr<SchedulingPolicy> make_policy(const PolicySpec& spec,
                                              const RMABInstance& instance);

inline constexpr double kDefaultBurnInFraction = 0.1;

struct SimOptions {
  // Slots per run. Zero selects discounted_horizon for the discounted
  // criterion.
  int horizon = 100000;
  int runs = 50;
  double burn_in_fraction = kDefaultBurnInFraction;
  // Keep the per-slot activation count of run 0.
  bool record_activation_trace = false;
  // Worker threads; 0 uses the hardware concurrency.
  int threads = 0;
};

struct SimResult {
  std::string policy;
  Criterion criterion = Criterion::kDiscounted;
  int n_bandits = 0;
  int m = 0;
  int runs = 0;
  int horizon = 0;
  int burn_in = 0;
  std::uint64_t seed = 0;
  double beta = 0.0;

  // Filled for the discounted criterion only.
  std::vector<double> per_run_discounted;
  std::vector<double> per_run_average;
  // Mean and standard error of the criterion's estimate across runs.
  double mean = 0.0;
  double stderr_mean = 0.0;

  // Averaged over all slots and runs.
  std::vector<double> activation_frequency;
  std::vector<double> mean_cost;

  std::vector<int> activation_trace;
  // Slots where the relaxed policy activates exactly m bandits, and how many
  // of them the simulated policy selected the same set.
  std::int64_t or_exact_slots = 0;
  std::int64_t or_exact_matches = 0;
};

// Throws Error(kInfeasiblePolicy) if a fixed-count policy selects a number of
// bandits other than m or repeats a bandit.
SimResult simulate(const RMABInstance& instance, const PolicySpec& policy,
                   const SimOptions& options);

// sum_t beta^(t-1) cost_t.
double evaluate_discounted(std::span<const double> costs, double beta);
// Mean of costs after the first `burn_in` slots.
double evaluate_average(std::span<const double> costs, int burn_in);

// Smallest T with beta^T cost_bound / (1 - beta) < tail.
int discounted_horizon(double beta, double cost_bound, double tail = 1e-6);

struct SweepClass {
  TruncatedBeliefMDP mdp;
  double proportion = 0.0;
};

struct AsymptoticPoint {
  int n_bandits = 0;
  int m = 0;
  double policy_per_bandit = 0.0;
  double policy_stderr = 0.0;
  double bound_per_bandit = 0.0;
  double gap = 0.0;
};

struct AsymptoticSweep {
  std::vector<double> proportions;
  double alpha = 0.0;
  Criterion criterion = Criterion::kDiscounted;
  double beta = 0.0;
  double lambda_star = 0.0;
  std::vector<AsymptoticPoint> points;
};

// Replicates the classes for every M in `m_list`, runs the gain index policy
// from the equilibrium beliefs and reports the per-bandit gap to the relaxed
// bound. The multiplier is computed once, on the smallest M. Throws
// Error(kInvalidArgument) when M alpha or M q_k is not an integer.
AsymptoticSweep asymptotic_sweep(const std::vector<SweepClass>& classes,
                                 double alpha, std::vector<int> m_list,
                                 Criterion criterion, const SimOptions& options,
                                 std::uint64_t seed);

}  // namespace uoi

#endif  // UOI_SIMULATOR_HPP_
