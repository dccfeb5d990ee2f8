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

#ifndef UOI_SOLVERS_HPP_
#define UOI_SOLVERS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "uoi/belief_mdp.hpp"

namespace uoi {

enum class Criterion { kDiscounted, kAverage };

// One action per state; 1 = active.
using Policy = std::vector<std::uint8_t>;

Policy all_active(int n_states);
Policy all_passive(int n_states);

// Absolute tolerance used when comparing the active and passive continuation
// values. States where they agree within it take the active action.
inline constexpr double kTieTolerance = 1e-9;

struct PolicyAndValues {
  Policy actions;
  // Discounted value V, or differential value Z for the average criterion.
  std::vector<double> values;
  // Average cost g; zero for the discounted criterion.
  double gain = 0.0;
  double lambda = 0.0;
  Criterion criterion = Criterion::kDiscounted;
  // Sweeps (value iteration) or improvement passes (policy iteration).
  int iterations = 0;
  // Set when the average-cost solution came from the vanishing-discount
  // approximation instead of exact policy evaluation.
  bool degraded = false;

  int active_count() const;
};

struct ActivePassive {
  double active;
  double passive;
  bool prefers_active() const { return active <= passive + kTieTolerance; }
};

// Continuation values of both actions at `state`.
// Discounted: a = lambda + beta E_active[V], r = beta E_passive[V].
// Average: the same without beta.
ActivePassive active_passive_values(const FiniteMdp& mdp,
                                    std::span<const double> values, int state,
                                    double lambda, Criterion criterion);

// Greedy policy with the active tie-break.
Policy greedy_policy(const FiniteMdp& mdp, std::span<const double> values,
                     double lambda, Criterion criterion);

// Per-state cost H(X) + lambda u under `policy`.
std::vector<double> policy_cost(const FiniteMdp& mdp, const Policy& policy,
                                double lambda);

// Indicator of the active action, the cost of the auxiliary MDP.
std::vector<double> activation_cost(const Policy& policy);

PolicyAndValues value_iteration_discounted(const FiniteMdp& mdp, double lambda,
                                           double tol);

PolicyAndValues policy_iteration_discounted(
    const FiniteMdp& mdp, double lambda,
    const std::optional<Policy>& init = std::nullopt);

// Solves (I - beta P_pi) v = cost.
std::vector<double> policy_evaluation_discounted(
    const FiniteMdp& mdp, const Policy& policy, std::span<const double> cost);

struct AverageEvaluation {
  double gain = 0.0;
  std::vector<double> values;
};

// True when the chain induced by `policy` has a single closed class.
bool is_unichain(const FiniteMdp& mdp, const Policy& policy);

// Solves Z + g = cost + P_pi Z with Z(anchor) = 0. Throws
// Error(kMultichainPolicy) when the induced chain has several closed classes.
AverageEvaluation average_policy_evaluation(const FiniteMdp& mdp,
                                            const Policy& policy,
                                            std::span<const double> cost);

// Relative value iteration on the aperiodicity-transformed model until the
// span of successive differences is below `tol`, then exact polishing by
// average-cost policy iteration.
PolicyAndValues solve_average(const FiniteMdp& mdp, double lambda, double tol);

// Average-cost policy iteration. Falls back to the vanishing-discount
// approximation (flagged `degraded`) if an improvement step produces a
// multichain policy.
PolicyAndValues policy_iteration_average(
    const FiniteMdp& mdp, double lambda,
    const std::optional<Policy>& init = std::nullopt);

// Discount factors used by the vanishing-discount fallback.
inline constexpr double kVanishingDiscountCoarse = 0.999;
inline constexpr double kVanishingDiscountFine = 0.9999;

}  // namespace uoi

#endif  // UOI_SOLVERS_HPP_
