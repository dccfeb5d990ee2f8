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

#ifndef UOI_INDEX_POLICY_HPP_
#define UOI_INDEX_POLICY_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uoi/belief_mdp.hpp"
#include "uoi/solvers.hpp"

namespace uoi {

// Gain index of every truncated state of one bandit, computed at the optimal
// multiplier of the relaxed problem.
struct GainIndexTable {
  std::string bandit_label;
  Criterion criterion = Criterion::kDiscounted;
  double lambda_star = 0.0;
  // beta for the discounted criterion, 1 for the average one.
  double discount = 1.0;
  int truncation_l = 0;
  std::vector<double> indices;
  // V (discounted) or Z (average) at lambda_star.
  std::vector<double> values;

  int n_states() const { return static_cast<int>(indices.size()); }
  double index(int state) const { return indices.at(state); }
  // Gain of activating over idling, r - a = discount * W - lambda_star.
  double activation_gain(int state) const {
    return discount * indices.at(state) - lambda_star;
  }
};

// W(X) = rho [V(T X) - sum_k x_k V(T_k)] with V the optimal value at
// lambda_star, obtained by evaluating the optimal policy on H + lambda_star u.
GainIndexTable gain_indices_discounted(
    const TruncatedBeliefMDP& mdp, double lambda_star,
    const std::optional<Policy>& warm = std::nullopt);

// Same with the differential value function Z at lambda_a.
GainIndexTable gain_indices_average(
    const TruncatedBeliefMDP& mdp, double lambda_a,
    const std::optional<Policy>& warm = std::nullopt);

// Index for a general bounded-cost bandit: expected next value when idle minus
// expected next value when active.
double gain_index_general(const std::vector<SuccessorList>& transitions_active,
                          const std::vector<SuccessorList>& transitions_passive,
                          std::span<const double> values, int state);

// Optimal relaxed policy decision: activate iff a(X) <= r(X) at lambda_star.
bool or_decision(const FiniteMdp& mdp, std::span<const double> values,
                 int state, double lambda_star, Criterion criterion);

}  // namespace uoi

#endif  // UOI_INDEX_POLICY_HPP_
