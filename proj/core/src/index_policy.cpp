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

#include "uoi/index_policy.hpp"

#include "uoi/error.hpp"

namespace uoi {
namespace {

GainIndexTable make_table(const TruncatedBeliefMDP& mdp, Criterion criterion,
                          double lambda, std::vector<double> values) {
  GainIndexTable table;
  table.bandit_label = mdp.bandit().label;
  table.criterion = criterion;
  table.lambda_star = lambda;
  table.discount = criterion == Criterion::kDiscounted ? mdp.discount() : 1.0;
  table.truncation_l = mdp.truncation_L();

  const ChainSpec& chain = mdp.bandit().chain;
  const double rho = mdp.bandit().success_prob;
  table.indices.resize(mdp.n_states());
  for (int s = 0; s < mdp.n_states(); ++s) {
    const Eigen::VectorXd& x = mdp.states()[s].probs;
    double reset_value = 0.0;
    for (int k = 0; k < chain.n_states(); ++k) {
      reset_value += x(k) * values[mdp.reset_index(k)];
    }
    table.indices[s] = rho * (values[mdp.passive_successor(s)] - reset_value);
  }
  table.values = std::move(values);
  return table;
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "multiplier must be nonnegative");
  }
}

}  // namespace

GainIndexTable gain_indices_discounted(const TruncatedBeliefMDP& mdp,
                                       double lambda_star,
                                       const std::optional<Policy>& warm) {
  check_lambda(lambda_star);
  const PolicyAndValues solved =
      policy_iteration_discounted(mdp.mdp(), lambda_star, warm);
  // Policy iteration returns exactly (I - beta P)^-1 (H + lambda C).
  return make_table(mdp, Criterion::kDiscounted, lambda_star, solved.values);
}

GainIndexTable gain_indices_average(const TruncatedBeliefMDP& mdp,
                                    double lambda_a,
                                    const std::optional<Policy>& warm) {
  check_lambda(lambda_a);
  const PolicyAndValues solved =
      policy_iteration_average(mdp.mdp(), lambda_a, warm);
  return make_table(mdp, Criterion::kAverage, lambda_a, solved.values);
}

double gain_index_general(const std::vector<SuccessorList>& transitions_active,
                          const std::vector<SuccessorList>& transitions_passive,
                          std::span<const double> values, int state) {
  if (state < 0 || state >= static_cast<int>(transitions_active.size()) ||
      state >= static_cast<int>(transitions_passive.size())) {
    throw Error(ErrorKind::kIndexOutOfRange, "state " + std::to_string(state));
  }
  double passive = 0.0;
  for (const Transition& tr : transitions_passive[state]) {
    passive += tr.prob * values[tr.target];
  }
  double active = 0.0;
  for (const Transition& tr : transitions_active[state]) {
    active += tr.prob * values[tr.target];
  }
  return passive - active;
}

bool or_decision(const FiniteMdp& mdp, std::span<const double> values,
                 int state, double lambda_star, Criterion criterion) {
  return active_passive_values(mdp, values, state, lambda_star, criterion)
      .prefers_active();
}

}  // namespace uoi
