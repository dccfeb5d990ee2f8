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

#ifndef UOI_ORACLE_HPP_
#define UOI_ORACLE_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "uoi/belief_mdp.hpp"
#include "uoi/simulator.hpp"

namespace uoi {

// Default limit on joint state-action pairs.
inline constexpr std::int64_t kDefaultOracleCap = 2'000'000;

// Product of the truncated bandit models. Joint states are mixed-radix tuples
// with bandit 0 as the least significant digit; joint actions are the
// m-subsets of the bandits in lexicographic order. Transitions are generated
// on the fly.
class JointMDP {
 public:
  // Throws Error(kStateSpaceTooLarge) when states x actions exceeds `cap`.
  static JointMDP make(const RMABInstance& instance,
                       std::int64_t cap = kDefaultOracleCap);

  int n_bandits() const { return static_cast<int>(components_.size()); }
  std::int64_t n_states() const { return n_states_; }
  int n_actions() const { return static_cast<int>(actions_.size()); }
  const std::vector<std::vector<int>>& actions() const { return actions_; }
  const std::vector<int>& radices() const { return radices_; }

  std::int64_t encode(const std::vector<int>& states) const;
  std::vector<int> decode(std::int64_t joint) const;
  // Sum of the bandit entropies.
  double cost(std::int64_t joint) const;
  // Calls visit(successor, probability) for every joint successor.
  void for_each_successor(
      std::int64_t joint, int action,
      const std::function<void(std::int64_t, double)>& visit) const;
  // Expected value of `values` after one step.
  double expectation(std::int64_t joint, int action,
                     const std::vector<double>& values) const;

 private:
  JointMDP() = default;

  std::vector<FiniteMdp> components_;
  std::vector<int> radices_;
  std::vector<std::int64_t> strides_;
  std::vector<std::vector<int>> actions_;
  std::int64_t n_states_ = 0;
};

struct OracleSolution {
  // Optimal discounted value at the initial joint state, or optimal gain.
  double value = 0.0;
  // Discounted values or relative values (pinned at joint state 0).
  std::vector<double> values;
  // Optimal action index per joint state; lowest index among ties.
  std::vector<int> policy;
  std::int64_t initial_state = 0;
  int iterations = 0;
};

// Value iteration until the value is within `tol` of the optimum.
OracleSolution joint_solve_discounted(const RMABInstance& instance,
                                      double tol = 1e-8,
                                      std::int64_t cap = kDefaultOracleCap,
                                      int threads = 0);

// Relative value iteration on the aperiodicity-transformed model, stopped when
// the span of successive differences drops below `tol`.
OracleSolution joint_solve_average(const RMABInstance& instance,
                                   double tol = 1e-9,
                                   std::int64_t cap = kDefaultOracleCap,
                                   int threads = 0);

}  // namespace uoi

#endif  // UOI_ORACLE_HPP_
