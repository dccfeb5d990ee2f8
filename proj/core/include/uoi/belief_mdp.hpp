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

#ifndef UOI_BELIEF_MDP_HPP_
#define UOI_BELIEF_MDP_HPP_

#include <string>
#include <utility>
#include <vector>

#include "uoi/markov.hpp"

namespace uoi {

struct Transition {
  int target;
  double prob;
};

using SuccessorList = std::vector<Transition>;

// A finite two-action MDP with per-state cost. Taking the active action costs
// an extra service charge lambda, supplied by the solvers. Belief MDPs are one
// instance; general bounded-cost bandits (age processes and the like) are
// another.
struct FiniteMdp {
  std::vector<double> cost;
  std::vector<SuccessorList> passive;
  std::vector<SuccessorList> active;
  // Discount factor in [0, 1). Average-cost solvers ignore it.
  double discount = 0.0;
  // State whose differential value is pinned to zero under the average
  // criterion.
  int anchor = 0;

  int n_states() const { return static_cast<int>(cost.size()); }

  // Throws Error(kInvalidArgument) on malformed rows (bad targets,
  // probabilities not summing to one within 1e-12).
  void check() const;
};

struct BanditSpec {
  ChainSpec chain;
  double success_prob;
  std::string label;

  // Validates 0 < rho <= 1.
  static BanditSpec make(ChainSpec chain, double success_prob,
                         std::string label);
};

// The L-truncated belief MDP of one bandit.
//
// State 0 is the equilibrium belief; state 1 + k * L + (n - 1) is T_k^n for a
// zero-based observed state k and age n in [1, L]. Beliefs older than L are
// aggregated into the equilibrium state. Entry k = 0, n = 1 (index 1) is the
// differential-value anchor.
class TruncatedBeliefMDP {
 public:
  static constexpr int kEquilibriumIndex = 0;

  const BanditSpec& bandit() const { return bandit_; }
  int truncation_L() const { return truncation_l_; }
  int n_states() const { return mdp_.n_states(); }
  double discount() const { return mdp_.discount; }

  const std::vector<BeliefState>& states() const { return states_; }
  const std::vector<double>& costs_passive() const { return mdp_.cost; }
  const std::vector<SuccessorList>& active_transitions() const {
    return mdp_.active;
  }
  const std::vector<SuccessorList>& passive_transitions() const {
    return mdp_.passive;
  }
  const FiniteMdp& mdp() const { return mdp_; }

  int state_index(int k, int n) const;
  int reset_index(int k) const { return state_index(k, 1); }
  // Index of T X under the truncated passive rule.
  int passive_successor(int state) const;
  // Zero-based observed state and age of `state`; (-1, 0) for equilibrium.
  std::pair<int, int> label_of(int state) const;

  // Same model with a different discount factor.
  TruncatedBeliefMDP with_discount(double discount) const;

 private:
  friend TruncatedBeliefMDP build_truncated(const BanditSpec&, int, double);

  TruncatedBeliefMDP(BanditSpec bandit, int truncation_l)
      : bandit_(std::move(bandit)), truncation_l_(truncation_l) {}

  BanditSpec bandit_;
  int truncation_l_;
  std::vector<BeliefState> states_;
  FiniteMdp mdp_;
};

// Builds the N * L + 1 state truncated MDP. `discount` is the beta used by
// discounted solvers; pass 1 for average-cost use.
TruncatedBeliefMDP build_truncated(const BanditSpec& bandit, int truncation_l,
                                   double discount);

struct TruncationDiagnostics {
  int truncation_l = 0;
  // max_k ||T_k^L - omega||_inf
  double eta_l = 0.0;
  // Upper bound on max_{k, j >= 0} |H(T_k^{L + j}) - H(omega)|.
  double sigma_l = 0.0;
  // Largest probed gap (j = 0 .. probe_depth) and the continuity tail bound
  // covering every j beyond the probe.
  double sigma_probe = 0.0;
  double sigma_tail = 0.0;
  int probe_depth = 0;
  // Entropy bound log2 N.
  double b_h = 0.0;
};

TruncationDiagnostics truncation_diagnostics(const ChainSpec& chain,
                                             int truncation_l);

inline constexpr int kDefaultMaxTruncation = 10000;

// Smallest L <= l_max with eta_L <= eta_target; diagnostics probe 4L beyond L.
// Throws Error(kTruncationTooDeep).
std::pair<int, TruncationDiagnostics> choose_truncation(
    const BanditSpec& bandit, double eta_target,
    int l_max = kDefaultMaxTruncation);

// beta sigma/(1 - beta) + beta rho eta N (B_H + lambda) / (1 - beta)^2
double discounted_error_bound(const TruncationDiagnostics& diag, double lambda,
                              double beta, int n_states, double rho);

double average_error_bound(const TruncationDiagnostics& diag);

// Truncated state closest to `belief` in max norm (lowest index on ties).
int nearest_state(const TruncatedBeliefMDP& mdp,
                  const Eigen::VectorXd& belief);

}  // namespace uoi

#endif  // UOI_BELIEF_MDP_HPP_
