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

#ifndef UOI_MARKOV_HPP_
#define UOI_MARKOV_HPP_

#include <Eigen/Dense>

namespace uoi {

// Distribution of a source's current state given the last received
// observation. Entries are nonnegative and sum to one.
struct BeliefState {
  Eigen::VectorXd probs;

  // Validates the simplex constraints (sum within 1e-12, entries >= 0).
  static BeliefState checked(Eigen::VectorXd probs);

  Eigen::Index size() const { return probs.size(); }
};

// A validated irreducible, aperiodic finite Markov chain.
//
// The transition matrix is column-stochastic: entry (j, k) is the probability
// of moving to state j given that the current state is k. Column k is then the
// belief right after observing state k, and one-step belief propagation is a
// matrix-vector product. State indices are zero-based throughout the library.
class ChainSpec {
 public:
  int n_states() const { return static_cast<int>(transition_.rows()); }
  const Eigen::MatrixXd& transition() const { return transition_; }
  const Eigen::VectorXd& equilibrium() const { return equilibrium_; }

 private:
  ChainSpec(Eigen::MatrixXd transition, Eigen::VectorXd equilibrium)
      : transition_(std::move(transition)),
        equilibrium_(std::move(equilibrium)) {}

  friend ChainSpec validate_chain(const Eigen::MatrixXd& raw_matrix);

  Eigen::MatrixXd transition_;
  Eigen::VectorXd equilibrium_;
};

// Column sums may deviate from one by at most this much; such columns are
// renormalized. Larger deviations are rejected.
inline constexpr double kColumnSumSlack = 1e-9;

// Accepts a square column-stochastic matrix with N >= 2 and computes the
// equilibrium distribution. Throws Error(kNotStochastic | kReducible |
// kPeriodic | kInvalidArgument).
ChainSpec validate_chain(const Eigen::MatrixXd& raw_matrix);

// Shannon entropy in bits with 0 log 0 = 0.
double entropy(const Eigen::VectorXd& probs);
inline double entropy(const BeliefState& x) { return entropy(x.probs); }

// Passive belief update T x.
BeliefState belief_propagate(const ChainSpec& chain, const BeliefState& x);

// Belief after a successful observation of `observed_state`: column T_k.
BeliefState belief_reset(const ChainSpec& chain, int observed_state);

// T^n e_k for n >= 1, by repeated propagation from belief_reset(k).
BeliefState n_step_column(const ChainSpec& chain, int k, int n);

// Uncertainty of information carried into the next slot: H(T x).
double uoi(const ChainSpec& chain, const BeliefState& x);

// Max-norm and L1 distances, used by the truncation diagnostics.
double max_norm_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
double l1_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace uoi

#endif  // UOI_MARKOV_HPP_
