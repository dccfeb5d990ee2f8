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

#include "uoi/markov.hpp"

#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "uoi/error.hpp"

namespace uoi {
namespace {

// Breadth-first levels from state 0 following k -> j whenever T(j, k) > 0.
// `reverse` walks the edges backwards.
std::vector<int> bfs_levels(const Eigen::MatrixXd& t, bool reverse) {
  const int n = static_cast<int>(t.rows());
  std::vector<int> level(n, -1);
  std::queue<int> frontier;
  level[0] = 0;
  frontier.push(0);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v = 0; v < n; ++v) {
      const double w = reverse ? t(u, v) : t(v, u);
      if (w > 0.0 && level[v] < 0) {
        level[v] = level[u] + 1;
        frontier.push(v);
      }
    }
  }
  return level;
}

Eigen::VectorXd solve_equilibrium(const Eigen::MatrixXd& t) {
  const Eigen::Index n = t.rows();
  Eigen::MatrixXd a = t - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::VectorXd omega = a.fullPivLu().solve(rhs);
  for (Eigen::Index i = 0; i < n; ++i) omega(i) = std::max(omega(i), 0.0);
  return omega / omega.sum();
}

}  // namespace

BeliefState BeliefState::checked(Eigen::VectorXd probs) {
  if (probs.size() == 0) {
    throw Error(ErrorKind::kInvalidArgument, "empty belief state");
  }
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (!(probs(i) >= 0.0)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "belief entry " + std::to_string(i) + " is negative");
    }
  }
  if (std::abs(probs.sum() - 1.0) > 1e-12) {
    throw Error(ErrorKind::kInvalidArgument, "belief does not sum to 1");
  }
  return BeliefState{std::move(probs)};
}

ChainSpec validate_chain(const Eigen::MatrixXd& raw_matrix) {
  const Eigen::Index n = raw_matrix.rows();
  if (n != raw_matrix.cols()) {
    throw Error(ErrorKind::kInvalidArgument, "transition matrix is not square");
  }
  if (n < 2) {
    throw Error(ErrorKind::kInvalidArgument, "chain needs at least 2 states");
  }
  Eigen::MatrixXd t = raw_matrix;
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(t(j, k) >= 0.0 && t(j, k) <= 1.0)) {
        std::ostringstream msg;
        msg << "entry (" << j << ", " << k << ") = " << t(j, k)
            << " is outside [0, 1]";
        throw Error(ErrorKind::kNotStochastic, msg.str());
      }
    }
    const double sum = t.col(k).sum();
    if (std::abs(sum - 1.0) > kColumnSumSlack) {
      std::ostringstream msg;
      msg << "column " << k << " sums to " << sum;
      throw Error(ErrorKind::kNotStochastic, msg.str());
    }
    t.col(k) /= sum;
  }

  const std::vector<int> forward = bfs_levels(t, false);
  const std::vector<int> backward = bfs_levels(t, true);
  for (Eigen::Index s = 0; s < n; ++s) {
    if (forward[s] < 0 || backward[s] < 0) {
      throw Error(ErrorKind::kReducible,
                  "state " + std::to_string(s) +
                      " does not communicate with state 0");
    }
  }

  // For an irreducible chain the period is the gcd of level(u) + 1 - level(v)
  // over all edges u -> v.
  int period = 0;
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = 0; v < n; ++v) {
      if (t(v, u) > 0.0) {
        period = std::gcd(period, std::abs(forward[u] + 1 - forward[v]));
      }
    }
  }
  if (period != 1) {
    throw Error(ErrorKind::kPeriodic,
                "chain has period " + std::to_string(period));
  }

  Eigen::VectorXd omega = solve_equilibrium(t);
  return ChainSpec(std::move(t), std::move(omega));
}

double entropy(const Eigen::VectorXd& probs) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const double p = probs(i);
    if (p > 0.0) h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

BeliefState belief_propagate(const ChainSpec& chain, const BeliefState& x) {
  if (x.size() != chain.n_states()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "belief has " + std::to_string(x.size()) +
                    " entries, chain has " + std::to_string(chain.n_states()) +
                    " states");
  }
  return BeliefState{chain.transition() * x.probs};
}

BeliefState belief_reset(const ChainSpec& chain, int observed_state) {
  if (observed_state < 0 || observed_state >= chain.n_states()) {
    throw Error(ErrorKind::kIndexOutOfRange,
                "observed state " + std::to_string(observed_state) +
                    " not in [0, " + std::to_string(chain.n_states()) + ")");
  }
  return BeliefState{chain.transition().col(observed_state)};
}

BeliefState n_step_column(const ChainSpec& chain, int k, int n) {
  if (n < 1) {
    throw Error(ErrorKind::kInvalidArgument, "n_step_column needs n >= 1");
  }
  BeliefState x = belief_reset(chain, k);
  for (int step = 1; step < n; ++step) x.probs = chain.transition() * x.probs;
  return x;
}

double uoi(const ChainSpec& chain, const BeliefState& x) {
  return entropy(belief_propagate(chain, x));
}

double max_norm_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

double l1_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().sum();
}

}  // namespace uoi
