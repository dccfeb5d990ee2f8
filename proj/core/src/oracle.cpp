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

#include "uoi/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "parallel.hpp"
#include "uoi/error.hpp"

namespace uoi {
namespace {

constexpr int kMaxJointBandits = 32;
constexpr int kMaxSweeps = 1000000;
constexpr double kAperiodicity = 0.5;
constexpr std::int64_t kChunk = 4096;

void lexicographic_subsets(int n, int m, std::vector<int>& current, int start,
                           std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == m) {
    out.push_back(current);
    return;
  }
  for (int i = start; i <= n - (m - static_cast<int>(current.size())); ++i) {
    current.push_back(i);
    lexicographic_subsets(n, m, current, i + 1, out);
    current.pop_back();
  }
}

struct Sweep {
  std::vector<double> next;
  std::vector<int> policy;
};

// One Bellman sweep over all joint states: next(s) = update(s, min_a E[v]).
template <typename Update>
void bellman_sweep(const JointMDP& joint, const std::vector<double>& v,
                   int threads, Sweep& out, Update&& update) {
  const std::int64_t n = joint.n_states();
  const int chunks = static_cast<int>((n + kChunk - 1) / kChunk);
  internal::parallel_for(chunks, threads, [&](int c) {
    const std::int64_t lo = c * kChunk;
    const std::int64_t hi = std::min(n, lo + kChunk);
    for (std::int64_t s = lo; s < hi; ++s) {
      double best = joint.expectation(s, 0, v);
      int best_a = 0;
      for (int a = 1; a < joint.n_actions(); ++a) {
        const double e = joint.expectation(s, a, v);
        // Ties within rounding keep the lexicographically smaller action.
        if (e < best - 1e-12 * (1.0 + std::abs(best))) {
          best = e;
          best_a = a;
        }
      }
      out.next[s] = update(s, best);
      out.policy[s] = best_a;
    }
  });
}

}  // namespace

JointMDP JointMDP::make(const RMABInstance& instance, std::int64_t cap) {
  const int n = instance.n_bandits();
  if (instance.m < 1 || instance.m >= n) {
    throw Error(ErrorKind::kInvalidArgument, "need 1 <= m < M");
  }
  if (n > kMaxJointBandits) {
    throw Error(ErrorKind::kStateSpaceTooLarge,
                std::to_string(n) + " bandits in the joint model");
  }
  JointMDP out;
  // State-action count, saturating well below overflow.
  double pairs = 1.0;
  std::int64_t stride = 1;
  for (const TruncatedBeliefMDP& b : instance.bandits) {
    out.components_.push_back(b.mdp());
    out.radices_.push_back(b.n_states());
    out.strides_.push_back(stride);
    pairs *= b.n_states();
    if (pairs <= 9e15) stride *= b.n_states();
  }
  double n_actions = 1.0;
  for (int j = 0; j < instance.m; ++j) {
    n_actions = n_actions * (n - j) / (j + 1);
  }
  pairs *= n_actions;
  if (pairs > static_cast<double>(cap)) {
    throw Error(ErrorKind::kStateSpaceTooLarge,
                "joint model has " + std::to_string(std::llround(pairs)) +
                    " state-action pairs, cap is " + std::to_string(cap));
  }
  out.n_states_ = stride;
  std::vector<int> current;
  lexicographic_subsets(n, instance.m, current, 0, out.actions_);
  return out;
}

std::int64_t JointMDP::encode(const std::vector<int>& states) const {
  if (static_cast<int>(states.size()) != n_bandits()) {
    throw Error(ErrorKind::kDimensionMismatch, "joint state arity");
  }
  std::int64_t joint = 0;
  for (int i = 0; i < n_bandits(); ++i) {
    if (states[i] < 0 || states[i] >= radices_[i]) {
      throw Error(ErrorKind::kIndexOutOfRange,
                  "state of bandit " + std::to_string(i));
    }
    joint += states[i] * strides_[i];
  }
  return joint;
}

std::vector<int> JointMDP::decode(std::int64_t joint) const {
  std::vector<int> states(n_bandits());
  for (int i = 0; i < n_bandits(); ++i) {
    states[i] = static_cast<int>((joint / strides_[i]) % radices_[i]);
  }
  return states;
}

double JointMDP::cost(std::int64_t joint) const {
  double c = 0.0;
  for (int i = 0; i < n_bandits(); ++i) {
    c += components_[i].cost[(joint / strides_[i]) % radices_[i]];
  }
  return c;
}

void JointMDP::for_each_successor(
    std::int64_t joint, int action,
    const std::function<void(std::int64_t, double)>& visit) const {
  const int n = n_bandits();
  std::array<const SuccessorList*, kMaxJointBandits> lists{};
  for (int i = 0; i < n; ++i) {
    const int s = static_cast<int>((joint / strides_[i]) % radices_[i]);
    lists[i] = &components_[i].passive[s];
  }
  for (int i : actions_[action]) {
    const int s = static_cast<int>((joint / strides_[i]) % radices_[i]);
    lists[i] = &components_[i].active[s];
  }
  auto rec = [&](auto&& self, int i, std::int64_t base, double p) -> void {
    if (i == n) {
      visit(base, p);
      return;
    }
    for (const Transition& tr : *lists[i]) {
      self(self, i + 1, base + tr.target * strides_[i], p * tr.prob);
    }
  };
  rec(rec, 0, 0, 1.0);
}

double JointMDP::expectation(std::int64_t joint, int action,
                             const std::vector<double>& values) const {
  const int n = n_bandits();
  std::array<const SuccessorList*, kMaxJointBandits> lists{};
  for (int i = 0; i < n; ++i) {
    const int s = static_cast<int>((joint / strides_[i]) % radices_[i]);
    lists[i] = &components_[i].passive[s];
  }
  for (int i : actions_[action]) {
    const int s = static_cast<int>((joint / strides_[i]) % radices_[i]);
    lists[i] = &components_[i].active[s];
  }
  auto rec = [&](auto&& self, int i, std::int64_t base) -> double {
    if (i == n) return values[base];
    double sum = 0.0;
    for (const Transition& tr : *lists[i]) {
      sum += tr.prob * self(self, i + 1, base + tr.target * strides_[i]);
    }
    return sum;
  };
  return rec(rec, 0, 0);
}

OracleSolution joint_solve_discounted(const RMABInstance& instance,
                                      double tol, std::int64_t cap,
                                      int threads) {
  if (instance.criterion != Criterion::kDiscounted) {
    throw Error(ErrorKind::kInvalidArgument,
                "instance is not a discounted-cost instance");
  }
  if (!(tol > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "tol must be positive");
  }
  const JointMDP joint = JointMDP::make(instance, cap);
  const double beta = instance.beta;
  const std::int64_t n = joint.n_states();
  std::vector<double> cost(n);
  for (std::int64_t s = 0; s < n; ++s) cost[s] = joint.cost(s);

  // ||v_{k+1} - v_k|| < tol (1 - beta) / (2 beta) puts v_{k+1} within tol / 2.
  const double stop = beta > 0.0 ? tol * (1.0 - beta) / (2.0 * beta) : 0.0;
  std::vector<double> v(n, 0.0);
  Sweep sweep{std::vector<double>(n), std::vector<int>(n)};
  OracleSolution out;
  for (int it = 1; it <= kMaxSweeps; ++it) {
    bellman_sweep(joint, v, threads, sweep,
                  [&](std::int64_t s, double e) { return cost[s] + beta * e; });
    double residual = 0.0;
    for (std::int64_t s = 0; s < n; ++s) {
      residual = std::max(residual, std::abs(sweep.next[s] - v[s]));
    }
    v.swap(sweep.next);
    if (residual <= stop) {
      out.iterations = it;
      out.initial_state = joint.encode(instance.initial_states);
      out.value = v[out.initial_state];
      out.values = std::move(v);
      out.policy = std::move(sweep.policy);
      return out;
    }
  }
  throw Error(ErrorKind::kNoConvergence, "joint value iteration");
}

OracleSolution joint_solve_average(const RMABInstance& instance, double tol,
                                   std::int64_t cap, int threads) {
  if (instance.criterion != Criterion::kAverage) {
    throw Error(ErrorKind::kInvalidArgument,
                "instance is not an average-cost instance");
  }
  if (!(tol > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "tol must be positive");
  }
  const JointMDP joint = JointMDP::make(instance, cap);
  const std::int64_t n = joint.n_states();
  std::vector<double> cost(n);
  for (std::int64_t s = 0; s < n; ++s) cost[s] = joint.cost(s);

  // w <- c + tau P w + (1 - tau) w keeps the gain and scales the relative
  // values by 1 / tau, and makes every policy aperiodic.
  const double tau = kAperiodicity;
  std::vector<double> w(n, 0.0);
  Sweep sweep{std::vector<double>(n), std::vector<int>(n)};
  OracleSolution out;
  for (int it = 1; it <= kMaxSweeps; ++it) {
    bellman_sweep(joint, w, threads, sweep, [&](std::int64_t s, double e) {
      return cost[s] + tau * e + (1.0 - tau) * w[s];
    });
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::int64_t s = 0; s < n; ++s) {
      const double d = sweep.next[s] - w[s];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    const double pin = sweep.next[0];
    for (std::int64_t s = 0; s < n; ++s) w[s] = sweep.next[s] - pin;
    if (hi - lo < tol) {
      out.iterations = it;
      out.value = 0.5 * (lo + hi);
      out.initial_state = joint.encode(instance.initial_states);
      for (double& x : w) x *= tau;
      out.values = std::move(w);
      out.policy = std::move(sweep.policy);
      return out;
    }
  }
  throw Error(ErrorKind::kNoConvergence, "joint relative value iteration");
}

}  // namespace uoi
