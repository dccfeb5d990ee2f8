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

#include "uoi/solvers.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "graph.hpp"
#include "uoi/error.hpp"

namespace uoi {
namespace {

constexpr int kMaxPolicyIterations = 1000;
constexpr int kMaxRelativeValueSweeps = 1000000;
constexpr double kAperiodicity = 0.5;
constexpr double kEvaluationResidual = 1e-10;

double expect(const SuccessorList& row, std::span<const double> values) {
  double total = 0.0;
  for (const Transition& tr : row) total += tr.prob * values[tr.target];
  return total;
}

const SuccessorList& row_for(const FiniteMdp& mdp, const Policy& policy,
                             int s) {
  return policy[s] ? mdp.active[s] : mdp.passive[s];
}

void check_policy(const FiniteMdp& mdp, const Policy& policy) {
  if (static_cast<int>(policy.size()) != mdp.n_states()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "policy has " + std::to_string(policy.size()) +
                    " actions for " + std::to_string(mdp.n_states()) +
                    " states");
  }
}

void check_discounted(const FiniteMdp& mdp) {
  if (!(mdp.discount >= 0.0 && mdp.discount < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "discounted solver needs beta in [0, 1), got " +
                    std::to_string(mdp.discount));
  }
}

using SparseMatrix = Eigen::SparseMatrix<double>;

// Solves a x = b with a sparse LU and up to three refinement steps.
Eigen::VectorXd sparse_solve(const SparseMatrix& a, const Eigen::VectorXd& b,
                             double residual_target) {
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorKind::kSingularSystem, "policy evaluation system");
  }
  Eigen::VectorXd x = lu.solve(b);
  for (int refine = 0; refine < 3; ++refine) {
    const Eigen::VectorXd r = b - a * x;
    if (r.cwiseAbs().maxCoeff() <= residual_target) break;
    x += lu.solve(r);
  }
  return x;
}

// Policy improvement that keeps the current action unless the other one is
// strictly better. Returns true if any action changed.
bool improve(const FiniteMdp& mdp, std::span<const double> values,
             double lambda, Criterion criterion, Policy& policy) {
  bool changed = false;
  for (int s = 0; s < mdp.n_states(); ++s) {
    const ActivePassive ap =
        active_passive_values(mdp, values, s, lambda, criterion);
    if (policy[s] && ap.passive < ap.active - kTieTolerance) {
      policy[s] = 0;
      changed = true;
    } else if (!policy[s] && ap.active < ap.passive - kTieTolerance) {
      policy[s] = 1;
      changed = true;
    }
  }
  return changed;
}

std::vector<std::vector<int>> policy_graph(const FiniteMdp& mdp,
                                           const Policy& policy) {
  std::vector<std::vector<int>> adjacency(mdp.n_states());
  for (int s = 0; s < mdp.n_states(); ++s) {
    for (const Transition& tr : row_for(mdp, policy, s)) {
      if (tr.prob > 0.0) adjacency[s].push_back(tr.target);
    }
  }
  return adjacency;
}

PolicyAndValues vanishing_discount(const FiniteMdp& mdp, double lambda,
                                   const std::optional<Policy>& init) {
  FiniteMdp coarse = mdp;
  coarse.discount = kVanishingDiscountCoarse;
  FiniteMdp fine = mdp;
  fine.discount = kVanishingDiscountFine;
  const PolicyAndValues rc = policy_iteration_discounted(coarse, lambda, init);
  const PolicyAndValues rf =
      policy_iteration_discounted(fine, lambda, rc.actions);
  const double gc = (1.0 - coarse.discount) * rc.values[mdp.anchor];
  const double gf = (1.0 - fine.discount) * rf.values[mdp.anchor];
  // (1 - beta) V = g + O(1 - beta); eliminate the first-order term.
  const double slope =
      (gc - gf) / ((1.0 - coarse.discount) - (1.0 - fine.discount));

  PolicyAndValues out;
  out.actions = rf.actions;
  out.values = rf.values;
  const double pinned = rf.values[mdp.anchor];
  for (double& v : out.values) v -= pinned;
  out.gain = gf - slope * (1.0 - fine.discount);
  out.lambda = lambda;
  out.criterion = Criterion::kAverage;
  out.iterations = rc.iterations + rf.iterations;
  out.degraded = true;
  return out;
}

}  // namespace

Policy all_active(int n_states) { return Policy(n_states, 1); }
Policy all_passive(int n_states) { return Policy(n_states, 0); }

int PolicyAndValues::active_count() const {
  return static_cast<int>(std::count(actions.begin(), actions.end(), 1));
}

ActivePassive active_passive_values(const FiniteMdp& mdp,
                                    std::span<const double> values, int state,
                                    double lambda, Criterion criterion) {
  const double beta =
      criterion == Criterion::kDiscounted ? mdp.discount : 1.0;
  return ActivePassive{lambda + beta * expect(mdp.active[state], values),
                       beta * expect(mdp.passive[state], values)};
}

Policy greedy_policy(const FiniteMdp& mdp, std::span<const double> values,
                     double lambda, Criterion criterion) {
  Policy policy(mdp.n_states());
  for (int s = 0; s < mdp.n_states(); ++s) {
    policy[s] =
        active_passive_values(mdp, values, s, lambda, criterion)
                .prefers_active()
            ? 1
            : 0;
  }
  return policy;
}

std::vector<double> policy_cost(const FiniteMdp& mdp, const Policy& policy,
                                double lambda) {
  check_policy(mdp, policy);
  std::vector<double> cost(mdp.cost);
  for (int s = 0; s < mdp.n_states(); ++s) {
    if (policy[s]) cost[s] += lambda;
  }
  return cost;
}

std::vector<double> activation_cost(const Policy& policy) {
  return std::vector<double>(policy.begin(), policy.end());
}

PolicyAndValues value_iteration_discounted(const FiniteMdp& mdp, double lambda,
                                           double tol) {
  check_discounted(mdp);
  if (!(tol > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "tolerance must be positive");
  }
  const double beta = mdp.discount;
  const int n = mdp.n_states();
  const double threshold = beta > 0.0 ? tol * (1.0 - beta) / (2.0 * beta) : 0.0;
  std::vector<double> values(n, 0.0), next(n, 0.0);
  int sweeps = 0;
  while (true) {
    ++sweeps;
    double residual = 0.0;
    for (int s = 0; s < n; ++s) {
      const ActivePassive ap = active_passive_values(
          mdp, values, s, lambda, Criterion::kDiscounted);
      next[s] = mdp.cost[s] + std::min(ap.active, ap.passive);
      residual = std::max(residual, std::abs(next[s] - values[s]));
    }
    values.swap(next);
    if (residual <= threshold) break;
  }
  PolicyAndValues out;
  out.actions = greedy_policy(mdp, values, lambda, Criterion::kDiscounted);
  out.values = std::move(values);
  out.lambda = lambda;
  out.criterion = Criterion::kDiscounted;
  out.iterations = sweeps;
  return out;
}

std::vector<double> policy_evaluation_discounted(const FiniteMdp& mdp,
                                                 const Policy& policy,
                                                 std::span<const double> cost) {
  check_discounted(mdp);
  check_policy(mdp, policy);
  const int n = mdp.n_states();
  if (static_cast<int>(cost.size()) != n) {
    throw Error(ErrorKind::kDimensionMismatch,
                "cost vector length does not match the state count");
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * 4);
  for (int s = 0; s < n; ++s) {
    triplets.emplace_back(s, s, 1.0);
    for (const Transition& tr : row_for(mdp, policy, s)) {
      triplets.emplace_back(s, tr.target, -mdp.discount * tr.prob);
    }
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  const Eigen::VectorXd b =
      Eigen::Map<const Eigen::VectorXd>(cost.data(), n);
  const Eigen::VectorXd v = sparse_solve(a, b, kEvaluationResidual);
  return std::vector<double>(v.data(), v.data() + n);
}

PolicyAndValues policy_iteration_discounted(const FiniteMdp& mdp, double lambda,
                                            const std::optional<Policy>& init) {
  check_discounted(mdp);
  Policy policy = init.value_or(all_active(mdp.n_states()));
  check_policy(mdp, policy);
  std::vector<double> values;
  int passes = 0;
  while (true) {
    if (++passes > kMaxPolicyIterations) {
      throw Error(ErrorKind::kNoConvergence, "discounted policy iteration");
    }
    values = policy_evaluation_discounted(mdp, policy,
                                          policy_cost(mdp, policy, lambda));
    if (!improve(mdp, values, lambda, Criterion::kDiscounted, policy)) break;
  }
  Policy tie_broken =
      greedy_policy(mdp, values, lambda, Criterion::kDiscounted);
  if (tie_broken != policy) {
    policy = std::move(tie_broken);
    values = policy_evaluation_discounted(mdp, policy,
                                          policy_cost(mdp, policy, lambda));
  }
  PolicyAndValues out;
  out.actions = std::move(policy);
  out.values = std::move(values);
  out.lambda = lambda;
  out.criterion = Criterion::kDiscounted;
  out.iterations = passes;
  return out;
}

bool is_unichain(const FiniteMdp& mdp, const Policy& policy) {
  check_policy(mdp, policy);
  return internal::count_closed_classes(policy_graph(mdp, policy)) == 1;
}

AverageEvaluation average_policy_evaluation(const FiniteMdp& mdp,
                                            const Policy& policy,
                                            std::span<const double> cost) {
  check_policy(mdp, policy);
  const int n = mdp.n_states();
  if (static_cast<int>(cost.size()) != n) {
    throw Error(ErrorKind::kDimensionMismatch,
                "cost vector length does not match the state count");
  }
  const int closed = internal::count_closed_classes(policy_graph(mdp, policy));
  if (closed != 1) {
    throw Error(ErrorKind::kMultichainPolicy,
                "policy induces " + std::to_string(closed) +
                    " closed classes");
  }
  // Unknowns are Z with the anchor entry replaced by the gain g.
  const int anchor = mdp.anchor;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * 5);
  for (int s = 0; s < n; ++s) {
    if (s != anchor) triplets.emplace_back(s, s, 1.0);
    for (const Transition& tr : row_for(mdp, policy, s)) {
      if (tr.target != anchor) triplets.emplace_back(s, tr.target, -tr.prob);
    }
    triplets.emplace_back(s, anchor, 1.0);
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  const Eigen::VectorXd b =
      Eigen::Map<const Eigen::VectorXd>(cost.data(), n);
  const Eigen::VectorXd y = sparse_solve(a, b, 1e-11);

  AverageEvaluation out;
  out.gain = y(anchor);
  out.values.assign(y.data(), y.data() + n);
  out.values[anchor] = 0.0;
  return out;
}

PolicyAndValues policy_iteration_average(const FiniteMdp& mdp, double lambda,
                                         const std::optional<Policy>& init) {
  Policy policy = init.value_or(all_active(mdp.n_states()));
  check_policy(mdp, policy);
  AverageEvaluation eval;
  int passes = 0;
  while (true) {
    if (++passes > kMaxPolicyIterations) {
      throw Error(ErrorKind::kNoConvergence, "average policy iteration");
    }
    if (!is_unichain(mdp, policy)) {
      return vanishing_discount(mdp, lambda, init);
    }
    eval = average_policy_evaluation(mdp, policy,
                                     policy_cost(mdp, policy, lambda));
    if (!improve(mdp, eval.values, lambda, Criterion::kAverage, policy)) break;
  }
  Policy tie_broken =
      greedy_policy(mdp, eval.values, lambda, Criterion::kAverage);
  if (tie_broken != policy && is_unichain(mdp, tie_broken)) {
    policy = std::move(tie_broken);
    eval = average_policy_evaluation(mdp, policy,
                                     policy_cost(mdp, policy, lambda));
  }
  PolicyAndValues out;
  out.actions = std::move(policy);
  out.values = std::move(eval.values);
  out.gain = eval.gain;
  out.lambda = lambda;
  out.criterion = Criterion::kAverage;
  out.iterations = passes;
  return out;
}

PolicyAndValues solve_average(const FiniteMdp& mdp, double lambda, double tol) {
  if (!(tol > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "tolerance must be positive");
  }
  const int n = mdp.n_states();
  const int anchor = mdp.anchor;
  // Mixing in a self-loop keeps the gain and scales the bias by
  // 1 / (1 - kAperiodicity), which makes the iteration converge on periodic
  // policies.
  std::vector<double> h(n, 0.0), next(n, 0.0);
  int sweeps = 0;
  while (true) {
    if (++sweeps > kMaxRelativeValueSweeps) {
      throw Error(ErrorKind::kNoConvergence, "relative value iteration");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int s = 0; s < n; ++s) {
      const double a =
          lambda + kAperiodicity * h[s] +
          (1.0 - kAperiodicity) * expect(mdp.active[s], h);
      const double r = kAperiodicity * h[s] +
                       (1.0 - kAperiodicity) * expect(mdp.passive[s], h);
      next[s] = mdp.cost[s] + std::min(a, r);
      lo = std::min(lo, next[s] - h[s]);
      hi = std::max(hi, next[s] - h[s]);
    }
    const double pinned = next[anchor];
    for (int s = 0; s < n; ++s) h[s] = next[s] - pinned;
    if (hi - lo <= tol) break;
  }
  std::vector<double> z(n);
  for (int s = 0; s < n; ++s) z[s] = (1.0 - kAperiodicity) * h[s];
  const Policy start = greedy_policy(mdp, z, lambda, Criterion::kAverage);
  PolicyAndValues out = policy_iteration_average(mdp, lambda, start);
  out.iterations += sweeps;
  return out;
}

}  // namespace uoi
