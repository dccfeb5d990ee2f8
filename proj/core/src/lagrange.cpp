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

#include "uoi/lagrange.hpp"

#include <algorithm>
#include <cmath>

namespace uoi {
namespace {

// Activation rate of a multichain policy started at `initial_state`, from the
// discounted activation counts at two discount factors near one.
double vanishing_discount_rate(const FiniteMdp& mdp, const Policy& policy,
                               int initial_state) {
  auto scaled = [&](double beta) {
    FiniteMdp copy = mdp;
    copy.discount = beta;
    return (1.0 - beta) *
           policy_evaluation_discounted(copy, policy,
                                        activation_cost(policy))[initial_state];
  };
  const double coarse = scaled(kVanishingDiscountCoarse);
  const double fine = scaled(kVanishingDiscountFine);
  const double slope = (coarse - fine) / (kVanishingDiscountFine -
                                          kVanishingDiscountCoarse);
  return std::clamp(fine - slope * (1.0 - kVanishingDiscountFine), 0.0, 1.0);
}

}  // namespace

double LagrangeProblem::entropy_bound() const {
  double b = 0.0;
  for (const LagrangeBandit& b_i : bandits) {
    b = std::max(b, std::log2(static_cast<double>(
                        b_i.mdp.bandit().chain.n_states())));
  }
  return b;
}

LagrangeProblem LagrangeProblem::make(std::vector<LagrangeBandit> bandits,
                                      int m, Criterion criterion,
                                      std::optional<double> stepsize_c,
                                      std::optional<double> epsilon,
                                      int max_iters) {
  const int n = static_cast<int>(bandits.size());
  if (m < 1 || m >= n) {
    throw Error(ErrorKind::kInvalidArgument,
                "need 1 <= m < M, got m=" + std::to_string(m) +
                    ", M=" + std::to_string(n));
  }
  if (max_iters < 1) {
    throw Error(ErrorKind::kInvalidArgument, "max_iters must be positive");
  }
  LagrangeProblem p;
  p.m = m;
  p.criterion = criterion;
  p.max_iters = max_iters;
  if (criterion == Criterion::kDiscounted) {
    p.beta = bandits.front().mdp.discount();
    for (const LagrangeBandit& b : bandits) {
      if (b.mdp.discount() != p.beta) {
        throw Error(ErrorKind::kInvalidArgument,
                    "bandits disagree on the discount factor");
      }
    }
    if (!(p.beta >= 0.0 && p.beta < 1.0)) {
      throw Error(ErrorKind::kInvalidArgument, "beta must be in [0, 1)");
    }
  }
  for (const LagrangeBandit& b : bandits) {
    if (b.initial_state < 0 || b.initial_state >= b.mdp.n_states()) {
      throw Error(ErrorKind::kIndexOutOfRange,
                  "initial state of bandit '" + b.mdp.bandit().label + "'");
    }
  }
  p.bandits = std::move(bandits);
  const double b_h = p.entropy_bound();
  const double default_c =
      criterion == Criterion::kDiscounted ? (1.0 - p.beta) * b_h : b_h;
  p.stepsize_c = stepsize_c.value_or(default_c);
  p.epsilon = epsilon.value_or(1e-3 * b_h);
  if (!(p.stepsize_c > 0.0) || !(p.epsilon > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "stepsize c and epsilon must be positive");
  }
  return p;
}

double derivative_discounted(const FiniteMdp& mdp, const Policy& policy,
                             int initial_state) {
  if (initial_state < 0 || initial_state >= mdp.n_states()) {
    throw Error(ErrorKind::kIndexOutOfRange, "initial state");
  }
  return policy_evaluation_discounted(mdp, policy,
                                      activation_cost(policy))[initial_state];
}

double derivative_average(const FiniteMdp& mdp, const Policy& policy) {
  return average_policy_evaluation(mdp, policy, activation_cost(policy)).gain;
}

BanditSolution solve_bandit(const LagrangeBandit& bandit, Criterion criterion,
                            double lambda, const std::optional<Policy>& warm) {
  const FiniteMdp& mdp = bandit.mdp.mdp();
  BanditSolution out;
  if (criterion == Criterion::kDiscounted) {
    out.solution = policy_iteration_discounted(mdp, lambda, warm);
    out.value = out.solution.values[bandit.initial_state];
    out.derivative = derivative_discounted(mdp, out.solution.actions,
                                           bandit.initial_state);
  } else {
    out.solution = policy_iteration_average(mdp, lambda, warm);
    out.value = out.solution.gain;
    out.derivative =
        is_unichain(mdp, out.solution.actions)
            ? derivative_average(mdp, out.solution.actions)
            : vanishing_discount_rate(mdp, out.solution.actions,
                                      bandit.initial_state);
  }
  return out;
}

DualEvaluation evaluate_dual(const LagrangeProblem& problem, double lambda,
                             const DualEvaluation* warm) {
  DualEvaluation out;
  out.lambda = lambda;
  out.bandits.reserve(problem.bandits.size());
  double value_sum = 0.0;
  double derivative_sum = 0.0;
  for (std::size_t i = 0; i < problem.bandits.size(); ++i) {
    std::optional<Policy> init;
    if (warm != nullptr) init = warm->bandits[i].solution.actions;
    out.bandits.push_back(
        solve_bandit(problem.bandits[i], problem.criterion, lambda, init));
    value_sum += out.bandits.back().value;
    derivative_sum += out.bandits.back().derivative;
  }
  const double budget = problem.criterion == Criterion::kDiscounted
                            ? problem.m / (1.0 - problem.beta)
                            : static_cast<double>(problem.m);
  out.objective = value_sum - budget * lambda;
  out.derivative = derivative_sum - budget;
  // On a flat optimum the exact derivative is zero; keep rounding noise from
  // hiding the sign change the stopping rule looks for.
  if (std::abs(out.derivative) <= kDerivativeSnap * std::max(1.0, budget)) {
    out.derivative = 0.0;
  }
  return out;
}

double objective_derivative(const LagrangeProblem& problem, double lambda) {
  if (!(lambda >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "lambda must be nonnegative");
  }
  return evaluate_dual(problem, lambda).derivative;
}

GradientTrace gradient_search(const LagrangeProblem& problem,
                              bool warm_start) {
  GradientTrace trace;
  DualEvaluation current = evaluate_dual(problem, 0.0);
  trace.iterates.push_back({0.0, current.derivative});
  if (current.derivative <= 0.0) {
    // Only possible for non-concave costs: the dual is maximized at zero.
    trace.lambda_star = 0.0;
    trace.stop_reason = StopReason::kConverged;
    return trace;
  }
  for (int k = 0; k < problem.max_iters; ++k) {
    const double step = problem.stepsize_c / (k + 1);
    const double next_lambda =
        std::max(0.0, current.lambda + step * current.derivative);
    DualEvaluation next =
        evaluate_dual(problem, next_lambda, warm_start ? &current : nullptr);
    trace.iterates.push_back({next.lambda, next.derivative});
    if (current.derivative * next.derivative <= 0.0 &&
        std::abs(next.lambda - current.lambda) < problem.epsilon) {
      trace.bracket_low = std::min(current.lambda, next.lambda);
      trace.bracket_high = std::max(current.lambda, next.lambda);
      trace.lambda_star = trace.bracket_low;
      trace.stop_reason = StopReason::kConverged;
      return trace;
    }
    current = std::move(next);
  }
  trace.lambda_star = current.lambda;
  trace.stop_reason = StopReason::kMaxIters;
  throw MaxItersExceeded(std::move(trace));
}

}  // namespace uoi
