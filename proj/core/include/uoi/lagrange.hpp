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

#ifndef UOI_LAGRANGE_HPP_
#define UOI_LAGRANGE_HPP_

#include <optional>
#include <vector>

#include "uoi/belief_mdp.hpp"
#include "uoi/error.hpp"
#include "uoi/solvers.hpp"

namespace uoi {

struct LagrangeBandit {
  TruncatedBeliefMDP mdp;
  int initial_state = TruncatedBeliefMDP::kEquilibriumIndex;
};

// Dual problem sup_{lambda >= 0} of the relaxed scheduling problem: f(lambda)
// for the discounted criterion, l(lambda) for the average one.
struct LagrangeProblem {
  std::vector<LagrangeBandit> bandits;
  int m = 1;
  Criterion criterion = Criterion::kDiscounted;
  // Shared discount factor; 1 for the average criterion.
  double beta = 1.0;
  double stepsize_c = 0.0;
  double epsilon = 0.0;
  int max_iters = 5000;

  int n_bandits() const { return static_cast<int>(bandits.size()); }
  // Largest log2 N over the bandits.
  double entropy_bound() const;

  // Checks 1 <= m < M and a common discount factor. Unset stepsize_c and
  // epsilon fall back to scale-aware defaults: c = (1 - beta) B_H (discounted)
  // or B_H (average), epsilon = 1e-3 B_H.
  static LagrangeProblem make(std::vector<LagrangeBandit> bandits, int m,
                              Criterion criterion,
                              std::optional<double> stepsize_c = std::nullopt,
                              std::optional<double> epsilon = std::nullopt,
                              int max_iters = 5000);
};

struct GradientIterate {
  double lambda;
  double derivative;
};

enum class StopReason { kConverged, kMaxIters };

struct GradientTrace {
  std::vector<GradientIterate> iterates;
  double lambda_star = 0.0;
  StopReason stop_reason = StopReason::kMaxIters;
  // Sorted pair (lambda_k, lambda_{k+1}) at the stopping iteration.
  double bracket_low = 0.0;
  double bracket_high = 0.0;
};

// Raised when the gradient iteration does not meet its stopping rule; the
// partial trace is kept for diagnosis.
class MaxItersExceeded : public Error {
 public:
  explicit MaxItersExceeded(GradientTrace trace)
      : Error(ErrorKind::kMaxItersExceeded,
              "gradient search did not converge in " +
                  std::to_string(trace.iterates.size()) + " evaluations"),
        trace_(std::move(trace)) {}

  const GradientTrace& trace() const { return trace_; }

 private:
  GradientTrace trace_;
};

// Expected discounted number of activations from `initial_state` under
// `policy`: the value of the auxiliary MDP whose cost is the action.
double derivative_discounted(const FiniteMdp& mdp, const Policy& policy,
                             int initial_state);

// Long-run activation rate under a unichain policy. Throws
// Error(kMultichainPolicy) otherwise.
double derivative_average(const FiniteMdp& mdp, const Policy& policy);

// Per-bandit solution and derivative at one multiplier.
struct BanditSolution {
  PolicyAndValues solution;
  // V(chi, lambda) or g(lambda).
  double value = 0.0;
  // dV/dlambda or g'(lambda) under the tie-broken optimal policy.
  double derivative = 0.0;
};

BanditSolution solve_bandit(const LagrangeBandit& bandit, Criterion criterion,
                            double lambda,
                            const std::optional<Policy>& warm = std::nullopt);

// Dual derivatives within this fraction of the budget m / (1 - beta) (or m)
// are reported as exactly zero.
inline constexpr double kDerivativeSnap = 1e-9;

struct DualEvaluation {
  double lambda = 0.0;
  // f(lambda) or l(lambda).
  double objective = 0.0;
  // f'(lambda) or l'(lambda).
  double derivative = 0.0;
  std::vector<BanditSolution> bandits;
};

// Solves every bandit at `lambda` (warm-started from `warm` when given).
DualEvaluation evaluate_dual(const LagrangeProblem& problem, double lambda,
                             const DualEvaluation* warm = nullptr);

// sum_i dV_i/dlambda - m / (1 - beta), or sum_i g'_i - m.
double objective_derivative(const LagrangeProblem& problem, double lambda);

// Gradient iteration lambda_{k+1} = max(0, lambda_k + c / (k + 1) f'(lambda_k))
// from lambda_0 = 0, stopped once f' changes sign between consecutive iterates
// that are closer than epsilon. lambda_star is the smaller of the pair.
// Throws MaxItersExceeded.
GradientTrace gradient_search(const LagrangeProblem& problem,
                              bool warm_start = true);

}  // namespace uoi

#endif  // UOI_LAGRANGE_HPP_
