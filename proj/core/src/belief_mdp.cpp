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

#include "uoi/belief_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "uoi/error.hpp"

namespace uoi {
namespace {

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// Sharp continuity bound for Shannon entropy in terms of the total variation
// distance delta: |H(p) - H(q)| <= delta log2(N - 1) + h(delta).
double entropy_continuity_bound(double delta, int n) {
  const double cap = std::log2(static_cast<double>(n));
  if (delta >= 1.0 - 1.0 / n) return cap;
  const double bound =
      delta * std::log2(static_cast<double>(n - 1)) + binary_entropy(delta);
  return std::min(bound, cap);
}

}  // namespace

void FiniteMdp::check() const {
  const int n = n_states();
  if (static_cast<int>(passive.size()) != n ||
      static_cast<int>(active.size()) != n) {
    throw Error(ErrorKind::kInvalidArgument,
                "transition tables do not match the state count");
  }
  if (anchor < 0 || anchor >= n) {
    throw Error(ErrorKind::kInvalidArgument, "anchor state out of range");
  }
  auto check_rows = [n](const std::vector<SuccessorList>& rows,
                        const char* name) {
    for (int s = 0; s < n; ++s) {
      double total = 0.0;
      for (const Transition& tr : rows[s]) {
        if (tr.target < 0 || tr.target >= n || !(tr.prob >= 0.0)) {
          throw Error(ErrorKind::kInvalidArgument,
                      std::string(name) + " row " + std::to_string(s) +
                          " has an invalid successor");
        }
        total += tr.prob;
      }
      if (std::abs(total - 1.0) > 1e-12) {
        throw Error(ErrorKind::kInvalidArgument,
                    std::string(name) + " row " + std::to_string(s) +
                        " sums to " + std::to_string(total));
      }
    }
  };
  check_rows(passive, "passive");
  check_rows(active, "active");
}

BanditSpec BanditSpec::make(ChainSpec chain, double success_prob,
                            std::string label) {
  if (!(success_prob > 0.0 && success_prob <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "bandit '" + label + "': success probability " +
                    std::to_string(success_prob) + " not in (0, 1]");
  }
  return BanditSpec{std::move(chain), success_prob, std::move(label)};
}

int TruncatedBeliefMDP::state_index(int k, int n) const {
  const int n_obs = bandit_.chain.n_states();
  if (k < 0 || k >= n_obs || n < 1 || n > truncation_l_) {
    throw Error(ErrorKind::kIndexOutOfRange,
                "no truncated state for k=" + std::to_string(k) +
                    ", n=" + std::to_string(n));
  }
  return 1 + k * truncation_l_ + (n - 1);
}

int TruncatedBeliefMDP::passive_successor(int state) const {
  if (state == kEquilibriumIndex) return kEquilibriumIndex;
  const int age = (state - 1) % truncation_l_ + 1;
  return age == truncation_l_ ? kEquilibriumIndex : state + 1;
}

std::pair<int, int> TruncatedBeliefMDP::label_of(int state) const {
  if (state == kEquilibriumIndex) return {-1, 0};
  return {(state - 1) / truncation_l_, (state - 1) % truncation_l_ + 1};
}

TruncatedBeliefMDP TruncatedBeliefMDP::with_discount(double discount) const {
  TruncatedBeliefMDP copy = *this;
  copy.mdp_.discount = discount;
  return copy;
}

TruncatedBeliefMDP build_truncated(const BanditSpec& bandit, int truncation_l,
                                   double discount) {
  if (truncation_l < 1) {
    throw Error(ErrorKind::kInvalidArgument, "truncation L must be >= 1");
  }
  if (!(discount >= 0.0 && discount <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "discount must be in [0, 1]");
  }
  const ChainSpec& chain = bandit.chain;
  const int n_obs = chain.n_states();
  const int n_states = n_obs * truncation_l + 1;
  const double rho = bandit.success_prob;

  TruncatedBeliefMDP out(bandit, truncation_l);
  out.states_.reserve(n_states);
  out.states_.push_back(BeliefState{chain.equilibrium()});
  for (int k = 0; k < n_obs; ++k) {
    Eigen::VectorXd x = chain.transition().col(k);
    for (int n = 1; n <= truncation_l; ++n) {
      out.states_.push_back(BeliefState{x});
      x = chain.transition() * x;
    }
  }

  FiniteMdp& mdp = out.mdp_;
  mdp.discount = discount;
  mdp.anchor = out.reset_index(0);
  mdp.cost.resize(n_states);
  mdp.passive.resize(n_states);
  mdp.active.resize(n_states);
  for (int s = 0; s < n_states; ++s) {
    const Eigen::VectorXd& x = out.states_[s].probs;
    mdp.cost[s] = entropy(x);
    const int next = out.passive_successor(s);
    mdp.passive[s] = {Transition{next, 1.0}};
    SuccessorList& row = mdp.active[s];
    for (int k = 0; k < n_obs; ++k) {
      if (x(k) > 0.0) row.push_back(Transition{out.reset_index(k), rho * x(k)});
    }
    if (rho < 1.0) row.push_back(Transition{next, 1.0 - rho});
    // Renormalize away the round-off accumulated by repeated propagation.
    double total = 0.0;
    for (const Transition& tr : row) total += tr.prob;
    for (Transition& tr : row) tr.prob /= total;
  }
  return out;
}

TruncationDiagnostics truncation_diagnostics(const ChainSpec& chain,
                                             int truncation_l) {
  if (truncation_l < 1) {
    throw Error(ErrorKind::kInvalidArgument, "truncation L must be >= 1");
  }
  const int n = chain.n_states();
  const Eigen::VectorXd& omega = chain.equilibrium();
  const double h_omega = entropy(omega);

  TruncationDiagnostics diag;
  diag.truncation_l = truncation_l;
  diag.probe_depth = 4 * truncation_l;
  diag.b_h = std::log2(static_cast<double>(n));

  // Columns of T^L, then walk j = 0 .. 4L.
  Eigen::MatrixXd power = chain.transition();
  for (int step = 1; step < truncation_l; ++step) {
    power = chain.transition() * power;
  }
  for (int k = 0; k < n; ++k) {
    diag.eta_l = std::max(diag.eta_l, max_norm_distance(power.col(k), omega));
  }
  for (int j = 0; j <= diag.probe_depth; ++j) {
    for (int k = 0; k < n; ++k) {
      diag.sigma_probe =
          std::max(diag.sigma_probe, std::abs(entropy(power.col(k)) - h_omega));
    }
    if (j < diag.probe_depth) power = chain.transition() * power;
  }
  // The L1 distance to omega is nonincreasing in the number of steps, so the
  // gap at the end of the probe bounds every later column.
  double tv = 0.0;
  for (int k = 0; k < n; ++k) {
    tv = std::max(tv, 0.5 * l1_distance(power.col(k), omega));
  }
  diag.sigma_tail = entropy_continuity_bound(tv, n);
  diag.sigma_l = std::max(diag.sigma_probe, diag.sigma_tail);
  return diag;
}

std::pair<int, TruncationDiagnostics> choose_truncation(
    const BanditSpec& bandit, double eta_target, int l_max) {
  if (!(eta_target > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "eta_target must be positive");
  }
  const ChainSpec& chain = bandit.chain;
  Eigen::MatrixXd power = chain.transition();
  for (int l = 1; l <= l_max; ++l) {
    double eta = 0.0;
    for (int k = 0; k < chain.n_states(); ++k) {
      eta = std::max(eta, max_norm_distance(power.col(k), chain.equilibrium()));
    }
    if (eta <= eta_target) return {l, truncation_diagnostics(chain, l)};
    power = chain.transition() * power;
  }
  throw Error(ErrorKind::kTruncationTooDeep,
              "bandit '" + bandit.label + "' needs L > " +
                  std::to_string(l_max) + " for eta <= " +
                  std::to_string(eta_target));
}

double discounted_error_bound(const TruncationDiagnostics& diag, double lambda,
                              double beta, int n_states, double rho) {
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "discounted bound needs beta in [0, 1)");
  }
  const double gap = 1.0 - beta;
  return beta * diag.sigma_l / gap +
         beta * rho * diag.eta_l * n_states * (diag.b_h + lambda) / (gap * gap);
}

double average_error_bound(const TruncationDiagnostics& diag) {
  return diag.sigma_l;
}

int nearest_state(const TruncatedBeliefMDP& mdp,
                  const Eigen::VectorXd& belief) {
  if (belief.size() != mdp.bandit().chain.n_states()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "initial belief length does not match the chain");
  }
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int s = 0; s < mdp.n_states(); ++s) {
    const double d = max_norm_distance(mdp.states()[s].probs, belief);
    if (d < best_dist) {
      best_dist = d;
      best = s;
    }
  }
  return best;
}

}  // namespace uoi
