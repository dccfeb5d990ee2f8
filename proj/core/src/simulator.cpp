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

#include "uoi/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "parallel.hpp"
#include "uoi/error.hpp"
#include "uoi/lagrange.hpp"
#include "uoi/rng.hpp"

namespace uoi {
namespace {

// Top-m by score, ties to the lower position; output sorted by position.
void top_m(std::span<const double> scores, int m, std::vector<int>& order,
           std::vector<int>& selected) {
  order.resize(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + m, order.end(),
                    [&](int a, int b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });
  selected.assign(order.begin(), order.begin() + m);
  std::sort(selected.begin(), selected.end());
}

class ScorePolicy : public SchedulingPolicy {
 public:
  ScorePolicy(int m, std::vector<std::vector<double>> score_tables)
      : m_(m), tables_(std::move(score_tables)), scores_(tables_.size()) {}

  void select(std::span<const int> states,
              std::vector<int>& selected) override {
    for (std::size_t i = 0; i < tables_.size(); ++i) {
      scores_[i] = tables_[i][states[i]];
    }
    top_m(scores_, m_, order_, selected);
  }

 private:
  int m_;
  std::vector<std::vector<double>> tables_;
  std::vector<double> scores_;
  std::vector<int> order_;
};

class RoundRobinPolicy : public SchedulingPolicy {
 public:
  RoundRobinPolicy(int n, int m) : n_(n), m_(m) {}

  void select(std::span<const int>, std::vector<int>& selected) override {
    selected.clear();
    for (int j = 0; j < m_; ++j) selected.push_back((next_ + j) % n_);
    std::sort(selected.begin(), selected.end());
    next_ = (next_ + m_) % n_;
  }

 private:
  int n_;
  int m_;
  int next_ = 0;
};

class RelaxedPolicy : public SchedulingPolicy {
 public:
  explicit RelaxedPolicy(std::vector<std::vector<double>> gains)
      : gains_(std::move(gains)) {}

  void select(std::span<const int> states,
              std::vector<int>& selected) override {
    selected.clear();
    for (std::size_t i = 0; i < gains_.size(); ++i) {
      if (gains_[i][states[i]] >= -kTieTolerance) {
        selected.push_back(static_cast<int>(i));
      }
    }
  }
  bool fixed_activation_count() const override { return false; }

 private:
  std::vector<std::vector<double>> gains_;
};

std::vector<double> activation_gains(const GainIndexTable& table) {
  std::vector<double> out(table.n_states());
  for (int s = 0; s < table.n_states(); ++s) out[s] = table.activation_gain(s);
  return out;
}

void check_tables(const PolicySpec& spec, const RMABInstance& instance) {
  if (static_cast<int>(spec.tables.size()) != instance.n_bandits()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "policy " + to_string(spec.kind) + " needs one index table "
                "per bandit (" + std::to_string(instance.n_bandits()) +
                "), got " + std::to_string(spec.tables.size()));
  }
  for (int i = 0; i < instance.n_bandits(); ++i) {
    if (spec.tables[i].n_states() != instance.bandits[i].n_states()) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "index table of bandit " + std::to_string(i) + " has " +
                      std::to_string(spec.tables[i].n_states()) +
                      " states, model has " +
                      std::to_string(instance.bandits[i].n_states()));
    }
  }
}

struct RunOutput {
  double discounted = 0.0;
  double average = 0.0;
  std::vector<std::int64_t> activations;
  std::vector<double> cost_sum;
  std::vector<int> trace;
  std::int64_t or_slots = 0;
  std::int64_t or_matches = 0;
};

int sample_index(const Eigen::VectorXd& probs, double u) {
  double acc = 0.0;
  int last = 0;
  for (int k = 0; k < probs.size(); ++k) {
    if (probs(k) <= 0.0) continue;
    acc += probs(k);
    last = k;
    if (u < acc) return k;
  }
  return last;
}

RunOutput run_once(const RMABInstance& instance, const PolicySpec& spec,
                   const std::vector<std::vector<double>>& or_gains,
                   int horizon, int burn_in, bool record_trace,
                   std::uint64_t run) {
  const int n = instance.n_bandits();
  const int m = instance.m;
  Xoshiro256StarStar rng = substream(instance.seed, run);
  std::unique_ptr<SchedulingPolicy> policy = make_policy(spec, instance);
  const bool fixed = policy->fixed_activation_count();

  RunOutput out;
  out.activations.assign(n, 0);
  out.cost_sum.assign(n, 0.0);
  if (record_trace) out.trace.reserve(horizon);

  std::vector<int> states = instance.initial_states;
  std::vector<int> selected;
  std::vector<int> or_set;
  std::vector<char> active(n, 0);
  double weight = 1.0;
  double tail_sum = 0.0;
  for (int t = 0; t < horizon; ++t) {
    double slot_cost = 0.0;
    for (int i = 0; i < n; ++i) {
      const double c = instance.bandits[i].costs_passive()[states[i]];
      out.cost_sum[i] += c;
      slot_cost += c;
    }
    out.discounted += weight * slot_cost;
    weight *= instance.beta;
    if (t >= burn_in) tail_sum += slot_cost;

    policy->select(states, selected);
    if (fixed) {
      bool ok = static_cast<int>(selected.size()) == m;
      for (std::size_t j = 0; ok && j < selected.size(); ++j) {
        ok = selected[j] >= 0 && selected[j] < n &&
             (j == 0 || selected[j] > selected[j - 1]);
      }
      if (!ok) {
        throw Error(ErrorKind::kInfeasiblePolicy,
                    to_string(spec.kind) + " selected " +
                        std::to_string(selected.size()) +
                        " bandits in slot " + std::to_string(t + 1));
      }
    }
    if (record_trace) out.trace.push_back(static_cast<int>(selected.size()));
    if (!or_gains.empty()) {
      or_set.clear();
      for (int i = 0; i < n; ++i) {
        if (or_gains[i][states[i]] >= -kTieTolerance) or_set.push_back(i);
      }
      if (static_cast<int>(or_set.size()) == m) {
        ++out.or_slots;
        if (or_set == selected) ++out.or_matches;
      }
    }

    std::fill(active.begin(), active.end(), 0);
    for (int i : selected) active[i] = 1;
    for (int i = 0; i < n; ++i) {
      const TruncatedBeliefMDP& b = instance.bandits[i];
      if (active[i]) {
        ++out.activations[i];
        if (rng.uniform() < b.bandit().success_prob) {
          const int k = sample_index(b.states()[states[i]].probs,
                                     rng.uniform());
          states[i] = b.reset_index(k);
          continue;
        }
      }
      states[i] = b.passive_successor(states[i]);
    }
  }
  out.average = tail_sum / (horizon - burn_in);
  return out;
}

bool is_integral(double x) { return std::abs(x - std::round(x)) < 1e-9; }

}  // namespace

double RMABInstance::entropy_bound() const {
  double b = 0.0;
  for (const TruncatedBeliefMDP& mdp : bandits) {
    b = std::max(b, std::log2(static_cast<double>(
                        mdp.bandit().chain.n_states())));
  }
  return b;
}

RMABInstance RMABInstance::make(std::vector<TruncatedBeliefMDP> bandits, int m,
                                Criterion criterion, double beta,
                                std::vector<int> initial_states,
                                std::uint64_t seed) {
  const int n = static_cast<int>(bandits.size());
  if (m < 1 || m >= n) {
    throw Error(ErrorKind::kInvalidArgument,
                "need 1 <= m < M, got m=" + std::to_string(m) +
                    ", M=" + std::to_string(n));
  }
  if (criterion == Criterion::kDiscounted && !(beta >= 0.0 && beta < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "beta must be in [0, 1)");
  }
  if (initial_states.empty()) {
    initial_states.assign(n, TruncatedBeliefMDP::kEquilibriumIndex);
  }
  if (static_cast<int>(initial_states.size()) != n) {
    throw Error(ErrorKind::kDimensionMismatch,
                "one initial state per bandit required");
  }
  for (int i = 0; i < n; ++i) {
    if (initial_states[i] < 0 || initial_states[i] >= bandits[i].n_states()) {
      throw Error(ErrorKind::kIndexOutOfRange,
                  "initial state of bandit " + std::to_string(i));
    }
  }
  RMABInstance out;
  out.bandits = std::move(bandits);
  out.m = m;
  out.criterion = criterion;
  out.beta = criterion == Criterion::kDiscounted ? beta : 1.0;
  out.initial_states = std::move(initial_states);
  out.seed = seed;
  return out;
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kGainIndex: return "gain_index";
    case PolicyKind::kMyopic: return "myopic";
    case PolicyKind::kRoundRobin: return "round_robin";
    case PolicyKind::kOrRounded: return "or_rounded";
    case PolicyKind::kOrRelaxed: return "or_relaxed";
  }
  return "unknown";
}

PolicyKind policy_kind_from_string(const std::string& name) {
  for (PolicyKind k : {PolicyKind::kGainIndex, PolicyKind::kMyopic,
                       PolicyKind::kRoundRobin, PolicyKind::kOrRounded,
                       PolicyKind::kOrRelaxed}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown policy '" + name + "'");
}

bool needs_tables(PolicyKind kind) {
  return kind == PolicyKind::kGainIndex || kind == PolicyKind::kOrRounded ||
         kind == PolicyKind::kOrRelaxed;
}

std::unique_ptr<SchedulingPolicy> make_policy(const PolicySpec& spec,
                                              const RMABInstance& instance) {
  if (needs_tables(spec.kind)) check_tables(spec, instance);
  std::vector<std::vector<double>> scores;
  switch (spec.kind) {
    case PolicyKind::kGainIndex:
      for (const GainIndexTable& t : spec.tables) scores.push_back(t.indices);
      return std::make_unique<ScorePolicy>(instance.m, std::move(scores));
    case PolicyKind::kOrRounded:
      for (const GainIndexTable& t : spec.tables) {
        scores.push_back(activation_gains(t));
      }
      return std::make_unique<ScorePolicy>(instance.m, std::move(scores));
    case PolicyKind::kMyopic:
      for (const TruncatedBeliefMDP& b : instance.bandits) {
        scores.push_back(b.costs_passive());
      }
      return std::make_unique<ScorePolicy>(instance.m, std::move(scores));
    case PolicyKind::kRoundRobin:
      return std::make_unique<RoundRobinPolicy>(instance.n_bandits(),
                                                instance.m);
    case PolicyKind::kOrRelaxed:
      for (const GainIndexTable& t : spec.tables) {
        scores.push_back(activation_gains(t));
      }
      return std::make_unique<RelaxedPolicy>(std::move(scores));
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown policy kind");
}

SimResult simulate(const RMABInstance& instance, const PolicySpec& policy,
                   const SimOptions& options) {
  int horizon = options.horizon;
  if (horizon <= 0 && instance.criterion == Criterion::kDiscounted) {
    horizon = discounted_horizon(
        instance.beta, instance.entropy_bound() * instance.n_bandits());
  }
  if (horizon < 1) {
    throw Error(ErrorKind::kInvalidArgument, "horizon must be at least 1");
  }
  if (options.runs < 1) {
    throw Error(ErrorKind::kInvalidArgument, "runs must be at least 1");
  }
  if (!(options.burn_in_fraction >= 0.0 && options.burn_in_fraction < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "burn-in fraction must be in [0, 1)");
  }
  // Fails early on missing tables.
  make_policy(policy, instance);

  const int burn_in = static_cast<int>(options.burn_in_fraction * horizon);
  std::vector<std::vector<double>> or_gains;
  if (!policy.tables.empty()) {
    for (const GainIndexTable& t : policy.tables) {
      or_gains.push_back(activation_gains(t));
    }
  }

  std::vector<RunOutput> runs(options.runs);
  internal::parallel_for(options.runs, options.threads, [&](int r) {
    runs[r] = run_once(instance, policy, or_gains, horizon, burn_in,
                       options.record_activation_trace && r == 0,
                       static_cast<std::uint64_t>(r));
  });

  const int n = instance.n_bandits();
  SimResult out;
  out.policy = to_string(policy.kind);
  out.criterion = instance.criterion;
  out.n_bandits = n;
  out.m = instance.m;
  out.runs = options.runs;
  out.horizon = horizon;
  out.burn_in = burn_in;
  out.seed = instance.seed;
  out.beta = instance.beta;
  out.activation_frequency.assign(n, 0.0);
  out.mean_cost.assign(n, 0.0);
  const double slots = static_cast<double>(horizon) * options.runs;
  for (RunOutput& r : runs) {
    if (instance.criterion == Criterion::kDiscounted) {
      out.per_run_discounted.push_back(r.discounted);
    }
    out.per_run_average.push_back(r.average);
    for (int i = 0; i < n; ++i) {
      out.activation_frequency[i] += r.activations[i] / slots;
      out.mean_cost[i] += r.cost_sum[i] / slots;
    }
    out.or_exact_slots += r.or_slots;
    out.or_exact_matches += r.or_matches;
  }
  out.activation_trace = std::move(runs.front().trace);

  const std::vector<double>& values =
      instance.criterion == Criterion::kDiscounted ? out.per_run_discounted
                                                   : out.per_run_average;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) /
             static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stderr_mean = std::sqrt(ss / static_cast<double>(values.size() - 1) /
                                static_cast<double>(values.size()));
  }
  return out;
}

double evaluate_discounted(std::span<const double> costs, double beta) {
  double total = 0.0;
  double weight = 1.0;
  for (double c : costs) {
    total += weight * c;
    weight *= beta;
  }
  return total;
}

double evaluate_average(std::span<const double> costs, int burn_in) {
  if (burn_in < 0 || burn_in >= static_cast<int>(costs.size())) {
    throw Error(ErrorKind::kInvalidArgument,
                "burn-in must leave at least one slot");
  }
  double total = 0.0;
  for (std::size_t t = burn_in; t < costs.size(); ++t) total += costs[t];
  return total / static_cast<double>(costs.size() - burn_in);
}

int discounted_horizon(double beta, double cost_bound, double tail) {
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "beta must be in [0, 1)");
  }
  if (!(tail > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "tail must be positive");
  }
  int horizon = 1;
  double remainder = beta * cost_bound / (1.0 - beta);
  while (remainder >= tail) {
    remainder *= beta;
    ++horizon;
  }
  return horizon;
}

AsymptoticSweep asymptotic_sweep(const std::vector<SweepClass>& classes,
                                 double alpha, std::vector<int> m_list,
                                 Criterion criterion, const SimOptions& options,
                                 std::uint64_t seed) {
  if (classes.empty() || m_list.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "sweep needs at least one class and one M");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "alpha must be in (0, 1)");
  }
  double total = 0.0;
  for (const SweepClass& c : classes) {
    if (!(c.proportion > 0.0)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "class proportions must be positive");
    }
    total += c.proportion;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorKind::kInvalidArgument, "class proportions must sum to 1");
  }
  for (int big_m : m_list) {
    if (big_m < 2 || !is_integral(big_m * alpha)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "M * alpha is not an integer for M=" +
                      std::to_string(big_m));
    }
    for (const SweepClass& c : classes) {
      if (!is_integral(big_m * c.proportion)) {
        throw Error(ErrorKind::kInvalidArgument,
                    "M * q is not an integer for M=" + std::to_string(big_m));
      }
    }
  }

  auto replicate = [&](int big_m) {
    std::vector<int> cls;
    for (std::size_t k = 0; k < classes.size(); ++k) {
      const int count =
          static_cast<int>(std::lround(big_m * classes[k].proportion));
      cls.insert(cls.end(), count, static_cast<int>(k));
    }
    return cls;
  };
  const int m_small = *std::min_element(m_list.begin(), m_list.end());
  std::vector<LagrangeBandit> base;
  for (int k : replicate(m_small)) base.push_back({classes[k].mdp});
  const LagrangeProblem problem = LagrangeProblem::make(
      std::move(base), static_cast<int>(std::lround(m_small * alpha)),
      criterion);
  const double lambda = gradient_search(problem).lambda_star;

  AsymptoticSweep sweep;
  sweep.alpha = alpha;
  sweep.criterion = criterion;
  sweep.beta = criterion == Criterion::kDiscounted ? problem.beta : 1.0;
  sweep.lambda_star = lambda;

  std::vector<GainIndexTable> tables;
  double bound = 0.0;
  for (const SweepClass& c : classes) {
    sweep.proportions.push_back(c.proportion);
    const BanditSolution sol = solve_bandit({c.mdp}, criterion, lambda);
    bound += c.proportion * sol.value;
    tables.push_back(criterion == Criterion::kDiscounted
                         ? gain_indices_discounted(c.mdp, lambda,
                                                   sol.solution.actions)
                         : gain_indices_average(c.mdp, lambda,
                                                sol.solution.actions));
  }
  bound -= criterion == Criterion::kDiscounted
               ? alpha * lambda / (1.0 - problem.beta)
               : alpha * lambda;

  for (int big_m : m_list) {
    std::vector<TruncatedBeliefMDP> bandits;
    PolicySpec spec{PolicyKind::kGainIndex, {}};
    for (int k : replicate(big_m)) {
      bandits.push_back(classes[k].mdp);
      spec.tables.push_back(tables[k]);
    }
    const RMABInstance instance = RMABInstance::make(
        std::move(bandits), static_cast<int>(std::lround(big_m * alpha)),
        criterion, sweep.beta, {},
        seed ^ (static_cast<std::uint64_t>(big_m) << 32));
    const SimResult result = simulate(instance, spec, options);
    AsymptoticPoint p;
    p.n_bandits = big_m;
    p.m = instance.m;
    p.policy_per_bandit = result.mean / big_m;
    p.policy_stderr = result.stderr_mean / big_m;
    p.bound_per_bandit = bound;
    p.gap = p.policy_per_bandit - p.bound_per_bandit;
    sweep.points.push_back(p);
  }
  return sweep;
}

}  // namespace uoi
