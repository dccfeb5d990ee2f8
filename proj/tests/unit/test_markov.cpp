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

#include <random>

#include "doctest.h"
#include "support/oracles.hpp"
#include "uoi/error.hpp"
#include "uoi/markov.hpp"

namespace {

using uoi::BeliefState;
using uoi::ErrorKind;

ErrorKind kind_of(const Eigen::MatrixXd& m) {
  try {
    uoi::validate_chain(m);
  } catch (const uoi::Error& e) {
    return e.kind();
  }
  FAIL("chain was accepted");
  return ErrorKind::kInvalidArgument;
}

BeliefState belief(std::initializer_list<double> v) {
  Eigen::VectorXd x(v.size());
  int i = 0;
  for (double p : v) x(i++) = p;
  return BeliefState::checked(x);
}

}  // namespace

TEST_CASE("two-state chain equilibrium matches a direct solve") {
  const auto chain = uoi::validate_chain(oracle::sticky_pair_matrix());
  // omega = T omega, sum = 1: 0.01 w0 = 0.3 w1.
  const double w1 = 0.01 / 0.31;
  CHECK(chain.equilibrium()(0) == doctest::Approx(1.0 - w1).epsilon(1e-12));
  CHECK(chain.equilibrium()(1) == doctest::Approx(w1).epsilon(1e-12));
  CHECK(chain.equilibrium()(0) == doctest::Approx(0.9677).epsilon(1e-4));
  const Eigen::VectorXd moved = chain.transition() * chain.equilibrium();
  CHECK(uoi::max_norm_distance(moved, chain.equilibrium()) < 1e-10);
}

TEST_CASE("equilibrium agrees with power iteration on random chains") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    const Eigen::MatrixXd t = oracle::random_matrix(gen, n);
    const auto chain = uoi::validate_chain(t);
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
    for (int i = 0; i < 2000; ++i) x = t * x;
    CHECK(uoi::max_norm_distance(x, chain.equilibrium()) < 1e-10);
  }
}

TEST_CASE("structural rejections") {
  CHECK(kind_of(Eigen::MatrixXd::Identity(2, 2)) == ErrorKind::kReducible);
  Eigen::MatrixXd bad(2, 2);
  bad << 0.5, 0.3, 0.6, 0.7;
  CHECK(kind_of(bad) == ErrorKind::kNotStochastic);
  Eigen::MatrixXd swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  CHECK(kind_of(swap) == ErrorKind::kPeriodic);
  Eigen::MatrixXd negative(2, 2);
  negative << 1.1, 0.3, -0.1, 0.7;
  CHECK_THROWS_AS(uoi::validate_chain(negative), uoi::Error);
  CHECK(kind_of(Eigen::MatrixXd::Ones(1, 1)) == ErrorKind::kInvalidArgument);
  CHECK(kind_of(Eigen::MatrixXd::Constant(2, 3, 0.5)) ==
        ErrorKind::kInvalidArgument);
  // Three-cycle with a self-loop somewhere is aperiodic.
  Eigen::MatrixXd cyc(3, 3);
  cyc << 0.0, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, 1.0, 0.5;
  CHECK_NOTHROW(uoi::validate_chain(cyc));
  cyc << 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0;
  CHECK(kind_of(cyc) == ErrorKind::kPeriodic);
}

TEST_CASE("small column-sum slack is renormalized") {
  Eigen::MatrixXd t = oracle::sticky_pair_matrix();
  t(0, 0) += 5e-10;
  const auto chain = uoi::validate_chain(t);
  CHECK(chain.transition().col(0).sum() == doctest::Approx(1.0).epsilon(1e-15));
  t(0, 0) += 1e-8;
  CHECK(kind_of(t) == ErrorKind::kNotStochastic);
}

TEST_CASE("entropy values") {
  CHECK(uoi::entropy(belief({0.5, 0.5})) == doctest::Approx(1.0));
  CHECK(uoi::entropy(belief({1.0, 0.0, 0.0})) == 0.0);
  CHECK(uoi::entropy(belief({0.3, 0.7})) ==
        doctest::Approx(0.881290899230693).epsilon(1e-12));
  CHECK(uoi::entropy(belief({0.3, 0.7})) ==
        doctest::Approx(oracle::entropy_bits({0.3, 0.7})).epsilon(1e-14));
}

TEST_CASE("belief propagation and reset on the two-state chain") {
  const auto chain = uoi::validate_chain(oracle::sticky_pair_matrix());
  const auto a = uoi::belief_propagate(chain, belief({0.0, 1.0}));
  CHECK(a.probs(0) == doctest::Approx(0.3));
  const auto b = uoi::belief_propagate(chain, belief({0.3, 0.7}));
  CHECK(b.probs(0) == doctest::Approx(0.507).epsilon(1e-12));
  CHECK(b.probs(1) == doctest::Approx(0.493).epsilon(1e-12));
  const auto w = uoi::belief_propagate(
      chain, BeliefState::checked(chain.equilibrium()));
  CHECK(uoi::max_norm_distance(w.probs, chain.equilibrium()) < 1e-15);

  CHECK(uoi::belief_reset(chain, 1).probs(0) == doctest::Approx(0.3));
  CHECK(uoi::belief_reset(chain, 0).probs(0) == doctest::Approx(0.99));
  CHECK_THROWS_AS(uoi::belief_reset(chain, 2), uoi::Error);
  CHECK_THROWS_AS(uoi::belief_propagate(chain, belief({0.2, 0.3, 0.5})),
                  uoi::Error);
}

TEST_CASE("n-step columns") {
  const auto chain = uoi::validate_chain(oracle::sticky_pair_matrix());
  CHECK(uoi::max_norm_distance(uoi::n_step_column(chain, 1, 1).probs,
                               uoi::belief_reset(chain, 1).probs) == 0.0);
  const auto two = uoi::n_step_column(chain, 1, 2);
  CHECK(two.probs(0) == doctest::Approx(0.507).epsilon(1e-12));
  const auto far = uoi::n_step_column(chain, 0, 3000);
  CHECK(uoi::max_norm_distance(far.probs, chain.equilibrium()) < 1e-8);
  CHECK_THROWS_AS(uoi::n_step_column(chain, 0, 0), uoi::Error);
}

TEST_CASE("uoi is the entropy of the propagated belief") {
  const auto chain = uoi::validate_chain(oracle::sticky_pair_matrix());
  CHECK(uoi::uoi(chain, belief({0.0, 1.0})) ==
        doctest::Approx(0.881290899230693).epsilon(1e-12));
  CHECK(uoi::uoi(chain, belief({1.0, 0.0})) ==
        doctest::Approx(oracle::entropy_bits({0.99, 0.01})).epsilon(1e-12));
  CHECK(uoi::uoi(chain, belief({1.0, 0.0})) == doctest::Approx(0.08079).epsilon(1e-4));
  const BeliefState w = BeliefState::checked(chain.equilibrium());
  CHECK(uoi::uoi(chain, w) == doctest::Approx(uoi::entropy(w)));
}

TEST_CASE("propagated columns stay stochastic and converge") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto chain = uoi::validate_chain(oracle::random_matrix(gen, 3));
    double prev = 1e9;
    for (int n = 1; n <= 50; ++n) {
      const auto x = uoi::n_step_column(chain, trial % 3, n);
      CHECK(x.probs.sum() == doctest::Approx(1.0).epsilon(1e-10));
      const double d = uoi::l1_distance(x.probs, chain.equilibrium());
      CHECK(d <= prev + 1e-15);
      prev = d;
    }
  }
}

TEST_CASE("entropy is concave on the simplex") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd x(4), y(4);
    for (int i = 0; i < 4; ++i) {
      x(i) = u(gen);
      y(i) = u(gen);
    }
    x /= x.sum();
    y /= y.sum();
    const double th = u(gen);
    CHECK(uoi::entropy(Eigen::VectorXd(th * x + (1 - th) * y)) >=
          th * uoi::entropy(x) + (1 - th) * uoi::entropy(y) - 1e-12);
  }
}

TEST_CASE("symmetric binary chain makes uncertainty a function of age") {
  Eigen::MatrixXd t(2, 2);
  t << 0.8, 0.2, 0.2, 0.8;
  const auto chain = uoi::validate_chain(t);
  for (int n = 1; n <= 20; ++n) {
    CHECK(uoi::uoi(chain, uoi::n_step_column(chain, 0, n)) ==
          doctest::Approx(uoi::uoi(chain, uoi::n_step_column(chain, 1, n)))
              .epsilon(1e-14));
  }
}
