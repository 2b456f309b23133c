// Copyright 2026 The safewalk Authors
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

#include <doctest.h>

#include <random>

#include "qp_oracles.hpp"
#include "safewalk/qp_solver.hpp"

using namespace safewalk;
using safewalk::testing::brute_force_objective;
using safewalk::testing::kkt_direct;
using safewalk::testing::random_qp;

TEST_CASE("active upper bound at the origin") {
  QpProblemd p;
  p.P = MatXd::Constant(1, 1, 2.0);
  p.q = VecXd::Constant(1, -2.0);
  p.G = MatXd::Constant(1, 1, 1.0);
  p.h = VecXd::Zero(1);
  const auto s = solve(p);
  REQUIRE(s.ok());
  CHECK(s.z[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s.mu[0] == doctest::Approx(2.0));
  CHECK(s.active_set == std::vector<int>{0});
}

TEST_CASE("box bounds report their own multipliers") {
  QpProblemd p;
  p.P = MatXd::Identity(2, 2);
  p.q = Eigen::Vector2d(-3.0, 3.0);
  p.lb = Eigen::Vector2d(-1.0, -1.0);
  p.ub = Eigen::Vector2d(1.0, 1.0);
  const auto s = solve(p);
  REQUIRE(s.ok());
  CHECK(s.z.isApprox(Eigen::Vector2d(1.0, -1.0)));
  CHECK(s.mu_ub[0] == doctest::Approx(2.0));
  CHECK(s.mu_lb[1] == doctest::Approx(2.0));
  CHECK(s.mu_ub[1] == doctest::Approx(0.0));
}

TEST_CASE("equality-only problems match a direct KKT solve") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 8;
    const auto p = random_qp(rng, n, std::max(1, n / 2), 0, false);
    const auto s = solve(p);
    REQUIRE(s.ok());
    const VecXd ref = kkt_direct(p.P, p.q, p.A_eq, p.b_eq);
    CHECK((s.z - ref).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("random problems agree with active-set enumeration") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 4;
    const auto p = random_qp(rng, n, trial % 2, 4, trial % 3 == 0);
    const auto s = solve(p);
    REQUIRE(s.ok());
    CHECK(s.kkt.max() <= 1e-8);
    const auto best = brute_force_objective(p);
    REQUIRE(best.has_value());
    CHECK(std::abs(s.objective(p) - *best) <= 1e-4);
  }
}

TEST_CASE("infeasible constraints are certified") {
  QpProblemd p;
  p.P = MatXd::Identity(2, 2);
  p.q = VecXd::Zero(2);
  p.G.resize(2, 2);
  p.G << 1, 0, -1, 0;
  p.h = Eigen::Vector2d(-1.0, -1.0);  // z0 <= -1 and z0 >= 1
  const auto s = solve(p);
  CHECK(s.status == QpStatus::Infeasible);
  CHECK(s.kkt.primal > 0.5);

  QpProblemd e;
  e.P = MatXd::Identity(2, 2);
  e.q = VecXd::Zero(2);
  e.A_eq.resize(2, 2);
  e.A_eq << 1, 1, 2, 2;
  e.b_eq = Eigen::Vector2d(1.0, 3.0);
  CHECK(solve(e).status == QpStatus::Infeasible);
}

TEST_CASE("redundant equality rows are tolerated") {
  QpProblemd e;
  e.P = MatXd::Identity(2, 2);
  e.q = VecXd::Zero(2);
  e.A_eq.resize(2, 2);
  e.A_eq << 1, 1, 2, 2;
  e.b_eq = Eigen::Vector2d(1.0, 2.0);
  const auto s = solve(e);
  REQUIRE(s.ok());
  CHECK(s.z.isApprox(Eigen::Vector2d(0.5, 0.5)));
}

TEST_CASE("iteration cap is reported with residuals") {
  std::mt19937_64 rng(4);
  const auto p = random_qp(rng, 6, 0, 12, false);
  QpSettingsd settings;
  settings.max_iter = 0;
  const auto s = solve(p, settings);
  if (!s.active_set.empty() || s.status != QpStatus::Optimal) {
    CHECK(s.status == QpStatus::MaxIter);
  }
}

TEST_CASE("semidefinite cost through the proximal loop") {
  // min z1^2 + z2  s.t. 1 <= z2 <= 2
  QpProblemd p;
  p.P = MatXd::Zero(2, 2);
  p.P(0, 0) = 2.0;
  p.q = Eigen::Vector2d(0.0, 1.0);
  p.lb = Eigen::Vector2d(-INFINITY, 1.0);
  p.ub = Eigen::Vector2d(INFINITY, 2.0);
  const auto s = solve(p);
  REQUIRE(s.ok());
  CHECK(s.z[1] == doctest::Approx(1.0));
  CHECK(std::abs(s.z[0]) < 1e-8);
  CHECK(s.mu_lb[1] == doctest::Approx(1.0));
}

TEST_CASE("scaling the cost leaves the minimizer unchanged") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    auto p = random_qp(rng, 5, 1, 5, true);
    const auto a = solve(p);
    p.P *= 37.5;
    p.q *= 37.5;
    const auto b = solve(p);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK((a.z - b.z).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
}

TEST_CASE("warm start returns the cold-start optimum") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_qp(rng, 6, 1, 8, trial % 2 == 0);
    const auto cold = solve(p);
    REQUIRE(cold.ok());
    QpSettingsd ws;
    ws.warm_start = cold.active_set;
    const auto warm = solve(p, ws);
    REQUIRE(warm.ok());
    CHECK((warm.z - cold.z).lpNorm<Eigen::Infinity>() <= 1e-8);

    // A wrong guess falls back to the cold path.
    ws.warm_start = std::vector<int>{0, 1, 2, 3, 4};
    const auto wrong = solve(p, ws);
    REQUIRE(wrong.ok());
    CHECK((wrong.z - cold.z).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
}

TEST_CASE("identical inputs give bit-identical outputs") {
  std::mt19937_64 rng(17);
  const auto p = random_qp(rng, 8, 2, 10, true);
  const auto a = solve(p);
  const auto b = solve(p);
  CHECK(a.z == b.z);
  CHECK(a.mu == b.mu);
  CHECK(a.lambda == b.lambda);
}

TEST_CASE("inconsistent dimensions are rejected") {
  QpProblemd p;
  p.P = MatXd::Identity(2, 2);
  p.q = VecXd::Zero(3);
  CHECK_THROWS_AS(solve(p), InvalidArgument);
}
