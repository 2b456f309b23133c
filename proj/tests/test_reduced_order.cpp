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

#include "safewalk/reduced_order.hpp"

using namespace safewalk;

TEST_CASE("dynamics is the integrator chain") {
  ReducedStated x;
  auto d = dynamics(x, Vec2d(0, 0));
  CHECK(d.dphi.isZero());
  CHECK(d.dphidot.isZero());

  x.phidot = Vec2d(1, 0);
  d = dynamics(x, Vec2d(0, 2));
  CHECK(d.dphi == Vec2d(1, 0));
  CHECK(d.dphidot == Vec2d(0, 2));
}

TEST_CASE("step: closed-form double integrator") {
  ReducedStated x;
  auto y = step(x, Vec2d(1, 0), 1.0);
  CHECK(y.phi == Vec2d(0.5, 0));
  CHECK(y.phidot == Vec2d(1, 0));

  x.phi = Vec2d(1, 2);
  x.phidot = Vec2d(-0.5, 0.25);
  y = step(x, Vec2d::Zero(), 0.4);
  CHECK(y.phi.isApprox(Vec2d(0.8, 2.1)));
  CHECK(y.phidot == x.phidot);

  CHECK_THROWS_AS(step(x, Vec2d::Zero(), 0.0), InvalidArgument);
  CHECK_THROWS_AS(step(x, Vec2d::Zero(), -1.0), InvalidArgument);
}

TEST_CASE("step is exact under piecewise-constant input") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    ReducedStated x;
    x.phi = Vec2d(u(rng), u(rng));
    x.phidot = Vec2d(u(rng), u(rng));
    const Vec2d nu(u(rng), u(rng));
    const auto one = step(x, nu, 1.0);
    auto many = x;
    for (int k = 0; k < 100; ++k) many = step(many, nu, 0.01);
    CHECK((one.phi - many.phi).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK((one.phidot - many.phidot).lpNorm<Eigen::Infinity>() < 1e-12);

    const auto two = step(step(x, nu, 0.5), nu, 0.5);
    CHECK((one.phi - two.phi).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("nominal_controller") {
  ReducedStated x, xd;
  x.phi = Vec2d(0.3, -0.2);
  xd = x;
  CHECK(nominal_controller(x, xd, PdGainsd{4, 4}).isZero());

  ReducedStated origin;
  ReducedStated goal;
  goal.phi = Vec2d(1, 0);
  CHECK(nominal_controller(origin, goal, PdGainsd{1, 0}) == Vec2d(1, 0));

  // Linear in the error state.
  x.phidot = Vec2d(0.1, 0.7);
  goal.phidot = Vec2d(-0.2, 0.05);
  const Vec2d base = nominal_controller(x, goal, PdGainsd{2.5, 1.5});
  ReducedStated scaled = x;
  scaled.phi = goal.phi - 3.0 * (goal.phi - x.phi);
  scaled.phidot = goal.phidot - 3.0 * (goal.phidot - x.phidot);
  CHECK((nominal_controller(scaled, goal, PdGainsd{2.5, 1.5}) - 3.0 * base).norm() < 1e-12);
}

TEST_CASE("closed loop with kp = kd = 4 settles within 10 s") {
  ReducedStated x;
  ReducedStated goal;
  goal.phi = Vec2d(1.0, -0.5);
  const double dt = 1e-3;
  for (int k = 0; k < 10000; ++k) {
    x = step(x, nominal_controller(x, goal, PdGainsd{4, 4}), dt);
  }
  CHECK((x.phi - goal.phi).norm() < 1e-3);
}
