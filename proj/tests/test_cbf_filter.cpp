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

#include <numbers>
#include <random>

#include "safewalk/cbf_filter.hpp"

using namespace safewalk;

namespace {

EllipseCbfd unit_circle() { return build_ellipse_cbf(Ellipsed(Vec2d(0, 0), 1.0, 1.0)); }

ReducedStated at(double x, double y, double vx = 0, double vy = 0) {
  ReducedStated s;
  s.phi = Vec2d(x, y);
  s.phidot = Vec2d(vx, vy);
  return s;
}

EllipseCbfd random_cbf(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return build_ellipse_cbf(Ellipsed(Vec2d(2 * u(rng) - 1, 2 * u(rng) - 1), 0.1 + u(rng),
                                    0.1 + u(rng), std::numbers::pi * (2 * u(rng) - 1)));
}

}  // namespace

TEST_CASE("build_ellipse_cbf: unit circle and axis ellipse") {
  const auto c = unit_circle();
  CHECK(c.A.isApprox(Mat2d::Identity()));
  CHECK(c.B.isZero());
  CHECK(c.c == doctest::Approx(-1.0));

  const auto e = build_ellipse_cbf(Ellipsed(Vec2d(0, 0), 2.0, 1.0));
  CHECK(e.A.isApprox(Eigen::Vector2d(0.25, 1.0).asDiagonal().toDenseMatrix()));
  CHECK(std::abs(h_value(e, Vec2d(2, 0))) < 1e-15);
}

TEST_CASE("build_ellipse_cbf: a quarter turn swaps the semi-axes") {
  const auto r = build_ellipse_cbf(Ellipsed(Vec2d(0.3, -0.2), 2.0, 1.0, std::numbers::pi / 2));
  const auto s = build_ellipse_cbf(Ellipsed(Vec2d(0.3, -0.2), 1.0, 2.0, 0.0));
  CHECK((r.A - s.A).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((r.B - s.B).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(std::abs(r.c - s.c) < 1e-12);
}

TEST_CASE("h_value") {
  const auto c = unit_circle();
  CHECK(h_value(c, Vec2d(2, 0)) == doctest::Approx(3.0));
  CHECK(h_value(c, Vec2d(0, 0)) == doctest::Approx(-1.0));

  const auto path = build_ellipse_cbf(Ellipsed(Vec2d(0.5, 0.0), 0.19, 0.31));
  CHECK(h_value(path, Vec2d(0.5, 0.0)) == doctest::Approx(-1.0));
  CHECK(std::abs(h_value(path, Vec2d(0.69, 0.0))) < 1e-12);

  // Expanded form x'Ax + Bx + c agrees with the centered form.
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 100; ++k) {
    const auto cbf = random_cbf(rng);
    const Vec2d p(u(rng), u(rng));
    const double expanded = p.dot(cbf.A * p) + cbf.B.dot(p) + cbf.c;
    CHECK(std::abs(expanded - h_value(cbf, p)) < 1e-9 * (1 + std::abs(expanded)));
  }
}

TEST_CASE("ellipse through edge midpoints leaves the corners outside") {
  const auto manway = RectRegiond::axis_aligned(Vec2d(0.5, 0.0), 0.381, 0.56);
  const auto cbf = build_ellipse_cbf(ellipse_from_rect(manway, 1.0));
  for (int i = 0; i < 4; ++i) {
    const Vec2d mid = (manway.vertex(i) + manway.vertex(i + 1)) / 2;
    CHECK(std::abs(h_value(cbf, mid)) < 1e-9);
    // Corner lies at normalized radius sqrt(2): h = 2 - 1.
    CHECK(h_value(cbf, manway.vertex(i)) == doctest::Approx(1.0));
  }
}

TEST_CASE("h_gradient") {
  const auto c = unit_circle();
  CHECK(h_gradient(c, Vec2d(1, 0)).isApprox(Vec2d(2, 0)));
  const auto e = build_ellipse_cbf(Ellipsed(Vec2d(0.4, 0.1), 0.3, 0.7, 0.5));
  CHECK(h_gradient(e, Vec2d(0.4, 0.1)).norm() < 1e-14);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 500; ++k) {
    const auto cbf = random_cbf(rng);
    const Vec2d p(u(rng), u(rng));
    const double step = 1e-6;
    Vec2d fd;
    for (int i = 0; i < 2; ++i) {
      Vec2d dp = Vec2d::Zero();
      dp[i] = step;
      fd[i] = (h_value(cbf, p + dp) - h_value(cbf, p - dp)) / (2 * step);
    }
    const Vec2d g = h_gradient(cbf, p);
    CHECK((g - fd).norm() <= 1e-6 * std::max(1.0, g.norm()));
  }
}

TEST_CASE("filter_qp: inactive row is the identity") {
  const auto c = unit_circle();
  const Vec2d nu_d(0.3, -0.2);
  const Vec2d out = filter_qp(c, at(2, 0), nu_d, ClassKappad{1.0}, FilterConfigd{});
  CHECK(out == nu_d);
  CHECK(filter_closed_form(c, at(2, 0), nu_d, ClassKappad{1.0}, FilterConfigd{}) == nu_d);
}

TEST_CASE("filter: single active row") {
  const auto c = unit_circle();
  const auto x = at(1.5, 0);
  const Vec2d nu_d(-10, 0);
  const Vec2d expected(-1.25 / 3.0, 0.0);
  const Vec2d qp = filter_qp(c, x, nu_d, ClassKappad{1.0}, FilterConfigd{});
  const Vec2d cf = filter_closed_form(c, x, nu_d, ClassKappad{1.0}, FilterConfigd{});
  CHECK((qp - expected).lpNorm<Eigen::Infinity>() < 1e-8);
  CHECK((cf - expected).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("filter: QP and closed form agree on random instances") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2, 2);
  std::uniform_real_distribution<double> a(0.1, 5.0);
  for (int k = 0; k < 2000; ++k) {
    const auto cbf = random_cbf(rng);
    FilterConfigd cfg;
    cfg.mode = (k % 2) ? FilterMode::Kinematic : FilterMode::ExtendedDegree2;
    cfg.lambda = a(rng);
    const auto x = at(u(rng), u(rng), u(rng), u(rng));
    const Vec2d nu_d(3 * u(rng), 3 * u(rng));
    const ClassKappad alpha{a(rng)};
    const auto row = cbf_row(cbf, x, alpha, cfg);
    if (row.a.norm() < 1e-9) continue;
    const Vec2d qp = filter_qp(cbf, x, nu_d, alpha, cfg);
    const Vec2d cf = filter_closed_form(cbf, x, nu_d, alpha, cfg);
    CHECK((qp - cf).lpNorm<Eigen::Infinity>() <= 1e-8);
    CHECK(row.residual(qp) >= -1e-8);
  }
}

TEST_CASE("filter output is the closest admissible input") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 200; ++k) {
    const auto cbf = random_cbf(rng);
    const auto x = at(u(rng), u(rng));
    const Vec2d nu_d(3 * u(rng), 3 * u(rng));
    const ClassKappad alpha{1.5};
    const auto row = cbf_row(cbf, x, alpha, FilterConfigd{});
    const Vec2d safe = filter_qp(cbf, x, nu_d, alpha, FilterConfigd{});
    for (int j = 0; j < 200; ++j) {
      const Vec2d cand(5 * u(rng), 5 * u(rng));
      if (row.residual(cand) < 0) continue;
      CHECK((safe - nu_d).norm() <= (cand - nu_d).norm() + 1e-12);
    }
  }
}

TEST_CASE("closed form: vanishing gradient") {
  const auto c = unit_circle();
  // At the center with the kinematic row: h = -1, row 0 >= alpha0.
  CHECK_THROWS_AS(filter_closed_form(c, at(0, 0), Vec2d(1, 0), ClassKappad{1.0}, FilterConfigd{}),
                  Infeasible);
  // Extended row at the center with a fast base: b <= 0, vacuous.
  FilterConfigd ext;
  ext.mode = FilterMode::ExtendedDegree2;
  ext.lambda = 1.0;
  const Vec2d nu_d(0.2, 0.1);
  CHECK(filter_closed_form(c, at(0, 0, 3, 0), nu_d, ClassKappad{1.0}, ext) == nu_d);
  CHECK_THROWS_AS(filter_closed_form(c, at(2, 0), nu_d, ClassKappad{1.0},
                                     FilterConfigd{FilterMode::Kinematic, 1.0,
                                                   InputBox<double>{Vec2d(-1, -1), Vec2d(1, 1)}}),
                  InvalidArgument);
}

TEST_CASE("filter_qp: bounds that exclude every safe input are infeasible") {
  const auto c = unit_circle();
  FilterConfigd cfg;
  // Inside the ellipse the row demands outward motion of at least alpha0 |h|.
  cfg.input_bounds = InputBox<double>{Vec2d(-0.01, -0.01), Vec2d(0.01, 0.01)};
  CHECK_THROWS_AS(filter_qp(c, at(0.5, 0), Vec2d(0, 0), ClassKappad{10.0}, cfg), Infeasible);

  // Bounds that still admit a safe input are respected.
  cfg.input_bounds = InputBox<double>{Vec2d(-0.3, -0.3), Vec2d(0.3, 0.3)};
  const Vec2d out = filter_qp(c, at(1.5, 0), Vec2d(-10, 5), ClassKappad{1.0}, cfg);
  CHECK(out.maxCoeff() <= 0.3 + 1e-12);
  CHECK(out.minCoeff() >= -0.3 - 1e-12);
  CHECK(cbf_row(c, at(1.5, 0), ClassKappad{1.0}, cfg).residual(out) >= -1e-8);
}

TEST_CASE("evaluate_gait_region") {
  const auto gait = build_ellipse_cbf(Ellipsed(Vec2d(0.5, 0.0), 0.49, 0.88));
  CHECK(std::abs(evaluate_gait_region(gait, Vec2d(0.99, 0.0))) < 1e-12);
  CHECK(evaluate_gait_region(gait, Vec2d(0.0, 0.0)) ==
        doctest::Approx(0.25 / (0.49 * 0.49) - 1.0));
  CHECK(evaluate_gait_region(gait, Vec2d(0.0, 0.0)) > 0.0);
  CHECK(evaluate_gait_region(gait, Vec2d(10, 10)) > 100.0);
}

TEST_CASE("kinematic filter keeps the safe set forward invariant") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int run = 0; run < 40; ++run) {
    const auto cbf = random_cbf(rng);
    const Ellipsed& e = cbf.source;
    // Start outside, goal inside: the nominal controller drives into the set.
    const double ang = 2 * std::numbers::pi * u(rng);
    Vec2d start = e.center + 3.0 * std::max(e.a, e.b) * Vec2d(std::cos(ang), std::sin(ang));
    const Vec2d goal = e.center + 0.3 * e.a * Vec2d(u(rng), u(rng));
    const ClassKappad alpha{2.0};
    ReducedStated x = at(start.x(), start.y());
    double min_h = h_value(cbf, x.phi);
    const double dt = 0.01;
    for (int k = 0; k < 1000; ++k) {
      // Rotational term keeps the nominal input Lipschitz but non-radial.
      const Vec2d err = goal - x.phi;
      const Vec2d nu_d = 1.5 * err + 0.5 * Vec2d(-err.y(), err.x());
      const Vec2d nu = filter_qp(cbf, x, nu_d, alpha, FilterConfigd{});
      x.phi += nu * dt;
      min_h = std::min(min_h, h_value(cbf, x.phi));
    }
    CHECK(min_h >= -1e-6);
  }
}

TEST_CASE("extended-degree filter keeps a double integrator safe") {
  const auto cbf = build_ellipse_cbf(Ellipsed(Vec2d(0.5, 0.0), 0.19, 0.31));
  FilterConfigd cfg;
  cfg.mode = FilterMode::ExtendedDegree2;
  cfg.lambda = 2.0;
  ReducedStated x;
  ReducedStated goal;
  goal.phi = Vec2d(1.0, 0.02);
  double min_h = h_value(cbf, x.phi);
  const double dt = 1e-3;
  for (int k = 0; k < 8000; ++k) {
    const Vec2d nu_d = nominal_controller(x, goal, PdGainsd{4.0, 4.0});
    const Vec2d nu = filter_qp(cbf, x, nu_d, ClassKappad{2.0}, cfg);
    x = step(x, nu, dt);
    min_h = std::min(min_h, h_value(cbf, x.phi));
  }
  CHECK(min_h >= -1e-4);
}
