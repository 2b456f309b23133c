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

#include "safewalk/foothold_replanner.hpp"

using namespace safewalk;

namespace {

RectRegiond unit_square() {
  return RectRegiond({Vec2d(0, 0), Vec2d(1, 0), Vec2d(1, 1), Vec2d(0, 1)});
}

// Nearest point among `per_edge` evenly spaced samples on each outline edge.
std::pair<double, Vec2d> grid_nearest(const RectRegiond& r, const Vec2d& p, int per_edge) {
  double best = std::numeric_limits<double>::infinity();
  Vec2d arg;
  for (int e = 0; e < 4; ++e) {
    const Vec2d a = r.vertex(e);
    const Vec2d b = r.vertex(e + 1);
    for (int k = 0; k <= per_edge; ++k) {
      const Vec2d q = a + (b - a) * (static_cast<double>(k) / per_edge);
      const double d = (p - q).norm();
      if (d < best) {
        best = d;
        arg = q;
      }
    }
  }
  return {best, arg};
}

// Distance from an outside point to the rectangle, in the rectangle's frame.
double outside_distance(const RectRegiond& r, const Vec2d& p) {
  const Vec2d c = r.centroid();
  const Vec2d ex = (r.vertex(1) - r.vertex(0)).normalized();
  const Vec2d ey(-ex.y(), ex.x());
  const double hw = (r.vertex(1) - r.vertex(0)).norm() / 2;
  const double hh = (r.vertex(2) - r.vertex(1)).norm() / 2;
  const double dx = std::max(std::abs((p - c).dot(ex)) - hw, 0.0);
  const double dy = std::max(std::abs((p - c).dot(ey)) - hh, 0.0);
  return std::hypot(dx, dy);
}

RectRegiond random_rect(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Vec2d c(2 * u(rng) - 1, 2 * u(rng) - 1);
  const double w = 0.2 + u(rng);
  const double h = 0.2 + u(rng);
  const Eigen::Rotation2Dd rot(std::numbers::pi * u(rng));
  return RectRegiond({c + rot * Vec2d(-w / 2, -h / 2), c + rot * Vec2d(w / 2, -h / 2),
                      c + rot * Vec2d(w / 2, h / 2), c + rot * Vec2d(-w / 2, h / 2)});
}

Vec2d random_interior(std::mt19937_64& rng, const RectRegiond& r) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Vec2d e1 = r.vertex(1) - r.vertex(0);
  const Vec2d e2 = r.vertex(3) - r.vertex(0);
  return r.vertex(0) + u(rng) * e1 + u(rng) * e2;
}

}  // namespace

TEST_CASE("locate_subregion") {
  const auto sq = unit_square();
  CHECK(locate_subregion(sq, Vec2d(0.1, 0.1)) == 0);
  CHECK(locate_subregion(sq, Vec2d(0.9, 0.1)) == 1);
  CHECK(locate_subregion(sq, Vec2d(0.9, 0.9)) == 2);
  CHECK(locate_subregion(sq, Vec2d(0.1, 0.9)) == 3);
  CHECK(locate_subregion(sq, Vec2d(0.5, 0.5)) == 0);
  CHECK_THROWS_AS(locate_subregion(sq, Vec2d(1.5, 0.5)), NotInRegion);

  std::mt19937_64 rng(5);
  for (int k = 0; k < 1000; ++k) {
    const auto r = random_rect(rng);
    const Vec2d p = random_interior(rng, r);
    const int s = locate_subregion(r, p);
    CHECK(partition_subregions(r)[static_cast<std::size_t>(s)].contains(p));
  }
}

TEST_CASE("project_to_boundary against a boundary grid") {
  const auto sq = unit_square();
  for (const Vec2d p : {Vec2d(0.9, 0.5), Vec2d(0.5, 0.02)}) {
    const Vec2d proj = project_to_boundary(sq, p, locate_subregion(sq, p));
    const auto [d, arg] = grid_nearest(sq, p, 2500);
    CHECK((proj - arg).norm() <= 1e-3);
    CHECK(std::abs((proj - p).norm() - d) <= 1e-3);
  }
  CHECK(project_to_boundary(sq, Vec2d(0.9, 0.5), 1).isApprox(Vec2d(1.0, 0.5)));
  CHECK(project_to_boundary(sq, Vec2d(0.5, 0.02), 0).isApprox(Vec2d(0.5, 0.0)));
  const Vec2d on(1.0, 0.3);
  CHECK(project_to_boundary(sq, on, locate_subregion(sq, on)) == on);
}

TEST_CASE("replan: outside footholds are returned untouched") {
  const auto sq = unit_square();
  const Vec2d x(2, 2);
  const auto r = replan(sq, FootholdQueryd{x, Vec2d(2, 2), 1.0}, 0.1);
  CHECK_FALSE(r.was_replanned);
  CHECK(r.x_f_safe == x);
  CHECK_THROWS_AS(replan(sq, FootholdQueryd{x, x, 1.0}, 0.0), InvalidArgument);
}

TEST_CASE("replan: margin past the nearest edge") {
  const auto sq = unit_square();
  const auto r = replan(sq, FootholdQueryd{Vec2d(0.9, 0.5), Vec2d(0.9, 0.5), 10.0}, 0.1);
  CHECK(r.was_replanned);
  CHECK_FALSE(r.used_fallback_edge);
  CHECK((r.x_f_safe - Vec2d(1.01, 0.5)).norm() < 1e-12);
  CHECK_FALSE(hull_contains(sq, r.x_f_safe));
}

TEST_CASE("replan: falls back to the other edge when out of reach") {
  const auto sq = unit_square();
  // Quadrant of (0.9, 0.5) by tie-break is s = 1 (corner (1, 0)); its edges are
  // x = 1 (nearest, candidate (1.01, 0.5)) and y = 0 (candidate (0.9, -0.05)).
  const Vec2d x_f(0.9, 0.5);
  const Vec2d hip(0.9, -0.3);
  // |(1.01, 0.5) - hip| ~ 0.8076, |(0.9, -0.05) - hip| = 0.25.
  const auto r = replan(sq, FootholdQueryd{x_f, hip, 0.5}, 0.1);
  CHECK(r.was_replanned);
  CHECK(r.used_fallback_edge);
  CHECK((r.x_f_safe - Vec2d(0.9, -0.05)).norm() < 1e-12);
  CHECK_FALSE(hull_contains(sq, r.x_f_safe));

  CHECK_THROWS_AS(replan(sq, FootholdQueryd{x_f, Vec2d(5, 5), 0.5}, 0.1), UnreachableFoothold);
}

TEST_CASE("replan: foothold on the outline is pushed out") {
  const auto sq = unit_square();
  const auto r = replan(sq, FootholdQueryd{Vec2d(1.0, 0.3), Vec2d(1.0, 0.3), 1.0}, 0.1);
  CHECK(r.was_replanned);
  CHECK_FALSE(hull_contains(sq, r.x_f_safe));
  CHECK(r.x_f_safe.x() > 1.0);
}

TEST_CASE("replan: safety, margin and minimality on random rectangles") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> eps(0.01, 0.5);
  for (int k = 0; k < 2000; ++k) {
    const auto r = random_rect(rng);
    const Vec2d x_f = random_interior(rng, r);
    const double e = eps(rng);
    const auto res = replan(r, FootholdQueryd{x_f, x_f, 1e9}, e);
    REQUIRE(res.was_replanned);
    CHECK_FALSE(hull_contains(r, res.x_f_safe));
    const double d = (res.x_f_proj - x_f).norm();
    CHECK(std::abs(outside_distance(r, res.x_f_safe) - e * d) <= 1e-9);
    if (k % 10 == 0) {
      const auto [gd, arg] = grid_nearest(r, x_f, 2500);
      CHECK(std::abs(d - gd) <= 1e-3);
    }
  }
}

TEST_CASE("replan is idempotent on safe footholds") {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 200; ++k) {
    const auto r = random_rect(rng);
    const Vec2d x_f = random_interior(rng, r);
    const auto once = replan(r, FootholdQueryd{x_f, x_f, 1e9}, 0.1);
    const auto twice = replan(r, FootholdQueryd{once.x_f_safe, x_f, 1e9}, 0.1);
    CHECK_FALSE(twice.was_replanned);
    CHECK(twice.x_f_safe == once.x_f_safe);
  }
}
