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

#pragma once

// COM-level transition planning between tray levels. The COM is a double
// integrator with piecewise-constant acceleration on a uniform knot grid;
// every knot must stay in the support polygon of its phase, and the squared
// accelerations are minimized. The result is densified with a clamped cubic
// spline.

#include <iosfwd>
#include <string>
#include <vector>

#include "safewalk/types.hpp"

namespace safewalk {

enum class TransitionDirection { Downward, Upward };

/// All feet, rear feet plus roller, front feet plus roller.
enum class SupportPhase { AllFeet, RearRoller, FrontRoller };

std::string to_string(TransitionDirection d);
std::string to_string(SupportPhase p);
TransitionDirection direction_from_string(const std::string& s);

struct PhaseSchedule {
  TransitionDirection direction;
  std::vector<SupportPhase> sequence;
  std::vector<double> durations;
  double total = 0.0;

  /// Phases active at time t; two entries at a phase boundary.
  std::vector<int> phases_at(double t, double tol = 1e-9) const;
};

PhaseSchedule build_schedule(TransitionDirection dir, double t_a, double t_r, double t_f);

class ConvexPolygon {
 public:
  ConvexPolygon() = default;
  /// Vertices in either winding; stored counterclockwise.
  explicit ConvexPolygon(std::vector<Vec2d> vertices);

  const std::vector<Vec2d>& vertices() const { return vertices_; }
  /// Rows of A p <= b with unit-norm rows, tightened by `margin`.
  void half_planes(double margin, MatXd& A, VecXd& b) const;
  /// Largest signed violation max_i (a_i p - b_i + margin); <= 0 inside.
  double violation(const Vec2d& p, double margin = 0.0) const;

 private:
  std::vector<Vec2d> vertices_;
};

struct SupportPolygonSpec {
  ConvexPolygon all_feet;
  ConvexPolygon rear_roller;
  ConvexPolygon front_roller;
  double shrink_margin = 0.0;

  const ConvexPolygon& polygon(SupportPhase p) const;
};

/// Defaults for a transition along +x from (0.05, 0) to (0.55, 0).
SupportPolygonSpec default_support_polygons();

struct ComSample {
  double t = 0.0;
  Vec2d p = Vec2d::Zero();
  Vec2d v = Vec2d::Zero();
  Vec2d a = Vec2d::Zero();
};

struct ComTrajectory {
  std::vector<ComSample> knots;  // a is the control held over the following interval
  std::vector<ComSample> dense;
  double cost = 0.0;  // sum of squared knot accelerations
};

struct TrajgenOptions {
  double knot_dt = 0.1;
  double dense_dt = 0.001;
  double tol = 1e-10;
};

/// Throws InvalidArgument when start/goal lie outside the first/last phase
/// polygons, Infeasible naming the knot when adjacent phase polygons do not
/// intersect.
ComTrajectory generate_com_trajectory(const PhaseSchedule& schedule,
                                      const SupportPolygonSpec& polygons, const Vec2d& start,
                                      const Vec2d& goal, const TrajgenOptions& opt = {});

/// Clamped cubic spline through (t, p) knots with end slopes taken from the
/// first and last knot velocities.
class CubicSpline2 {
 public:
  explicit CubicSpline2(const std::vector<ComSample>& knots);
  ComSample evaluate(double t) const;
  double t_begin() const { return t_.front(); }
  double t_end() const { return t_.back(); }

 private:
  std::vector<double> t_;
  std::vector<Vec2d> p_;
  std::vector<Vec2d> m_;  // second derivatives at knots
};

std::vector<ComSample> spline_interpolate(const std::vector<ComSample>& knots,
                                          double dt_dense = 0.001);

/// Columns t,x,y,vx,vy,ax,ay with a header row.
void write_trajectory_csv(std::ostream& out, const std::vector<ComSample>& samples);

}  // namespace safewalk
