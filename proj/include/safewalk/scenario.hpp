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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "safewalk/cbf_filter.hpp"
#include "safewalk/gait.hpp"
#include "safewalk/geometry.hpp"
#include "safewalk/rigid_body.hpp"
#include "safewalk/whole_body_controller.hpp"

namespace safewalk {

enum class PlantMode { Kinematic, Dynamic };

std::string to_string(PlantMode m);
PlantMode plant_from_string(const std::string& s);
std::string to_string(FilterMode m);
FilterMode filter_mode_from_string(const std::string& s);

/// An ellipse given either by semi-axes or by a scale factor on the manway
/// half-dimensions. Centered on the manway, aligned with its frame.
struct EllipseSpec {
  std::optional<double> beta;
  std::optional<double> a;
  std::optional<double> b;
};

struct Scenario {
  std::string name = "unnamed";

  Vec2d manway_center = Vec2d(0.5, 0.0);
  Vec2d manway_size = Vec2d(0.381, 0.56);  // along x, along y before rotation
  double manway_theta = 0.0;

  Vec2d start = Vec2d::Zero();
  std::vector<Vec2d> waypoints;   // visited in order; the last is the goal
  int filter_off_waypoint = -1;   // reaching this waypoint disables the filter; -1 never
  double waypoint_tolerance = 0.03;

  EllipseSpec path_ellipse{std::nullopt, 0.19, 0.31};
  EllipseSpec gait_ellipse{std::nullopt, 0.49, 0.88};

  double epsilon = 0.2;
  double boundary_margin = 1e-3;

  GaitTimings timings{};
  double h_hyst = 0.0;
  double k_raibert = 0.03;
  GaitType initial_gait = GaitType::Trot;

  double kp = 1.5;
  double kd = 0.0;
  double alpha0 = 5.0;
  FilterMode filter_mode = FilterMode::Kinematic;
  double lambda = 1.0;
  double v_max = 0.25;
  double v_max_quasi_static = 0.1;  // while quasi-static is selected or running
  double nominal_noise = 0.0;  // std dev added to the nominal command

  double body_height = 0.28;
  std::array<Vec2d, 4> hip_offsets = {Vec2d(0.183, 0.13), Vec2d(0.183, -0.13),
                                      Vec2d(-0.183, 0.13), Vec2d(-0.183, -0.13)};
  double reach = 0.25;
  RobotModel model{};
  WbcGains wbc{};

  double planner_hz = 100.0;
  double qp_hz = 1000.0;
  double impedance_hz = 8000.0;
  double duration = 30.0;
  std::uint64_t seed = 0;
  PlantMode plant = PlantMode::Kinematic;

  RectRegiond manway() const;
  Ellipsed path() const;
  Ellipsed gait_region() const;
  double planner_dt() const { return 1.0 / planner_hz; }
  int qp_ticks_per_plan() const;
  int impedance_ticks_per_qp() const;
  long tick_count() const;

  /// Throws InvalidArgument describing the first problem found.
  void validate() const;

  /// `robot.model_file` is resolved against `base_dir`.
  static Scenario from_json_text(const std::string& text, const std::string& base_dir = ".");
  static Scenario from_json_file(const std::string& path);
  std::string to_json_text() const;
};

/// Start (0, 0), pass the manway on the -y side to an intermediate waypoint,
/// then walk onto the manway center with the filter off.
Scenario manway_approach_scenario();

}  // namespace safewalk
