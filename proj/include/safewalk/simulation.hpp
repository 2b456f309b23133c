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
#include <string>
#include <vector>

#include "safewalk/scenario.hpp"

namespace safewalk {

struct TickRecord {
  double t = 0.0;
  Vec2d phi = Vec2d::Zero();
  Vec2d phidot = Vec2d::Zero();
  double h_path = 0.0;
  double h_gait = 0.0;
  GaitType selected_gait = GaitType::Trot;  // h_gait rule with hysteresis
  GaitType active_gait = GaitType::Trot;    // gait the phase machine is running
  int phase_index = 0;
  std::uint64_t phases_completed = 0;
  ContactPattern contact{true, true, true, true};
  Vec2d nu_d = Vec2d::Zero();
  Vec2d nu_safe = Vec2d::Zero();
  bool filter_active = false;
  int waypoint_index = 0;
  std::array<Vec2d, 4> feet{};

  // Planar plant, dynamic mode only.
  double base_height = 0.0;
  double pitch = 0.0;
  WbcResiduals wbc{};
  Vec4 contact_forces = Vec4::Zero();  // F_t, F_n front then rear
  bool torque_saturated = false;
};

struct FootholdEvent {
  Leg leg = Leg::FL;
  double t_liftoff = 0.0;
  double t_touchdown = 0.0;
  Vec2d planned = Vec2d::Zero();    // Raibert target
  Vec2d replanned = Vec2d::Zero();  // after the manway check
  Vec2d placed = Vec2d::Zero();     // where the foot landed
  bool was_replanned = false;
  bool used_fallback_edge = false;
  bool unreachable = false;  // no admissible relocation; the foot stayed put
};

struct RunEvent {
  double t = 0.0;
  std::string kind;
  std::string message;
};

struct TrajectoryLog {
  Scenario scenario;
  std::vector<TickRecord> ticks;
  std::vector<FootholdEvent> footholds;
  std::vector<RunEvent> events;
  bool aborted = false;
};

struct RunOptions {
  bool disable_filter = false;  // ablation: skip the safety filter entirely
};

/// Deterministic closed-loop run. Module errors are recorded as events; an
/// infeasible safety filter or controller ends the run.
TrajectoryLog run_scenario(const Scenario& s, const RunOptions& opt = {});

struct Violation {
  double t = 0.0;
  std::string kind;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  double min_h_path = 0.0;                // over every tick
  double min_h_path_filter_active = 0.0;  // over ticks with the filter on; +inf if none
  int unsafe_footholds = 0;

  bool ok() const { return violations.empty(); }
  int count(const std::string& kind) const;
};

struct ValidationTolerances {
  double h_path = 1e-6;
  double consistency = 1e-9;
  double wbc_equality = 1e-6;
  double wbc_inequality = 1e-8;
};

/// Recomputes barrier values from raw positions with its own formulas and
/// checks safety claims against the scenario geometry in the log.
ValidationReport validate_log(const TrajectoryLog& log, const ValidationTolerances& tol = {});

struct GaitSwitch {
  double t;
  GaitType from;
  GaitType to;
};

struct RunSummary {
  int schema_version = 1;
  std::string scenario;
  std::string plant;
  std::uint64_t seed = 0;
  long ticks = 0;
  double final_position_error = 0.0;
  double min_h_path = 0.0;
  std::vector<double> waypoint_reached_times;
  std::vector<GaitSwitch> selected_switches;
  std::vector<GaitSwitch> active_switches;
  int foothold_count = 0;
  int replan_count = 0;
  int unreachable_count = 0;
  bool aborted = false;
  double max_wbc_dynamics_residual = 0.0;
  double max_wbc_contact_residual = 0.0;
  double max_base_height_error = 0.0;
};

RunSummary summarize(const TrajectoryLog& log);

}  // namespace safewalk
