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

// Log persistence. The full log is JSON (columnar tick arrays, scenario
// embedded). CSV files, one per signal group, carry a header row and a fixed
// column order; doubles are written with 17 significant digits.
//
//   base.csv       t,x,y,vx,vy,nu_d_x,nu_d_y,nu_safe_x,nu_safe_y,filter_active,waypoint
//   barrier.csv    t,h_path,h_gait
//   gait.csv       t,selected,active,phase_index,phases_completed,c_FL,c_FR,c_BL,c_BR
//   feet.csv       t,FL_x,FL_y,FR_x,FR_y,BL_x,BL_y,BR_x,BR_y
//   footholds.csv  leg,t_liftoff,t_touchdown,planned_x,planned_y,replanned_x,replanned_y,
//                  placed_x,placed_y,was_replanned,used_fallback_edge,unreachable
//   wbc.csv        t,base_z,pitch,res_dynamics,res_contact,res_friction,res_torque,
//                  F_front_t,F_front_n,F_rear_t,F_rear_n,saturated   (dynamic plant only)
//   events.csv     t,kind,message

#include <filesystem>
#include <string>
#include <vector>

#include "safewalk/simulation.hpp"

namespace safewalk {

inline constexpr int kLogSchemaVersion = 1;

std::string log_to_json(const TrajectoryLog& log);
TrajectoryLog log_from_json(const std::string& text);

void write_log(const TrajectoryLog& log, const std::filesystem::path& path);
TrajectoryLog read_log(const std::filesystem::path& path);

/// Writes the CSV group files into `dir` and returns their paths.
std::vector<std::filesystem::path> write_csvs(const TrajectoryLog& log,
                                              const std::filesystem::path& dir);

std::string summary_to_json(const RunSummary& summary);
void write_summary(const RunSummary& summary, const std::filesystem::path& path);

std::string report_to_json(const ValidationReport& report);

}  // namespace safewalk
