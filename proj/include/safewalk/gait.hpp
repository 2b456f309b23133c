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
#include <string_view>

#include "safewalk/types.hpp"

namespace safewalk {

enum class GaitType { Trot, QuasiStatic };

enum class Leg : int { FL = 0, FR = 1, BL = 2, BR = 3 };
inline constexpr std::array<Leg, 4> kAllLegs = {Leg::FL, Leg::FR, Leg::BL, Leg::BR};

std::string_view to_string(GaitType g);
std::string_view to_string(Leg leg);
GaitType gait_from_string(std::string_view s);

struct GaitParams {
  double H = 0.28;   // body height, m
  double vx = 0.0;   // m/s
  double vy = 0.0;   // m/s
  double wz = 0.0;   // rad/s
};

struct GaitTimings {
  double trot_phase = 0.3;    // each diagonal pair swings this long
  double static_phase = 0.5;  // each single-leg swing

  double phase_duration(GaitType g) const;
  int phase_count(GaitType g) const;
  double swing_duration(GaitType g) const { return phase_duration(g); }
  double stance_duration(GaitType g) const;
};

using ContactPattern = std::array<bool, 4>;  // indexed by Leg, true = stance

/// Stance flags of phase `phase_index` of gait `g`. Trot phase 0 swings FL+BR,
/// phase 1 swings FR+BL. Quasi-static phases swing FL, BR, FR, BL in turn.
ContactPattern contact_pattern(GaitType g, int phase_index);

struct GaitState {
  GaitType gait = GaitType::Trot;
  int phase_index = 0;
  double phase_timer = 0.0;
  ContactPattern contact = contact_pattern(GaitType::Trot, 0);
  std::optional<GaitType> pending_transition;
  std::uint64_t phases_completed = 0;

  static GaitState start(GaitType g);
  int stance_count() const;
};

/// Advances the phase clock. Pending gait changes take effect only when a
/// phase expires, at which instant every foot is on the ground.
GaitState advance_phase(const GaitState& state, double dt, const GaitTimings& timings);

/// Neutral-point foothold plus velocity-error feedback.
Vec2d raibert_footstep(const Vec2d& hip, const Vec2d& v, const Vec2d& v_cmd,
                       double stance_duration, double k_raibert);

struct FootstepTarget {
  Leg leg;
  Vec2d target;
  double touchdown_time;
};

/// Trot iff h_gait >= 0.
GaitType select_gait(double h_gait);

/// select_gait with a hysteresis band below zero: trot drops to quasi-static
/// once h_gait < -h_hyst and returns when h_gait >= 0. h_hyst = 0 is the
/// plain threshold.
class GaitSelector {
 public:
  explicit GaitSelector(double h_hyst = 0.0, GaitType initial = GaitType::Trot);
  GaitType update(double h_gait);
  GaitType current() const { return current_; }

 private:
  double h_hyst_;
  GaitType current_;
};

}  // namespace safewalk
