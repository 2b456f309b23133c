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

#include "safewalk/gait.hpp"

#include <algorithm>

namespace safewalk {

std::string_view to_string(GaitType g) {
  return g == GaitType::Trot ? "trot" : "quasi_static";
}

std::string_view to_string(Leg leg) {
  switch (leg) {
    case Leg::FL: return "FL";
    case Leg::FR: return "FR";
    case Leg::BL: return "BL";
    case Leg::BR: return "BR";
  }
  return "?";
}

GaitType gait_from_string(std::string_view s) {
  if (s == "trot") return GaitType::Trot;
  if (s == "quasi_static") return GaitType::QuasiStatic;
  throw InvalidArgument("unknown gait '" + std::string(s) + "'");
}

double GaitTimings::phase_duration(GaitType g) const {
  return g == GaitType::Trot ? trot_phase : static_phase;
}

int GaitTimings::phase_count(GaitType g) const { return g == GaitType::Trot ? 2 : 4; }

double GaitTimings::stance_duration(GaitType g) const {
  return phase_duration(g) * (phase_count(g) - 1);
}

ContactPattern contact_pattern(GaitType g, int phase_index) {
  ContactPattern c = {true, true, true, true};
  auto swing = [&](Leg l) { c[static_cast<std::size_t>(l)] = false; };
  if (g == GaitType::Trot) {
    if (phase_index % 2 == 0) {
      swing(Leg::FL);
      swing(Leg::BR);
    } else {
      swing(Leg::FR);
      swing(Leg::BL);
    }
    return c;
  }
  static constexpr std::array<Leg, 4> kOrder = {Leg::FL, Leg::BR, Leg::FR, Leg::BL};
  swing(kOrder[static_cast<std::size_t>(phase_index % 4)]);
  return c;
}

GaitState GaitState::start(GaitType g) {
  GaitState s;
  s.gait = g;
  s.contact = contact_pattern(g, 0);
  return s;
}

int GaitState::stance_count() const {
  return static_cast<int>(std::count(contact.begin(), contact.end(), true));
}

GaitState advance_phase(const GaitState& state, double dt, const GaitTimings& timings) {
  if (!(dt > 0)) throw InvalidArgument("gait time step must be positive");
  constexpr double kSlack = 1e-9;
  GaitState s = state;
  s.phase_timer += dt;
  for (;;) {
    const double dur = timings.phase_duration(s.gait);
    if (s.phase_timer < dur - kSlack) break;
    s.phase_timer = std::max(0.0, s.phase_timer - dur);
    ++s.phases_completed;
    if (s.pending_transition && *s.pending_transition != s.gait) {
      s.gait = *s.pending_transition;
      s.phase_index = 0;
    } else {
      s.phase_index = (s.phase_index + 1) % timings.phase_count(s.gait);
    }
    s.pending_transition.reset();
  }
  s.contact = contact_pattern(s.gait, s.phase_index);
  return s;
}

Vec2d raibert_footstep(const Vec2d& hip, const Vec2d& v, const Vec2d& v_cmd,
                       double stance_duration, double k_raibert) {
  if (!(stance_duration > 0)) throw InvalidArgument("stance duration must be positive");
  return hip + 0.5 * stance_duration * v + k_raibert * (v - v_cmd);
}

GaitType select_gait(double h_gait) {
  return h_gait >= 0.0 ? GaitType::Trot : GaitType::QuasiStatic;
}

GaitSelector::GaitSelector(double h_hyst, GaitType initial) : h_hyst_(h_hyst), current_(initial) {
  if (h_hyst < 0) throw InvalidArgument("gait hysteresis band must be nonnegative");
}

GaitType GaitSelector::update(double h_gait) {
  if (current_ == GaitType::Trot && h_gait < -h_hyst_) current_ = GaitType::QuasiStatic;
  if (current_ == GaitType::QuasiStatic && h_gait >= 0.0) current_ = GaitType::Trot;
  return current_;
}

}  // namespace safewalk
