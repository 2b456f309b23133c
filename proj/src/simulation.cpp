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

#include "safewalk/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "safewalk/cbf_filter.hpp"
#include "safewalk/foothold_replanner.hpp"
#include "safewalk/reduced_order.hpp"

namespace safewalk {

namespace {

struct SwingState {
  bool active = false;
  Vec2d from = Vec2d::Zero();
  FootholdEvent event{};
};

class Runner {
 public:
  Runner(const Scenario& s, const RunOptions& opt)
      : s_(s),
        opt_(opt),
        manway_(s.manway()),
        path_cbf_(build_ellipse_cbf(s.path())),
        gait_cbf_(build_ellipse_cbf(s.gait_region())),
        dt_(s.planner_dt()),
        rng_(s.seed),
        selector_(s.h_hyst, s.initial_gait),
        gait_(GaitState::start(s.initial_gait)) {
    log_.scenario = s;
    x_.phi = s.start;
    for (Leg leg : kAllLegs) feet_[idx(leg)] = s.start + s.hip_offsets[idx(leg)];
    if (s.plant == PlantMode::Dynamic) {
      wbc_.emplace(s.model, s.wbc, 1.0 / s.qp_hz);
      plant_ = standing_state(s.model, s.body_height);
      q_ref_ = plant_.q;
      anchors_ = {foot_position(s.model, plant_.q, PlanarLeg::Front),
                  foot_position(s.model, plant_.q, PlanarLeg::Rear)};
    }
  }

  TrajectoryLog run() {
    const long n = s_.tick_count();
    log_.ticks.reserve(static_cast<std::size_t>(n));
    for (Leg leg : kAllLegs) {
      if (!gait_.contact[idx(leg)]) liftoff(leg, 0.0, Vec2d::Zero(), Vec2d::Zero());
    }
    for (long k = 0; k < n && !log_.aborted; ++k) tick(k);
    return std::move(log_);
  }

 private:
  static std::size_t idx(Leg l) { return static_cast<std::size_t>(l); }

  void event(double t, std::string kind, std::string message) {
    log_.events.push_back({t, std::move(kind), std::move(message)});
  }

  void tick(long k) {
    const double t = static_cast<double>(k) * dt_;
    const std::size_t last = s_.waypoints.size() - 1;
    if ((x_.phi - s_.waypoints[wp_]).norm() <= s_.waypoint_tolerance) {
      if (static_cast<int>(wp_) == s_.filter_off_waypoint && filter_on_) {
        filter_on_ = false;
        event(t, "filter_off", "safety filter deactivated at waypoint " + std::to_string(wp_));
      }
      if (wp_ < last) ++wp_;
    }

    TickRecord r;
    r.t = t;
    r.phi = x_.phi;
    r.phidot = x_.phidot;
    r.h_path = h_value(path_cbf_, x_.phi);
    r.h_gait = evaluate_gait_region(gait_cbf_, x_.phi);
    r.waypoint_index = static_cast<int>(wp_);

    r.selected_gait = selector_.update(r.h_gait);
    if (r.selected_gait != gait_.gait) {
      gait_.pending_transition = r.selected_gait;
    } else {
      gait_.pending_transition.reset();
    }

    ReducedStated target;
    target.phi = s_.waypoints[wp_];
    Vec2d nu_d = nominal_controller(x_, target, PdGainsd{s_.kp, s_.kd});
    if (s_.nominal_noise > 0.0) {
      std::normal_distribution<double> n(0.0, s_.nominal_noise);
      const double nx = n(rng_);
      const double ny = n(rng_);
      nu_d += Vec2d(nx, ny);
    }
    const bool slow =
        gait_.gait == GaitType::QuasiStatic || r.selected_gait == GaitType::QuasiStatic;
    const double vmax = slow ? s_.v_max_quasi_static : s_.v_max;
    const InputBox<double> box{Vec2d::Constant(-vmax), Vec2d::Constant(vmax)};
    const Vec2d nu_cmd = nu_d.cwiseMax(box.lower).cwiseMin(box.upper);
    Vec2d nu_safe = nu_cmd;
    const bool filtering = filter_on_ && !opt_.disable_filter;
    if (filtering) {
      FilterConfig<double> cfg;
      cfg.mode = s_.filter_mode;
      cfg.lambda = s_.lambda;
      cfg.input_bounds = box;
      try {
        nu_safe = filter_qp(path_cbf_, x_, nu_d, ClassKappad{s_.alpha0}, cfg);
      } catch (const Error& e) {
        event(t, "filter_infeasible", e.what());
        log_.aborted = true;
        nu_safe = Vec2d::Zero();
      }
    }
    r.nu_d = nu_d;
    r.nu_safe = nu_safe;
    r.filter_active = filter_on_;

    r.active_gait = gait_.gait;
    r.phase_index = gait_.phase_index;
    r.phases_completed = gait_.phases_completed;
    r.contact = gait_.contact;
    r.feet = feet_;

    if (wbc_ && !log_.aborted) dynamic_step(t, r);
    log_.ticks.push_back(r);
    if (log_.aborted) return;

    if (s_.filter_mode == FilterMode::Kinematic) {
      x_.phi += dt_ * nu_safe;
      x_.phidot = nu_safe;
    } else {
      x_ = step(x_, nu_safe, dt_);
    }

    const GaitState prev = gait_;
    gait_ = advance_phase(gait_, dt_, s_.timings);
    const double t_next = static_cast<double>(k + 1) * dt_;
    if (gait_.phases_completed != prev.phases_completed) {
      for (Leg leg : kAllLegs) {
        if (!prev.contact[idx(leg)]) touchdown(leg, t_next);
      }
      for (Leg leg : kAllLegs) {
        if (!gait_.contact[idx(leg)]) liftoff(leg, t_next, nu_safe, nu_cmd);
      }
    }
    const double frac =
        std::clamp(gait_.phase_timer / s_.timings.phase_duration(gait_.gait), 0.0, 1.0);
    for (Leg leg : kAllLegs) {
      const SwingState& sw = swing_[idx(leg)];
      if (sw.active) feet_[idx(leg)] = sw.from + frac * (sw.event.replanned - sw.from);
    }
  }

  void liftoff(Leg leg, double t, const Vec2d& v, const Vec2d& v_cmd) {
    SwingState& sw = swing_[idx(leg)];
    const double T = s_.timings.swing_duration(gait_.gait);
    const Vec2d hip_td = x_.phi + T * v + s_.hip_offsets[idx(leg)];
    sw.active = true;
    sw.from = feet_[idx(leg)];
    sw.event = FootholdEvent{};
    sw.event.leg = leg;
    sw.event.t_liftoff = t;
    sw.event.t_touchdown = t + T;
    sw.event.planned =
        raibert_footstep(hip_td, v, v_cmd, s_.timings.stance_duration(gait_.gait), s_.k_raibert);
    try {
      const auto res = replan(manway_, FootholdQueryd{sw.event.planned, hip_td, s_.reach},
                              s_.epsilon, s_.boundary_margin);
      sw.event.replanned = res.x_f_safe;
      sw.event.was_replanned = res.was_replanned;
      sw.event.used_fallback_edge = res.used_fallback_edge;
    } catch (const UnreachableFoothold& e) {
      sw.event.replanned = sw.from;
      sw.event.unreachable = true;
      event(t, "unreachable_foothold", std::string(to_string(leg)) + ": " + e.what());
    }
  }

  void touchdown(Leg leg, double t) {
    SwingState& sw = swing_[idx(leg)];
    if (!sw.active) return;
    sw.event.t_touchdown = t;
    sw.event.placed = sw.event.replanned;
    feet_[idx(leg)] = sw.event.placed;
    log_.footholds.push_back(sw.event);
    sw.active = false;
  }

  void dynamic_step(double t, TickRecord& r) {
    r.base_height = plant_.q(coord::kZ);
    r.pitch = plant_.q(coord::kPitch);
    const ContactSet both{true, true};
    const double dt_imp = 1.0 / s_.impedance_hz;
    const int nq = s_.qp_ticks_per_plan();
    const int ni = s_.impedance_ticks_per_qp();
    try {
      for (int j = 0; j < nq; ++j) {
        const WbcCommand& cmd = wbc_->update(plant_, both, anchors_, q_ref_, Vec7::Zero());
        r.wbc.dynamics = std::max(r.wbc.dynamics, cmd.residuals.dynamics);
        r.wbc.contact = std::max(r.wbc.contact, cmd.residuals.contact);
        r.wbc.friction = std::max(r.wbc.friction, cmd.residuals.friction);
        r.wbc.torque = std::max(r.wbc.torque, cmd.residuals.torque);
        if (j == 0) r.contact_forces = cmd.F_c_star;
        for (int i = 0; i < ni; ++i) {
          const ImpedanceOutput imp = wbc_->torque(plant_);
          r.torque_saturated = r.torque_saturated || imp.saturated;
          plant_ = step_plant(s_.model, plant_, imp.tau_cmd, both, anchors_, {}, dt_imp);
        }
      }
    } catch (const Error& e) {
      event(t, "controller_error", e.what());
      log_.aborted = true;
    }
  }

  const Scenario& s_;
  RunOptions opt_;
  RectRegiond manway_;
  EllipseCbfd path_cbf_;
  EllipseCbfd gait_cbf_;
  double dt_;
  std::mt19937_64 rng_;
  GaitSelector selector_;
  GaitState gait_;
  ReducedStated x_{};
  std::size_t wp_ = 0;
  bool filter_on_ = true;
  std::array<Vec2d, 4> feet_{};
  std::array<SwingState, 4> swing_{};
  std::optional<WholeBodyController> wbc_;
  FullState plant_{};
  Vec7 q_ref_ = Vec7::Zero();
  std::array<Vec2d, 2> anchors_{};
  TrajectoryLog log_;
};

// Barrier value written out in the ellipse's own frame.
double ellipse_level(const Ellipsed& e, const Vec2d& p) {
  const double dx = p.x() - e.center.x(), dy = p.y() - e.center.y();
  const double c = std::cos(e.theta), s = std::sin(e.theta);
  const double u = (c * dx + s * dy) / e.a;
  const double v = (-s * dx + c * dy) / e.b;
  return u * u + v * v - 1.0;
}

}  // namespace

TrajectoryLog run_scenario(const Scenario& s, const RunOptions& opt) {
  s.validate();
  return Runner(s, opt).run();
}

int ValidationReport::count(const std::string& kind) const {
  return static_cast<int>(std::count_if(violations.begin(), violations.end(),
                                        [&](const Violation& v) { return v.kind == kind; }));
}

ValidationReport validate_log(const TrajectoryLog& log, const ValidationTolerances& tol) {
  const Scenario& s = log.scenario;
  const Ellipsed path = s.path();
  const Ellipsed gait = s.gait_region();
  const RectRegiond manway = s.manway();
  const double dt = s.planner_dt();
  ValidationReport rep;
  rep.min_h_path = std::numeric_limits<double>::infinity();
  rep.min_h_path_filter_active = std::numeric_limits<double>::infinity();
  auto flag = [&](double t, const char* kind, std::string detail) {
    rep.violations.push_back({t, kind, std::move(detail)});
  };

  std::size_t wp = 0;
  bool expect_filter = true;
  const std::size_t last = s.waypoints.size() - 1;
  for (std::size_t k = 0; k < log.ticks.size(); ++k) {
    const TickRecord& r = log.ticks[k];
    if (std::abs(r.t - static_cast<double>(k) * dt) > 1e-9) {
      flag(r.t, "timestamp", "tick " + std::to_string(k) + " off the planner grid");
    }
    if ((r.phi - s.waypoints[wp]).norm() <= s.waypoint_tolerance) {
      if (static_cast<int>(wp) == s.filter_off_waypoint) expect_filter = false;
      if (wp < last) ++wp;
    }
    const double hp = ellipse_level(path, r.phi);
    const double hg = ellipse_level(gait, r.phi);
    if (std::abs(hp - r.h_path) > tol.consistency * (1.0 + std::abs(hp))) {
      flag(r.t, "h_path_record", "logged h_path disagrees with position");
    }
    if (std::abs(hg - r.h_gait) > tol.consistency * (1.0 + std::abs(hg))) {
      flag(r.t, "h_gait_record", "logged h_gait disagrees with position");
    }
    rep.min_h_path = std::min(rep.min_h_path, hp);
    if (expect_filter) {
      rep.min_h_path_filter_active = std::min(rep.min_h_path_filter_active, hp);
      if (hp < -tol.h_path) flag(r.t, "h_path", "h_path = " + std::to_string(hp));
    }
    if (hg < -s.h_hyst && r.selected_gait != GaitType::QuasiStatic) {
      flag(r.t, "gait_rule", "trot selected with h_gait below the band");
    }
    if (hg > 0.0 && r.selected_gait != GaitType::Trot) {
      flag(r.t, "gait_rule", "quasi-static selected with h_gait > 0");
    }
    if (k > 0) {
      const TickRecord& p = log.ticks[k - 1];
      if (r.active_gait != p.active_gait && r.phases_completed == p.phases_completed) {
        flag(r.t, "gait_change_off_boundary", "active gait changed inside a phase");
      }
    }
    if (s.plant == PlantMode::Dynamic) {
      if (r.wbc.dynamics > tol.wbc_equality) flag(r.t, "wbc_dynamics", "dynamics residual");
      if (r.wbc.contact > tol.wbc_equality) flag(r.t, "wbc_contact", "contact residual");
      for (int f = 0; f < 2; ++f) {
        const double ft = r.contact_forces(2 * f), fn = r.contact_forces(2 * f + 1);
        if (fn < -tol.wbc_inequality ||
            std::abs(ft) > s.model.friction * fn + tol.wbc_inequality) {
          flag(r.t, "wbc_friction", "contact force outside the friction pyramid");
        }
      }
      if (r.wbc.torque > tol.wbc_inequality) flag(r.t, "wbc_torque", "torque beyond limits");
    }
  }
  for (const FootholdEvent& f : log.footholds) {
    if (hull_contains(manway, f.placed)) {
      ++rep.unsafe_footholds;
      flag(f.t_touchdown, "unsafe_foothold",
           std::string(to_string(f.leg)) + " landed inside the manway");
    }
  }
  std::stable_sort(rep.violations.begin(), rep.violations.end(),
                   [](const Violation& a, const Violation& b) { return a.t < b.t; });
  return rep;
}

RunSummary summarize(const TrajectoryLog& log) {
  const Scenario& s = log.scenario;
  RunSummary out;
  out.scenario = s.name;
  out.plant = to_string(s.plant);
  out.seed = s.seed;
  out.ticks = static_cast<long>(log.ticks.size());
  out.aborted = log.aborted;
  out.min_h_path = std::numeric_limits<double>::infinity();
  std::size_t wp = 0;
  for (std::size_t k = 0; k < log.ticks.size(); ++k) {
    const TickRecord& r = log.ticks[k];
    out.min_h_path = std::min(out.min_h_path, r.h_path);
    if (wp < s.waypoints.size() && (r.phi - s.waypoints[wp]).norm() <= s.waypoint_tolerance) {
      out.waypoint_reached_times.push_back(r.t);
      ++wp;
    }
    if (k > 0) {
      const TickRecord& p = log.ticks[k - 1];
      if (r.selected_gait != p.selected_gait) {
        out.selected_switches.push_back({r.t, p.selected_gait, r.selected_gait});
      }
      if (r.active_gait != p.active_gait) {
        out.active_switches.push_back({r.t, p.active_gait, r.active_gait});
      }
    }
    out.max_wbc_dynamics_residual = std::max(out.max_wbc_dynamics_residual, r.wbc.dynamics);
    out.max_wbc_contact_residual = std::max(out.max_wbc_contact_residual, r.wbc.contact);
    if (s.plant == PlantMode::Dynamic) {
      out.max_base_height_error =
          std::max(out.max_base_height_error, std::abs(r.base_height - s.body_height));
    }
  }
  if (!log.ticks.empty()) {
    out.final_position_error = (log.ticks.back().phi - s.waypoints.back()).norm();
  }
  out.foothold_count = static_cast<int>(log.footholds.size());
  for (const auto& f : log.footholds) {
    out.replan_count += f.was_replanned ? 1 : 0;
    out.unreachable_count += f.unreachable ? 1 : 0;
  }
  return out;
}

}  // namespace safewalk
