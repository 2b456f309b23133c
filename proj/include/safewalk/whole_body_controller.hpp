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

// Low-level control: an acceleration/torque/contact-force QP
//
//   min  (qdd_d - qdd)' W_qdd (qdd_d - qdd) + u' W_u u,   u = [tau; F_c]
//   s.t. D qdd + H = S' tau + Jc' F_c
//        Jc qdd = -Jdot qd - 2 zeta omega Jc qd - omega^2 (p_foot - anchor)
//        |F_t| <= mu F_n,  F_n >= 0,  |tau| <= tau_max
//
// followed by smoothed Euler integration of qdd* and a joint impedance law.

#include <array>
#include <optional>

#include "safewalk/rigid_body.hpp"

namespace safewalk {

struct WbcGains {
  Vec7 kp = (Vec7() << 100, 100, 100, 100, 100, 100, 100).finished();
  Vec7 kd = (Vec7() << 20, 20, 20, 20, 20, 20, 20).finished();
  Vec4 kp_imp = Vec4::Constant(40.0);
  Vec4 kd_imp = Vec4::Constant(1.0);
  Vec7 w_qdd = Vec7::Ones();
  double w_u = 1e-8;
  double gamma = 0.5;

  void validate() const;
};

struct WbcSettings {
  double tol = 1e-6;
  int max_iter = 500;
  ContactStabilization stabilization{};
};

struct WbcResiduals {
  double dynamics = 0.0;  // inf-norm of D qdd + H - S' tau - Jc' F
  double contact = 0.0;   // inf-norm of the stabilized contact rows
  double friction = 0.0;  // worst pyramid violation, 0 when satisfied
  double torque = 0.0;    // worst |tau| - tau_max excess, 0 when satisfied
};

struct WbcCommand {
  Vec7 qdd_star = Vec7::Zero();
  Vec4 tau_star = Vec4::Zero();
  VecXd F_c_star;  // (F_t, F_n) per stance foot, Front first
  Vec7 q_n = Vec7::Zero();
  Vec7 qdot_n = Vec7::Zero();
  Vec4 tau_cmd = Vec4::Zero();
  bool saturated = false;
  ContactSet contacts{false, false};
  WbcResiduals residuals{};
  int qp_iterations = 0;
};

/// qdd_d = Kp (q_d - q) + Kd (qd_d - qd), elementwise.
Vec7 desired_accel(const Vec7& q, const Vec7& qdot, const Vec7& q_d, const Vec7& qdot_d,
                   const WbcGains& gains);

/// Fills qdd_star, tau_star, F_c_star, contacts and residuals. Throws
/// Infeasible with the primal residual when no admissible solution exists.
WbcCommand solve_wbc(const RobotModel& model, const FullState& state, const ContactSet& contacts,
                     const std::array<Vec2d, 2>& anchors, const Vec7& qdd_desired,
                     const WbcGains& gains, const WbcSettings& settings = {});

/// Residuals of a command against the model, recomputed from scratch.
WbcResiduals wbc_residuals(const RobotModel& model, const FullState& state,
                           const std::array<Vec2d, 2>& anchors, const WbcCommand& cmd,
                           const ContactStabilization& stab = {});

struct DesiredState {
  Vec7 q_n;
  Vec7 qdot_n;
};

DesiredState integrate_desired(const Vec7& q, const Vec7& qdot, const Vec7& qdd_star,
                               const Vec7& qdot_n_prev, double gamma, double dt);

struct ImpedanceOutput {
  Vec4 tau_cmd;
  bool saturated = false;
};

/// tau* + Kp_imp (q_n - q) + Kd_imp (qd_n - qd) on the actuated joints,
/// saturated to the model torque limits.
ImpedanceOutput impedance_torque(const Vec4& tau_star, const Vec7& q_n, const Vec7& qdot_n,
                                 const Vec7& q, const Vec7& qdot, const WbcGains& gains,
                                 const Vec4& tau_max);

/// Stateful two-rate loop: `update` runs the QP and integration at the QP rate,
/// `torque` evaluates the impedance law on the held command at the fast rate.
class WholeBodyController {
 public:
  WholeBodyController(RobotModel model, WbcGains gains, double qp_dt, WbcSettings settings = {});

  const WbcCommand& update(const FullState& state, const ContactSet& contacts,
                           const std::array<Vec2d, 2>& anchors, const Vec7& q_d,
                           const Vec7& qdot_d);
  ImpedanceOutput torque(const FullState& state) const;

  const WbcCommand& last() const { return last_; }
  const RobotModel& model() const { return model_; }
  const WbcGains& gains() const { return gains_; }
  void reset() { qdot_n_prev_.reset(); }

 private:
  RobotModel model_;
  WbcGains gains_;
  double qp_dt_;
  WbcSettings settings_;
  std::optional<Vec7> qdot_n_prev_;
  WbcCommand last_;
};

}  // namespace safewalk
