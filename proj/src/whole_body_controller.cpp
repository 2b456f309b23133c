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

#include "safewalk/whole_body_controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "safewalk/qp_solver.hpp"

namespace safewalk {

void WbcGains::validate() const {
  auto nonneg = [](const auto& v, const char* what) {
    if (!v.allFinite() || (v.array() < 0.0).any()) {
      throw InvalidArgument(std::string(what) + " must be finite and >= 0");
    }
  };
  nonneg(kp, "kp");
  nonneg(kd, "kd");
  nonneg(kp_imp, "kp_imp");
  nonneg(kd_imp, "kd_imp");
  nonneg(w_qdd, "w_qdd");
  if ((w_qdd.tail<kActuated>().array() <= 0.0).any()) {
    throw InvalidArgument("w_qdd must be positive on actuated joints");
  }
  if (!(w_u >= 0.0) || !std::isfinite(w_u)) throw InvalidArgument("w_u must be >= 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma must lie in [0, 1]");
}

Vec7 desired_accel(const Vec7& q, const Vec7& qdot, const Vec7& q_d, const Vec7& qdot_d,
                   const WbcGains& gains) {
  return gains.kp.cwiseProduct(q_d - q) + gains.kd.cwiseProduct(qdot_d - qdot);
}

WbcResiduals wbc_residuals(const RobotModel& model, const FullState& state,
                           const std::array<Vec2d, 2>& anchors, const WbcCommand& cmd,
                           const ContactStabilization& stab) {
  WbcResiduals r;
  Vec7 dyn = inverse_dynamics(model, state.q, state.qdot, cmd.qdd_star) -
             selection_matrix().transpose() * cmd.tau_star;
  if (stance_count(cmd.contacts) > 0) {
    const ContactJacobian cj = contact_jacobian(model, state.q, state.qdot, cmd.contacts);
    dyn -= cj.J.transpose() * cmd.F_c_star;
    const VecXd target = contact_acceleration_target(model, state, cmd.contacts, anchors, stab);
    r.contact = (cj.J * cmd.qdd_star - target).cwiseAbs().maxCoeff();
    for (int k = 0; k < cmd.F_c_star.size() / 2; ++k) {
      const double ft = cmd.F_c_star(2 * k), fn = cmd.F_c_star(2 * k + 1);
      r.friction = std::max({r.friction, -fn, std::abs(ft) - model.friction * fn});
    }
  }
  r.dynamics = dyn.cwiseAbs().maxCoeff();
  r.torque = std::max(0.0, (cmd.tau_star.cwiseAbs() - model.tau_max).maxCoeff());
  return r;
}

WbcCommand solve_wbc(const RobotModel& model, const FullState& state, const ContactSet& contacts,
                     const std::array<Vec2d, 2>& anchors, const Vec7& qdd_desired,
                     const WbcGains& gains, const WbcSettings& settings) {
  const int ns = stance_count(contacts);
  if (ns == 0) throw InvalidArgument("solve_wbc requires at least one stance foot");
  const int nf = 2 * ns;
  const int n = kDof + kActuated + nf;
  const double inf = std::numeric_limits<double>::infinity();

  const Mat7 D = mass_matrix(model, state.q);
  const Vec7 H = bias_forces(model, state.q, state.qdot);
  const ContactJacobian cj = contact_jacobian(model, state.q, state.qdot, contacts);
  const VecXd target =
      contact_acceleration_target(model, state, contacts, anchors, settings.stabilization);

  QpProblemd p;
  p.P = MatXd::Zero(n, n);
  p.P.topLeftCorner<kDof, kDof>() = 2.0 * gains.w_qdd.asDiagonal();
  p.P.bottomRightCorner(n - kDof, n - kDof) = 2.0 * gains.w_u * MatXd::Identity(n - kDof, n - kDof);
  p.q = VecXd::Zero(n);
  p.q.head<kDof>() = -2.0 * gains.w_qdd.cwiseProduct(qdd_desired);

  p.A_eq = MatXd::Zero(kDof + nf, n);
  p.b_eq = VecXd::Zero(kDof + nf);
  p.A_eq.topLeftCorner<kDof, kDof>() = D;
  p.A_eq.block(0, kDof, kDof, kActuated) = -selection_matrix().transpose();
  p.A_eq.block(0, kDof + kActuated, kDof, nf) = -cj.J.transpose();
  p.b_eq.head<kDof>() = -H;
  p.A_eq.block(kDof, 0, nf, kDof) = cj.J;
  p.b_eq.tail(nf) = target;

  p.G = MatXd::Zero(3 * ns, n);
  p.h = VecXd::Zero(3 * ns);
  for (int k = 0; k < ns; ++k) {
    const int ft = kDof + kActuated + 2 * k, fn = ft + 1;
    p.G(3 * k, fn) = -1.0;
    p.G(3 * k + 1, ft) = 1.0;
    p.G(3 * k + 1, fn) = -model.friction;
    p.G(3 * k + 2, ft) = -1.0;
    p.G(3 * k + 2, fn) = -model.friction;
  }
  p.lb = VecXd::Constant(n, -inf);
  p.ub = VecXd::Constant(n, inf);
  p.lb.segment<kActuated>(kDof) = -model.tau_max;
  p.ub.segment<kActuated>(kDof) = model.tau_max;

  QpSettingsd qs;
  qs.tol = settings.tol;
  qs.max_iter = settings.max_iter;
  const QpSolutiond sol = solve(p, qs);
  if (sol.status == QpStatus::Infeasible) {
    throw Infeasible("whole-body QP infeasible (primal residual " +
                         std::to_string(sol.kkt.primal) + ")",
                     sol.kkt.primal);
  }
  if (sol.status != QpStatus::Optimal) {
    throw Error("whole-body QP did not converge (kkt residual " + std::to_string(sol.kkt.max()) +
                ")");
  }
  WbcCommand cmd;
  cmd.qdd_star = sol.z.head<kDof>();
  cmd.tau_star = sol.z.segment<kActuated>(kDof);
  cmd.F_c_star = sol.z.tail(nf);
  cmd.contacts = contacts;
  cmd.qp_iterations = sol.iterations;
  cmd.residuals = wbc_residuals(model, state, anchors, cmd, settings.stabilization);
  return cmd;
}

DesiredState integrate_desired(const Vec7& q, const Vec7& qdot, const Vec7& qdd_star,
                               const Vec7& qdot_n_prev, double gamma, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma must lie in [0, 1]");
  const Vec7 blended = (1.0 - gamma) * qdot + gamma * qdot_n_prev;
  return {q + dt * blended + 0.5 * dt * dt * qdd_star, blended + dt * qdd_star};
}

ImpedanceOutput impedance_torque(const Vec4& tau_star, const Vec7& q_n, const Vec7& qdot_n,
                                 const Vec7& q, const Vec7& qdot, const WbcGains& gains,
                                 const Vec4& tau_max) {
  const Vec4 raw = tau_star +
                   gains.kp_imp.cwiseProduct((q_n - q).tail<kActuated>()) +
                   gains.kd_imp.cwiseProduct((qdot_n - qdot).tail<kActuated>());
  ImpedanceOutput out;
  out.tau_cmd = raw.cwiseMax(-tau_max).cwiseMin(tau_max);
  out.saturated = (out.tau_cmd.array() != raw.array()).any();
  return out;
}

WholeBodyController::WholeBodyController(RobotModel model, WbcGains gains, double qp_dt,
                                         WbcSettings settings)
    : model_(std::move(model)), gains_(std::move(gains)), qp_dt_(qp_dt), settings_(settings) {
  model_.validate();
  gains_.validate();
  if (!(qp_dt_ > 0.0)) throw InvalidArgument("qp_dt must be > 0");
}

const WbcCommand& WholeBodyController::update(const FullState& state, const ContactSet& contacts,
                                              const std::array<Vec2d, 2>& anchors,
                                              const Vec7& q_d, const Vec7& qdot_d) {
  if (!qdot_n_prev_) qdot_n_prev_ = state.qdot;
  const Vec7 qdd_d = desired_accel(state.q, state.qdot, q_d, qdot_d, gains_);
  WbcCommand cmd = solve_wbc(model_, state, contacts, anchors, qdd_d, gains_, settings_);
  const DesiredState des =
      integrate_desired(state.q, state.qdot, cmd.qdd_star, *qdot_n_prev_, gains_.gamma, qp_dt_);
  cmd.q_n = des.q_n;
  cmd.qdot_n = des.qdot_n;
  qdot_n_prev_ = des.qdot_n;
  last_ = std::move(cmd);
  const ImpedanceOutput imp = torque(state);
  last_.tau_cmd = imp.tau_cmd;
  last_.saturated = imp.saturated;
  return last_;
}

ImpedanceOutput WholeBodyController::torque(const FullState& state) const {
  return impedance_torque(last_.tau_star, last_.q_n, last_.qdot_n, state.q, state.qdot, gains_,
                          model_.tau_max);
}

}  // namespace safewalk
