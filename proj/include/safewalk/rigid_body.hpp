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

// Sagittal-plane quadruped: a floating base (x, z, pitch) carrying a front and
// a rear two-link leg. Each planar leg lumps the left/right pair of the real
// robot. Generalized coordinates
//
//   q = [x, z, theta, hip_front, knee_front, hip_rear, knee_rear]
//
// with theta measured counterclockwise in the x-z plane, hip angles measured
// from the body's downward axis and knee angles relative to the thigh (knee
// bent backward for q_knee > 0). Equations of motion
//
//   D(q) qdd + H(q, qd) = S' tau + Jc(q)' Fc.

#include <array>
#include <string>

#include "safewalk/types.hpp"

namespace safewalk {

inline constexpr int kDof = 7;
inline constexpr int kActuated = 4;

using Vec7 = Eigen::Matrix<double, kDof, 1>;
using Mat7 = Eigen::Matrix<double, kDof, kDof>;
using Vec4 = Eigen::Matrix<double, kActuated, 1>;

enum class PlanarLeg : int { Front = 0, Rear = 1 };
inline constexpr std::array<PlanarLeg, 2> kPlanarLegs = {PlanarLeg::Front, PlanarLeg::Rear};

namespace coord {
inline constexpr int kX = 0;
inline constexpr int kZ = 1;
inline constexpr int kPitch = 2;
inline constexpr int hip(PlanarLeg l) { return l == PlanarLeg::Front ? 3 : 5; }
inline constexpr int knee(PlanarLeg l) { return l == PlanarLeg::Front ? 4 : 6; }
}  // namespace coord

struct LinkParams {
  double mass;
  double inertia;     // about the link COM, kg m^2
  double length;      // joint to distal joint (or foot), m
  double com_offset;  // distance of the COM from the proximal joint, m
};

struct RobotModel {
  double base_mass = 7.0;
  double base_inertia = 0.08;
  double hip_spacing = 0.366;  // front hip to rear hip, m
  LinkParams thigh{2.0, 0.012, 0.2, 0.05};
  LinkParams calf{0.4, 0.004, 0.2, 0.1};
  double gravity = 9.81;
  double friction = 0.6;
  Vec7 q_min = (Vec7() << -1e9, -1e9, -1e9, -1.6, 0.05, -1.6, 0.05).finished();
  Vec7 q_max = (Vec7() << 1e9, 1e9, 1e9, 1.6, 2.7, 1.6, 2.7).finished();
  Vec7 qdot_max = Vec7::Constant(30.0);
  Vec4 tau_max = Vec4::Constant(67.0);

  double total_mass() const { return base_mass + 2.0 * (thigh.mass + calf.mass); }
  Vec2d hip_offset(PlanarLeg l) const {
    return Vec2d(l == PlanarLeg::Front ? hip_spacing / 2 : -hip_spacing / 2, 0.0);
  }
  void validate() const;

  /// Key-value JSON config; every key is optional and defaults to the values
  /// above. See README for the schema.
  static RobotModel from_json_file(const std::string& path);
  static RobotModel from_json_text(const std::string& text);
  std::string to_json_text() const;
};

struct FullState {
  Vec7 q = Vec7::Zero();
  Vec7 qdot = Vec7::Zero();
};

using ContactSet = std::array<bool, 2>;  // stance flag per PlanarLeg

int stance_count(const ContactSet& c);

/// Selection matrix: S' tau puts tau on the four joint rows, zero on the base.
Eigen::Matrix<double, kActuated, kDof> selection_matrix();

/// Mass matrix by the composite-rigid-body algorithm.
Mat7 mass_matrix(const RobotModel& model, const Vec7& q);

/// Recursive Newton-Euler inverse dynamics.
Vec7 inverse_dynamics(const RobotModel& model, const Vec7& q, const Vec7& qdot, const Vec7& qdd,
                      bool with_gravity = true);

/// Coriolis, centrifugal and gravity forces, H(q, qd).
Vec7 bias_forces(const RobotModel& model, const Vec7& q, const Vec7& qdot);
Vec7 gravity_forces(const RobotModel& model, const Vec7& q);

Vec2d foot_position(const RobotModel& model, const Vec7& q, PlanarLeg leg);
Vec2d hip_position(const RobotModel& model, const Vec7& q, PlanarLeg leg);
/// 2 x 7 translational Jacobian of a foot.
Eigen::Matrix<double, 2, kDof> foot_jacobian(const RobotModel& model, const Vec7& q, PlanarLeg leg);
/// Jdot qdot of a foot.
Vec2d foot_drift(const RobotModel& model, const Vec7& q, const Vec7& qdot, PlanarLeg leg);

struct ContactJacobian {
  MatXd J;            // n_c x 7, two rows (x, z) per stance foot, Front first
  VecXd Jdot_qdot;    // n_c
  bool rank_deficient = false;
};

ContactJacobian contact_jacobian(const RobotModel& model, const Vec7& q, const Vec7& qdot,
                                 const ContactSet& contacts);

struct ForwardDynamicsResult {
  Vec7 qdd;
  bool torque_limit_violated = false;
};

/// qdd = D^-1 (S' tau + Jc' Fc - H). Torques beyond the model limits are
/// flagged, not clamped.
ForwardDynamicsResult forward_dynamics(const RobotModel& model, const FullState& state,
                                       const Vec4& tau, const VecXd& F_c,
                                       const ContactSet& contacts);

/// Baumgarte-stabilized holonomic contact: Jc qdd + Jdot qd = -2 zeta omega Jc qd
/// - omega^2 (p_foot - anchor).
struct ContactStabilization {
  double omega = 50.0;
  double zeta = 1.0;
};

/// Right-hand side r of the stabilized contact rows Jc qdd = r.
VecXd contact_acceleration_target(const RobotModel& model, const FullState& state,
                                  const ContactSet& contacts, const std::array<Vec2d, 2>& anchors,
                                  const ContactStabilization& stab);

struct ConstrainedDynamicsResult {
  Vec7 qdd;
  VecXd F_c;
  bool torque_limit_violated = false;
};

/// Plant dynamics with rigid stance contacts: solves for the contact forces
/// that enforce the stabilized contact rows, then the accelerations.
ConstrainedDynamicsResult constrained_forward_dynamics(const RobotModel& model,
                                                       const FullState& state, const Vec4& tau,
                                                       const ContactSet& contacts,
                                                       const std::array<Vec2d, 2>& anchors,
                                                       const ContactStabilization& stab);

/// One RK4 step of the contact-constrained plant with torque held constant.
FullState step_plant(const RobotModel& model, const FullState& state, const Vec4& tau,
                     const ContactSet& contacts, const std::array<Vec2d, 2>& anchors,
                     const ContactStabilization& stab, double dt);

double kinetic_energy(const RobotModel& model, const FullState& state);
double potential_energy(const RobotModel& model, const Vec7& q);

/// Planar two-link inverse kinematics (knee-backward branch) for a foot target
/// given relative to the hip in the body frame.
struct LegIkResult {
  double hip;
  double knee;
  bool clamped = false;  // target was outside the reachable annulus
};
LegIkResult leg_ik(const RobotModel& model, const Vec2d& foot_in_hip_frame);

/// Standing posture with the hips at `height` above the feet, feet under hips.
FullState standing_state(const RobotModel& model, double height);

}  // namespace safewalk
