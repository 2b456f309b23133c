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

#include "safewalk/rigid_body.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Cholesky>
#include <json.hpp>

namespace safewalk {

namespace {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using Mat23 = Eigen::Matrix<double, 2, kDof>;

// Planar spatial algebra; motion vectors are (omega, vx, vz).
Mat3 plnr(double theta, const Vec2d& r) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat3 X;
  X << 1, 0, 0,
       s * r.x() - c * r.y(), c, s,
       c * r.x() + s * r.y(), -s, c;
  return X;
}

Mat3 crm(const Vec3& v) {
  Mat3 m;
  m << 0, 0, 0,
       v(2), 0, -v(0),
       -v(1), v(0), 0;
  return m;
}

Mat3 crf(const Vec3& v) { return -crm(v).transpose(); }

Mat3 mci(double m, const Vec2d& c, double ic) {
  Mat3 I;
  I << ic + m * c.squaredNorm(), -m * c.y(), m * c.x(),
       -m * c.y(), m, 0,
       m * c.x(), 0, m;
  return I;
}

enum class JointKind { Px, Pz, R };

struct Body {
  int parent;
  JointKind kind;
  Vec2d tree_offset;
  Mat3 inertia;
};

std::array<Body, kDof> build_tree(const RobotModel& m) {
  const Mat3 zero = Mat3::Zero();
  const Mat3 thigh = mci(m.thigh.mass, Vec2d(0, -m.thigh.com_offset), m.thigh.inertia);
  const Mat3 calf = mci(m.calf.mass, Vec2d(0, -m.calf.com_offset), m.calf.inertia);
  return {{
      {-1, JointKind::Px, Vec2d::Zero(), zero},
      {0, JointKind::Pz, Vec2d::Zero(), zero},
      {1, JointKind::R, Vec2d::Zero(), mci(m.base_mass, Vec2d::Zero(), m.base_inertia)},
      {2, JointKind::R, m.hip_offset(PlanarLeg::Front), thigh},
      {3, JointKind::R, Vec2d(0, -m.thigh.length), calf},
      {2, JointKind::R, m.hip_offset(PlanarLeg::Rear), thigh},
      {5, JointKind::R, Vec2d(0, -m.thigh.length), calf},
  }};
}

Vec3 motion_subspace(JointKind k) {
  switch (k) {
    case JointKind::Px: return Vec3(0, 1, 0);
    case JointKind::Pz: return Vec3(0, 0, 1);
    case JointKind::R: break;
  }
  return Vec3(1, 0, 0);
}

Mat3 joint_transform(JointKind k, double q) {
  switch (k) {
    case JointKind::Px: return plnr(0.0, Vec2d(q, 0));
    case JointKind::Pz: return plnr(0.0, Vec2d(0, q));
    case JointKind::R: break;
  }
  return plnr(q, Vec2d::Zero());
}

std::array<Mat3, kDof> link_transforms(const std::array<Body, kDof>& tree, const Vec7& q) {
  std::array<Mat3, kDof> xup;
  for (int i = 0; i < kDof; ++i) {
    xup[i] = joint_transform(tree[i].kind, q(i)) * plnr(0.0, tree[i].tree_offset);
  }
  return xup;
}

Mat2d rot(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat2d r;
  r << c, -s, s, c;
  return r;
}

// 90 degree counterclockwise rotation: d/da (R(a) w) = J R(a) w.
Vec2d perp(const Vec2d& v) { return Vec2d(-v.y(), v.x()); }

struct LegGeometry {
  Vec2d hip_arm;    // R(theta) hip_offset
  Vec2d thigh_arm;  // R(theta + q_h) (0, -l_t)
  Vec2d calf_arm;   // R(theta + q_h + q_k) (0, -l_c)
};

LegGeometry leg_geometry(const RobotModel& m, const Vec7& q, PlanarLeg leg) {
  const double th = q(coord::kPitch);
  const double a2 = th + q(coord::hip(leg));
  const double a3 = a2 + q(coord::knee(leg));
  return {rot(th) * m.hip_offset(leg), rot(a2) * Vec2d(0, -m.thigh.length),
          rot(a3) * Vec2d(0, -m.calf.length)};
}

void check_state(const Vec7& q) {
  if (!q.allFinite()) throw InvalidArgument("configuration must be finite");
}

}  // namespace

void RobotModel::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be > 0");
  };
  positive(base_mass, "base_mass");
  positive(base_inertia, "base_inertia");
  positive(hip_spacing, "hip_spacing");
  for (const LinkParams* l : {&thigh, &calf}) {
    positive(l->mass, "link mass");
    positive(l->inertia, "link inertia");
    positive(l->length, "link length");
    if (!(l->com_offset >= 0.0)) throw InvalidArgument("link com_offset must be >= 0");
  }
  positive(gravity, "gravity");
  positive(friction, "friction");
  for (int i = 0; i < kDof; ++i) {
    if (!(q_min(i) < q_max(i))) throw InvalidArgument("joint position limits must be proper");
    positive(qdot_max(i), "velocity limit");
  }
  for (int i = 0; i < kActuated; ++i) positive(tau_max(i), "torque limit");
}

namespace {

template <int N>
void read_vec(const nlohmann::json& j, const char* key, Eigen::Matrix<double, N, 1>& v) {
  if (!j.contains(key)) return;
  const auto& a = j.at(key);
  if (!a.is_array() || static_cast<int>(a.size()) != N) {
    throw InvalidArgument(std::string("model key '") + key + "' must be an array of " +
                          std::to_string(N));
  }
  for (int i = 0; i < N; ++i) v(i) = a[i].get<double>();
}

void read_link(const nlohmann::json& j, const char* key, LinkParams& l) {
  if (!j.contains(key)) return;
  const auto& o = j.at(key);
  l.mass = o.value("mass", l.mass);
  l.inertia = o.value("inertia", l.inertia);
  l.length = o.value("length", l.length);
  l.com_offset = o.value("com_offset", l.com_offset);
}

template <int N>
nlohmann::json vec_json(const Eigen::Matrix<double, N, 1>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < N; ++i) a.push_back(v(i));
  return a;
}

}  // namespace

RobotModel RobotModel::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("model config: ") + e.what());
  }
  RobotModel m;
  try {
    m.base_mass = j.value("base_mass", m.base_mass);
    m.base_inertia = j.value("base_inertia", m.base_inertia);
    m.hip_spacing = j.value("hip_spacing", m.hip_spacing);
    m.gravity = j.value("gravity", m.gravity);
    m.friction = j.value("friction", m.friction);
    read_link(j, "thigh", m.thigh);
    read_link(j, "calf", m.calf);
    read_vec(j, "q_min", m.q_min);
    read_vec(j, "q_max", m.q_max);
    read_vec(j, "qdot_max", m.qdot_max);
    read_vec(j, "tau_max", m.tau_max);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("model config: ") + e.what());
  }
  m.validate();
  return m;
}

RobotModel RobotModel::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string RobotModel::to_json_text() const {
  auto link = [](const LinkParams& l) {
    return nlohmann::json{{"mass", l.mass}, {"inertia", l.inertia}, {"length", l.length},
                          {"com_offset", l.com_offset}};
  };
  nlohmann::json j{{"base_mass", base_mass}, {"base_inertia", base_inertia},
                   {"hip_spacing", hip_spacing}, {"gravity", gravity},
                   {"friction", friction}, {"thigh", link(thigh)},
                   {"calf", link(calf)}, {"q_min", vec_json(q_min)},
                   {"q_max", vec_json(q_max)}, {"qdot_max", vec_json(qdot_max)},
                   {"tau_max", vec_json(tau_max)}};
  return j.dump(2);
}

int stance_count(const ContactSet& c) { return int(c[0]) + int(c[1]); }

Eigen::Matrix<double, kActuated, kDof> selection_matrix() {
  Eigen::Matrix<double, kActuated, kDof> S = Eigen::Matrix<double, kActuated, kDof>::Zero();
  S.rightCols<kActuated>().setIdentity();
  return S;
}

Mat7 mass_matrix(const RobotModel& model, const Vec7& q) {
  check_state(q);
  const auto tree = build_tree(model);
  const auto xup = link_transforms(tree, q);
  std::array<Mat3, kDof> ic;
  for (int i = 0; i < kDof; ++i) ic[i] = tree[i].inertia;
  for (int i = kDof - 1; i >= 0; --i) {
    if (tree[i].parent >= 0) ic[tree[i].parent] += xup[i].transpose() * ic[i] * xup[i];
  }
  Mat7 D = Mat7::Zero();
  for (int i = 0; i < kDof; ++i) {
    Vec3 f = ic[i] * motion_subspace(tree[i].kind);
    D(i, i) = motion_subspace(tree[i].kind).dot(f);
    int j = i;
    while (tree[j].parent >= 0) {
      f = xup[j].transpose() * f;
      j = tree[j].parent;
      D(i, j) = D(j, i) = motion_subspace(tree[j].kind).dot(f);
    }
  }
  return D;
}

Vec7 inverse_dynamics(const RobotModel& model, const Vec7& q, const Vec7& qdot, const Vec7& qdd,
                      bool with_gravity) {
  check_state(q);
  const auto tree = build_tree(model);
  const auto xup = link_transforms(tree, q);
  const Vec3 a0(0, 0, with_gravity ? model.gravity : 0.0);
  std::array<Vec3, kDof> v, a, f;
  for (int i = 0; i < kDof; ++i) {
    const Vec3 s = motion_subspace(tree[i].kind);
    const Vec3 vj = s * qdot(i);
    const int p = tree[i].parent;
    if (p < 0) {
      v[i] = vj;
      a[i] = xup[i] * a0 + s * qdd(i);
    } else {
      v[i] = xup[i] * v[p] + vj;
      a[i] = xup[i] * a[p] + s * qdd(i) + crm(v[i]) * vj;
    }
    f[i] = tree[i].inertia * a[i] + crf(v[i]) * tree[i].inertia * v[i];
  }
  Vec7 tau;
  for (int i = kDof - 1; i >= 0; --i) {
    tau(i) = motion_subspace(tree[i].kind).dot(f[i]);
    if (tree[i].parent >= 0) f[tree[i].parent] += xup[i].transpose() * f[i];
  }
  return tau;
}

Vec7 bias_forces(const RobotModel& model, const Vec7& q, const Vec7& qdot) {
  return inverse_dynamics(model, q, qdot, Vec7::Zero(), true);
}

Vec7 gravity_forces(const RobotModel& model, const Vec7& q) {
  return inverse_dynamics(model, q, Vec7::Zero(), Vec7::Zero(), true);
}

Vec2d hip_position(const RobotModel& model, const Vec7& q, PlanarLeg leg) {
  check_state(q);
  return q.head<2>() + rot(q(coord::kPitch)) * model.hip_offset(leg);
}

Vec2d foot_position(const RobotModel& model, const Vec7& q, PlanarLeg leg) {
  check_state(q);
  const LegGeometry g = leg_geometry(model, q, leg);
  return q.head<2>() + g.hip_arm + g.thigh_arm + g.calf_arm;
}

Mat23 foot_jacobian(const RobotModel& model, const Vec7& q, PlanarLeg leg) {
  check_state(q);
  const LegGeometry g = leg_geometry(model, q, leg);
  Mat23 J = Mat23::Zero();
  J.col(coord::kX) = Vec2d(1, 0);
  J.col(coord::kZ) = Vec2d(0, 1);
  J.col(coord::kPitch) = perp(g.hip_arm + g.thigh_arm + g.calf_arm);
  J.col(coord::hip(leg)) = perp(g.thigh_arm + g.calf_arm);
  J.col(coord::knee(leg)) = perp(g.calf_arm);
  return J;
}

Vec2d foot_drift(const RobotModel& model, const Vec7& q, const Vec7& qdot, PlanarLeg leg) {
  check_state(q);
  const LegGeometry g = leg_geometry(model, q, leg);
  const double w1 = qdot(coord::kPitch);
  const double w2 = w1 + qdot(coord::hip(leg));
  const double w3 = w2 + qdot(coord::knee(leg));
  return -(w1 * w1 * g.hip_arm + w2 * w2 * g.thigh_arm + w3 * w3 * g.calf_arm);
}

ContactJacobian contact_jacobian(const RobotModel& model, const Vec7& q, const Vec7& qdot,
                                 const ContactSet& contacts) {
  const int nc = 2 * stance_count(contacts);
  if (nc == 0) throw InvalidArgument("contact_jacobian requires at least one stance foot");
  ContactJacobian out;
  out.J.resize(nc, kDof);
  out.Jdot_qdot.resize(nc);
  int row = 0;
  for (PlanarLeg leg : kPlanarLegs) {
    if (!contacts[static_cast<int>(leg)]) continue;
    out.J.middleRows<2>(row) = foot_jacobian(model, q, leg);
    out.Jdot_qdot.segment<2>(row) = foot_drift(model, q, qdot, leg);
    if (std::abs(std::sin(q(coord::knee(leg)))) < 1e-3) out.rank_deficient = true;
    row += 2;
  }
  return out;
}

namespace {

VecXd contact_force_term(const ContactJacobian& cj, const VecXd& F_c) {
  if (F_c.size() != cj.J.rows()) {
    throw InvalidArgument("contact force dimension does not match stance set");
  }
  return cj.J.transpose() * F_c;
}

bool torque_violation(const RobotModel& model, const Vec4& tau) {
  return ((tau.cwiseAbs() - model.tau_max).array() > 0.0).any();
}

}  // namespace

ForwardDynamicsResult forward_dynamics(const RobotModel& model, const FullState& state,
                                       const Vec4& tau, const VecXd& F_c,
                                       const ContactSet& contacts) {
  if (!state.qdot.allFinite() || !tau.allFinite()) {
    throw InvalidArgument("state and torque must be finite");
  }
  const Mat7 D = mass_matrix(model, state.q);
  Vec7 rhs = selection_matrix().transpose() * tau - bias_forces(model, state.q, state.qdot);
  if (stance_count(contacts) > 0) {
    rhs += contact_force_term(contact_jacobian(model, state.q, state.qdot, contacts), F_c);
  } else if (F_c.size() != 0) {
    throw InvalidArgument("contact forces given without stance feet");
  }
  const Eigen::LLT<Mat7> llt(D);
  if (llt.info() != Eigen::Success) throw Error("mass matrix factorization failed");
  return {llt.solve(rhs), torque_violation(model, tau)};
}

VecXd contact_acceleration_target(const RobotModel& model, const FullState& state,
                                  const ContactSet& contacts, const std::array<Vec2d, 2>& anchors,
                                  const ContactStabilization& stab) {
  const ContactJacobian cj = contact_jacobian(model, state.q, state.qdot, contacts);
  VecXd r = -cj.Jdot_qdot - 2.0 * stab.zeta * stab.omega * (cj.J * state.qdot);
  int row = 0;
  for (PlanarLeg leg : kPlanarLegs) {
    const int li = static_cast<int>(leg);
    if (!contacts[li]) continue;
    r.segment<2>(row) -= stab.omega * stab.omega * (foot_position(model, state.q, leg) - anchors[li]);
    row += 2;
  }
  return r;
}

ConstrainedDynamicsResult constrained_forward_dynamics(const RobotModel& model,
                                                       const FullState& state, const Vec4& tau,
                                                       const ContactSet& contacts,
                                                       const std::array<Vec2d, 2>& anchors,
                                                       const ContactStabilization& stab) {
  const Mat7 D = mass_matrix(model, state.q);
  const Eigen::LLT<Mat7> llt(D);
  if (llt.info() != Eigen::Success) throw Error("mass matrix factorization failed");
  const Vec7 free_rhs =
      selection_matrix().transpose() * tau - bias_forces(model, state.q, state.qdot);
  ConstrainedDynamicsResult out;
  out.torque_limit_violated = torque_violation(model, tau);
  if (stance_count(contacts) == 0) {
    out.qdd = llt.solve(free_rhs);
    out.F_c.resize(0);
    return out;
  }
  const ContactJacobian cj = contact_jacobian(model, state.q, state.qdot, contacts);
  const VecXd target = contact_acceleration_target(model, state, contacts, anchors, stab);
  const MatXd DinvJt = llt.solve(cj.J.transpose());
  const Vec7 qdd_free = llt.solve(free_rhs);
  const MatXd schur = cj.J * DinvJt;
  out.F_c = schur.ldlt().solve(target - cj.J * qdd_free);
  out.qdd = qdd_free + DinvJt * out.F_c;
  return out;
}

FullState step_plant(const RobotModel& model, const FullState& state, const Vec4& tau,
                     const ContactSet& contacts, const std::array<Vec2d, 2>& anchors,
                     const ContactStabilization& stab, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
  auto accel = [&](const FullState& s) {
    return constrained_forward_dynamics(model, s, tau, contacts, anchors, stab).qdd;
  };
  const Vec7 k1v = accel(state);
  const FullState s2{state.q + 0.5 * dt * state.qdot, state.qdot + 0.5 * dt * k1v};
  const Vec7 k2v = accel(s2);
  const FullState s3{state.q + 0.5 * dt * s2.qdot, state.qdot + 0.5 * dt * k2v};
  const Vec7 k3v = accel(s3);
  const FullState s4{state.q + dt * s3.qdot, state.qdot + dt * k3v};
  const Vec7 k4v = accel(s4);
  return {state.q + dt / 6 * (state.qdot + 2 * s2.qdot + 2 * s3.qdot + s4.qdot),
          state.qdot + dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)};
}

double kinetic_energy(const RobotModel& model, const FullState& state) {
  return 0.5 * state.qdot.dot(mass_matrix(model, state.q) * state.qdot);
}

double potential_energy(const RobotModel& model, const Vec7& q) {
  double pe = model.base_mass * q(coord::kZ);
  for (PlanarLeg leg : kPlanarLegs) {
    const LegGeometry g = leg_geometry(model, q, leg);
    const Vec2d hip = q.head<2>() + g.hip_arm;
    const Vec2d knee = hip + g.thigh_arm;
    const Vec2d thigh_com = hip + g.thigh_arm * (model.thigh.com_offset / model.thigh.length);
    const Vec2d calf_com = knee + g.calf_arm * (model.calf.com_offset / model.calf.length);
    pe += model.thigh.mass * thigh_com.y() + model.calf.mass * calf_com.y();
  }
  return model.gravity * pe;
}

LegIkResult leg_ik(const RobotModel& model, const Vec2d& foot) {
  const double lt = model.thigh.length, lc = model.calf.length;
  const double d_min = std::abs(lt - lc) + 1e-6;
  const double d_max = lt + lc - 1e-6;
  double d = foot.norm();
  LegIkResult out{0.0, 0.0, false};
  Vec2d t = foot;
  if (d < d_min || d > d_max) {
    out.clamped = true;
    const double dc = std::clamp(d, d_min, d_max);
    t = d > 0.0 ? Vec2d(foot * (dc / d)) : Vec2d(0.0, -dc);
    d = dc;
  }
  const double ck = std::clamp((d * d - lt * lt - lc * lc) / (2.0 * lt * lc), -1.0, 1.0);
  out.knee = std::acos(ck);
  out.hip = std::atan2(t.x(), -t.y()) -
            std::atan2(lc * std::sin(out.knee), lt + lc * std::cos(out.knee));
  return out;
}

FullState standing_state(const RobotModel& model, double height) {
  FullState s;
  s.q(coord::kZ) = height;
  const LegIkResult ik = leg_ik(model, Vec2d(0.0, -height));
  for (PlanarLeg leg : kPlanarLegs) {
    s.q(coord::hip(leg)) = ik.hip;
    s.q(coord::knee(leg)) = ik.knee;
  }
  return s;
}

}  // namespace safewalk
