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

// Elliptical control barrier functions and the minimum-deviation safety
// filter. The barrier
//
//   h(x) = (x - xc)' A (x - xc) - 1 = x' A x + B x + c
//
// is negative inside the ellipse and positive outside, so the safe set
// {h >= 0} is everything outside it.
//
// The filter works in one of two readings of the base model:
//  - Kinematic: nu is a velocity command (phidot = nu). The row is
//      grad h(phi)' nu >= -alpha0 h(phi).
//  - ExtendedDegree2: nu is an acceleration. h has relative degree two, so
//    the row is built on he = hdot + lambda h:
//      grad h' nu >= -alpha0 he - 2 phidot' A phidot - lambda grad h' phidot.

#include <cmath>
#include <optional>
#include <type_traits>

#include "safewalk/geometry.hpp"
#include "safewalk/qp_solver.hpp"
#include "safewalk/reduced_order.hpp"

namespace safewalk {

template <typename Scalar>
struct EllipseCbf {
  Mat2<Scalar> A;
  Eigen::Matrix<Scalar, 1, 2> B;
  Scalar c;
  Ellipse<Scalar> source;
};

template <typename Scalar>
EllipseCbf<Scalar> build_ellipse_cbf(const Ellipse<Scalar>& e) {
  const Scalar ct = std::cos(e.theta);
  const Scalar st = std::sin(e.theta);
  const Scalar ia2 = Scalar(1) / (e.a * e.a);
  const Scalar ib2 = Scalar(1) / (e.b * e.b);
  Mat2<Scalar> A;
  A(0, 0) = ct * ct * ia2 + st * st * ib2;
  A(0, 1) = (ia2 - ib2) * ct * st;
  A(1, 0) = A(0, 1);
  A(1, 1) = st * st * ia2 + ct * ct * ib2;
  const Eigen::Matrix<Scalar, 1, 2> B = Scalar(-2) * e.center.transpose() * A;
  const Scalar c = e.center.dot(A * e.center) - Scalar(1);
  return {A, B, c, e};
}

template <typename Scalar>
Scalar h_value(const EllipseCbf<Scalar>& cbf, const std::type_identity_t<Vec2<Scalar>>& pos) {
  const Vec2<Scalar> d = pos - cbf.source.center;
  return d.dot(cbf.A * d) - Scalar(1);
}

template <typename Scalar>
Vec2<Scalar> h_gradient(const EllipseCbf<Scalar>& cbf,
                        const std::type_identity_t<Vec2<Scalar>>& pos) {
  return Scalar(2) * cbf.A * pos + cbf.B.transpose();
}

/// Gait-trigger barrier. Same quadratic form as h_value; positive means the
/// base is far enough from the unsafe region to trot.
template <typename Scalar>
Scalar evaluate_gait_region(const EllipseCbf<Scalar>& cbf_gait,
                            const std::type_identity_t<Vec2<Scalar>>& pos) {
  return h_value(cbf_gait, pos);
}

/// Linear extended class-K function alpha(h) = alpha0 h.
template <typename Scalar>
struct ClassKappa {
  Scalar alpha0;

  Scalar operator()(Scalar h) const { return alpha0 * h; }
};

enum class FilterMode { Kinematic, ExtendedDegree2 };

template <typename Scalar>
struct InputBox {
  Vec2<Scalar> lower;
  Vec2<Scalar> upper;
};

template <typename Scalar>
struct FilterConfig {
  FilterMode mode = FilterMode::Kinematic;
  Scalar lambda = Scalar(1);  // ExtendedDegree2 only
  std::optional<InputBox<Scalar>> input_bounds;
};

/// The single affine safety row a' nu >= b.
template <typename Scalar>
struct CbfRow {
  Vec2<Scalar> a;
  Scalar b;

  Scalar residual(const Vec2<Scalar>& nu) const { return a.dot(nu) - b; }
};

template <typename Scalar>
CbfRow<Scalar> cbf_row(const EllipseCbf<Scalar>& cbf, const ReducedState<Scalar>& x,
                       const ClassKappa<Scalar>& alpha, const FilterConfig<Scalar>& cfg) {
  if (!(alpha.alpha0 > 0)) throw InvalidArgument("class-K slope must be positive");
  const Scalar h = h_value(cbf, x.phi);
  const Vec2<Scalar> grad = h_gradient(cbf, x.phi);
  if (cfg.mode == FilterMode::Kinematic) return {grad, -alpha(h)};
  if (!(cfg.lambda > 0)) throw InvalidArgument("extended barrier rate must be positive");
  const Scalar hdot = grad.dot(x.phidot);
  const Scalar he = hdot + cfg.lambda * h;
  const Scalar curvature = Scalar(2) * x.phidot.dot(cbf.A * x.phidot);
  return {grad, -alpha(he) - curvature - cfg.lambda * hdot};
}

/// argmin |nu_d - nu|^2 subject to the safety row and optional input box.
template <typename Scalar>
Vec2<Scalar> filter_qp(const EllipseCbf<Scalar>& cbf, const ReducedState<Scalar>& x,
                       const std::type_identity_t<Vec2<Scalar>>& nu_d,
                       const ClassKappa<Scalar>& alpha, const FilterConfig<Scalar>& cfg,
                       Scalar tol = Scalar(1e-8)) {
  const CbfRow<Scalar> row = cbf_row(cbf, x, alpha, cfg);
  QpProblem<Scalar> p;
  p.P = Scalar(2) * MatX<Scalar>::Identity(2, 2);
  p.q = Scalar(-2) * nu_d;
  p.G = -row.a.transpose();
  p.h = VecX<Scalar>::Constant(1, -row.b);
  if (cfg.input_bounds) {
    p.lb = cfg.input_bounds->lower;
    p.ub = cfg.input_bounds->upper;
  }
  QpSettings<Scalar> settings;
  settings.tol = tol;
  const QpSolution<Scalar> s = solve(p, settings);
  if (s.status == QpStatus::Infeasible)
    throw Infeasible("safety filter has no admissible input", static_cast<double>(s.kkt.primal));
  if (!s.ok()) throw Error("safety filter QP did not converge");
  return s.z;
}

/// Analytic projection onto the half-plane a' nu >= b (no input bounds).
template <typename Scalar>
Vec2<Scalar> filter_closed_form(const EllipseCbf<Scalar>& cbf, const ReducedState<Scalar>& x,
                                const std::type_identity_t<Vec2<Scalar>>& nu_d,
                                const ClassKappa<Scalar>& alpha, const FilterConfig<Scalar>& cfg) {
  if (cfg.input_bounds) throw InvalidArgument("closed-form filter does not support input bounds");
  const CbfRow<Scalar> row = cbf_row(cbf, x, alpha, cfg);
  const Scalar aa = row.a.squaredNorm();
  const Scalar deficit = row.b - row.a.dot(nu_d);
  if (deficit <= 0) return nu_d;
  if (aa == Scalar(0)) {
    throw Infeasible("barrier gradient vanishes where the safety row is violated",
                     static_cast<double>(deficit));
  }
  return nu_d + (deficit / aa) * row.a;
}

using EllipseCbfd = EllipseCbf<double>;
using ClassKappad = ClassKappa<double>;
using FilterConfigd = FilterConfig<double>;

}  // namespace safewalk
