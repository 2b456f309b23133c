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

// Double-integrator abstraction of the base: position phi and velocity phidot
// driven by a planar input nu.

#include <type_traits>

#include "safewalk/types.hpp"

namespace safewalk {

template <typename Scalar>
struct ReducedState {
  Vec2<Scalar> phi = Vec2<Scalar>::Zero();
  Vec2<Scalar> phidot = Vec2<Scalar>::Zero();

  Eigen::Matrix<Scalar, 4, 1> stacked() const {
    Eigen::Matrix<Scalar, 4, 1> x;
    x << phi, phidot;
    return x;
  }
};

/// Time derivative of a ReducedState: (phidot, phiddot).
template <typename Scalar>
struct ReducedDerivative {
  Vec2<Scalar> dphi;
  Vec2<Scalar> dphidot;
};

template <typename Scalar>
ReducedDerivative<Scalar> dynamics(const ReducedState<Scalar>& x,
                                   const std::type_identity_t<Vec2<Scalar>>& nu) {
  return {x.phidot, nu};
}

/// Exact discretization for an input held constant over dt.
template <typename Scalar>
ReducedState<Scalar> step(const ReducedState<Scalar>& x,
                          const std::type_identity_t<Vec2<Scalar>>& nu,
                          std::type_identity_t<Scalar> dt) {
  if (!(dt > 0)) throw InvalidArgument("integration step must be positive");
  ReducedState<Scalar> out;
  out.phi = x.phi + x.phidot * dt + Scalar(0.5) * nu * dt * dt;
  out.phidot = x.phidot + nu * dt;
  return out;
}

template <typename Scalar>
struct PdGains {
  Scalar kp;
  Scalar kd;
};

/// nu_d = kp (phi_d - phi) + kd (phidot_d - phidot).
template <typename Scalar>
Vec2<Scalar> nominal_controller(const ReducedState<Scalar>& x, const ReducedState<Scalar>& x_des,
                                const PdGains<Scalar>& gains) {
  if (gains.kp < 0 || gains.kd < 0) throw InvalidArgument("controller gains must be nonnegative");
  return gains.kp * (x_des.phi - x.phi) + gains.kd * (x_des.phidot - x.phidot);
}

using ReducedStated = ReducedState<double>;
using PdGainsd = PdGains<double>;

}  // namespace safewalk
