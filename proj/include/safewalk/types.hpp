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

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace safewalk {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vec2d = Vec2<double>;
using Mat2d = Mat2<double>;
using VecXd = VecX<double>;
using MatXd = MatX<double>;

// Error hierarchy. Every failure a caller can act on has its own type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidRegion : public Error {
 public:
  using Error::Error;
};

class InvalidSegment : public Error {
 public:
  using Error::Error;
};

class NotInRegion : public Error {
 public:
  using Error::Error;
};

class UnreachableFoothold : public Error {
 public:
  using Error::Error;
};

/// Raised when a QP-backed component has no feasible point. `residual` is the
/// constraint violation the solver could not remove.
class Infeasible : public Error {
 public:
  Infeasible(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace safewalk
