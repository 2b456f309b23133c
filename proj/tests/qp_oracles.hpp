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

// Test-only reference solutions for small QPs. These solve the KKT conditions
// by direct linear algebra and by exhaustive enumeration of active sets, and
// share no code with the active-set solver.

#include <limits>
#include <optional>
#include <random>

#include "safewalk/qp_solver.hpp"

namespace safewalk::testing {

inline VecXd kkt_direct(const MatXd& P, const VecXd& q, const MatXd& A, const VecXd& b) {
  const Eigen::Index n = q.size();
  const Eigen::Index m = A.rows();
  MatXd K = MatXd::Zero(n + m, n + m);
  K.topLeftCorner(n, n) = P;
  K.topRightCorner(n, m) = A.transpose();
  K.bottomLeftCorner(m, n) = A;
  VecXd rhs(n + m);
  rhs << -q, b;
  return K.fullPivLu().solve(rhs).head(n);
}

// Enumerates every subset of inequality rows (including bound rows) as
// equalities; returns the best objective among feasible stationary points.
inline std::optional<double> brute_force_objective(const QpProblemd& p) {
  const Eigen::Index n = p.num_vars();
  MatXd rows = p.G;
  VecXd rhs = p.h;
  auto append = [&](const Eigen::RowVectorXd& r, double v) {
    rows.conservativeResize(rows.rows() + 1, n);
    rhs.conservativeResize(rhs.size() + 1);
    rows.row(rows.rows() - 1) = r;
    rhs[rhs.size() - 1] = v;
  };
  if (rows.cols() != n) rows.resize(0, n);
  for (Eigen::Index i = 0; i < p.ub.size(); ++i) {
    Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(n);
    e[i] = 1;
    append(e, p.ub[i]);
  }
  for (Eigen::Index i = 0; i < p.lb.size(); ++i) {
    Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(n);
    e[i] = -1;
    append(e, -p.lb[i]);
  }
  const auto m = rows.rows();
  const Eigen::Index me = p.A_eq.rows();
  std::optional<double> best;
  for (long mask = 0; mask < (1L << m); ++mask) {
    if (__builtin_popcountl(static_cast<unsigned long>(mask)) + me > n) continue;
    MatXd A(me, n);
    VecXd b(me);
    if (me) {
      A = p.A_eq;
      b = p.b_eq;
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!(mask & (1L << i))) continue;
      A.conservativeResize(A.rows() + 1, n);
      b.conservativeResize(b.size() + 1);
      A.row(A.rows() - 1) = rows.row(i);
      b[b.size() - 1] = rhs[i];
    }
    MatXd K = MatXd::Zero(n + A.rows(), n + A.rows());
    K.topLeftCorner(n, n) = p.P;
    K.topRightCorner(n, A.rows()) = A.transpose();
    K.bottomLeftCorner(A.rows(), n) = A;
    Eigen::FullPivLU<MatXd> lu(K);
    if (lu.rank() < K.rows()) continue;
    VecXd r(n + A.rows());
    r << -p.q, b;
    const VecXd z = lu.solve(r).head(n);
    if (m && ((rows * z - rhs).maxCoeff() > 1e-9)) continue;
    if (me && (p.A_eq * z - p.b_eq).lpNorm<Eigen::Infinity>() > 1e-9) continue;
    const double obj = 0.5 * z.dot(p.P * z) + p.q.dot(z);
    if (!best || obj < *best) best = obj;
  }
  return best;
}

inline QpProblemd random_qp(std::mt19937_64& rng, int n, int m_eq, int m_in, bool bounds) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  QpProblemd p;
  MatXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = g(rng);
  p.P = M * M.transpose() + 0.1 * MatXd::Identity(n, n);
  p.q.resize(n);
  for (int i = 0; i < n; ++i) p.q[i] = 3.0 * g(rng);
  // Constraints built around a known feasible point.
  VecXd z0(n);
  for (int i = 0; i < n; ++i) z0[i] = 0.5 * g(rng);
  p.A_eq.resize(m_eq, n);
  for (int i = 0; i < m_eq; ++i)
    for (int j = 0; j < n; ++j) p.A_eq(i, j) = g(rng);
  p.b_eq = p.A_eq * z0;
  p.G.resize(m_in, n);
  for (int i = 0; i < m_in; ++i)
    for (int j = 0; j < n; ++j) p.G(i, j) = g(rng);
  p.h = p.G * z0;
  for (int i = 0; i < m_in; ++i) p.h[i] += u(rng);
  if (bounds) {
    p.lb = z0.array() - 1.0;
    p.ub = z0.array() + 1.0;
  }
  return p;
}

}  // namespace safewalk::testing
