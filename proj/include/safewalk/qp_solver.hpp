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

// Dense convex QP
//
//   minimize    1/2 z' P z + q' z
//   subject to  A_eq z  = b_eq
//               G z    <= h
//               lb <= z <= ub
//
// solved with the Goldfarb-Idnani dual active-set method. The method starts
// from the unconstrained minimizer and adds violated constraints one at a time
// while keeping dual feasibility, so it needs no feasible starting point and
// certifies infeasibility when no dual step is bounded. A positive
// semidefinite P is handled by an outer proximal-point loop.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "safewalk/types.hpp"

namespace safewalk {

enum class QpStatus { Optimal, Infeasible, MaxIter };

inline const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::Infeasible: return "infeasible";
    case QpStatus::MaxIter: return "max-iter";
  }
  return "unknown";
}

template <typename Scalar>
struct QpProblem {
  MatX<Scalar> P;
  VecX<Scalar> q;
  MatX<Scalar> A_eq;
  VecX<Scalar> b_eq;
  MatX<Scalar> G;
  VecX<Scalar> h;
  // Empty, or one entry per variable. Infinite entries are ignored.
  VecX<Scalar> lb;
  VecX<Scalar> ub;

  Eigen::Index num_vars() const { return q.size(); }
};

template <typename Scalar>
struct KktResiduals {
  Scalar stationarity = 0;
  Scalar primal = 0;
  Scalar complementarity = 0;
  Scalar dual = 0;  // most negative inequality multiplier, as a positive number

  Scalar max() const { return std::max({stationarity, primal, complementarity, dual}); }
};

template <typename Scalar>
struct QpSolution {
  VecX<Scalar> z;
  VecX<Scalar> lambda;  // equality multipliers
  VecX<Scalar> mu;      // multipliers of G z <= h
  VecX<Scalar> mu_lb;   // multipliers of z >= lb
  VecX<Scalar> mu_ub;   // multipliers of z <= ub
  QpStatus status = QpStatus::MaxIter;
  KktResiduals<Scalar> kkt;
  int iterations = 0;
  // Active inequality constraints: G rows are 0..m-1, upper bounds m..m+n-1,
  // lower bounds m+n..m+2n-1. Feed back through QpSettings::warm_start.
  std::vector<int> active_set;

  bool ok() const { return status == QpStatus::Optimal; }
  Scalar objective(const QpProblem<Scalar>& p) const {
    return Scalar(0.5) * z.dot(p.P * z) + p.q.dot(z);
  }
};

template <typename Scalar>
struct QpSettings {
  Scalar tol = Scalar(1e-8);
  int max_iter = 1000;
  std::optional<std::vector<int>> warm_start;
};

/// Stationarity, primal feasibility, complementarity and dual-sign residuals
/// (infinity norms) of a candidate primal/dual pair.
template <typename Scalar>
KktResiduals<Scalar> kkt_residuals(const QpProblem<Scalar>& p, const QpSolution<Scalar>& s) {
  const Eigen::Index n = p.num_vars();
  const MatX<Scalar> P = (p.P + p.P.transpose()) / 2;
  VecX<Scalar> grad = P * s.z + p.q;
  if (p.A_eq.rows() > 0) grad += p.A_eq.transpose() * s.lambda;
  if (p.G.rows() > 0) grad += p.G.transpose() * s.mu;
  if (p.ub.size() == n) grad += s.mu_ub;
  if (p.lb.size() == n) grad -= s.mu_lb;

  KktResiduals<Scalar> r;
  r.stationarity = grad.size() ? grad.template lpNorm<Eigen::Infinity>() : Scalar(0);
  auto upd = [](Scalar& dst, Scalar v) { dst = std::max(dst, v); };
  if (p.A_eq.rows() > 0)
    upd(r.primal, (p.A_eq * s.z - p.b_eq).template lpNorm<Eigen::Infinity>());
  if (p.G.rows() > 0) {
    const VecX<Scalar> slack = p.G * s.z - p.h;
    for (Eigen::Index i = 0; i < slack.size(); ++i) {
      upd(r.primal, slack[i]);
      upd(r.complementarity, std::abs(s.mu[i] * slack[i]));
      upd(r.dual, -s.mu[i]);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p.ub.size() == n && std::isfinite(p.ub[i])) {
      const Scalar sl = s.z[i] - p.ub[i];
      upd(r.primal, sl);
      upd(r.complementarity, std::abs(s.mu_ub[i] * sl));
      upd(r.dual, -s.mu_ub[i]);
    }
    if (p.lb.size() == n && std::isfinite(p.lb[i])) {
      const Scalar sl = p.lb[i] - s.z[i];
      upd(r.primal, sl);
      upd(r.complementarity, std::abs(s.mu_lb[i] * sl));
      upd(r.dual, -s.mu_lb[i]);
    }
  }
  return r;
}

namespace detail {

// Constraints in the Goldfarb-Idnani orientation: rows of E with E z = e and
// rows of N with N z >= c. `id` maps each N row back to the public numbering.
template <typename Scalar>
struct Canonical {
  MatX<Scalar> E;
  VecX<Scalar> e;
  MatX<Scalar> N;
  VecX<Scalar> c;
  std::vector<int> id;
};

template <typename Scalar>
Canonical<Scalar> canonicalize(const QpProblem<Scalar>& p) {
  const Eigen::Index n = p.num_vars();
  const Eigen::Index m = p.G.rows();
  Canonical<Scalar> out;
  out.E = p.A_eq;
  out.e = p.b_eq;
  if (out.E.cols() != n) out.E.resize(0, n);
  if (out.e.size() != out.E.rows()) out.e.resize(out.E.rows());

  std::vector<int> ids;
  for (Eigen::Index i = 0; i < m; ++i) ids.push_back(static_cast<int>(i));
  if (p.ub.size() == n)
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::isfinite(p.ub[i])) ids.push_back(static_cast<int>(m + i));
  if (p.lb.size() == n)
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::isfinite(p.lb[i])) ids.push_back(static_cast<int>(m + n + i));

  out.N.setZero(static_cast<Eigen::Index>(ids.size()), n);
  out.c.resize(static_cast<Eigen::Index>(ids.size()));
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const int id = ids[k];
    const auto r = static_cast<Eigen::Index>(k);
    if (id < m) {
      out.N.row(r) = -p.G.row(id);
      out.c[r] = -p.h[id];
    } else if (id < m + n) {
      out.N(r, id - m) = -1;
      out.c[r] = -p.ub[id - m];
    } else {
      out.N(r, id - m - n) = 1;
      out.c[r] = p.lb[id - m - n];
    }
  }
  out.id = std::move(ids);
  return out;
}

template <typename Scalar>
struct GiResult {
  VecX<Scalar> x;
  VecX<Scalar> u_eq;    // one per E row, GI sign convention
  VecX<Scalar> u_ineq;  // one per N row, GI sign convention
  QpStatus status = QpStatus::MaxIter;
  std::vector<Eigen::Index> working;  // active N rows
  Scalar infeasibility = 0;
  int iterations = 0;
};

// Goldfarb-Idnani for strictly convex Hessian H with Cholesky factor L.
template <typename Scalar>
class GoldfarbIdnani {
 public:
  GoldfarbIdnani(const Eigen::LLT<MatX<Scalar>>& llt, const VecX<Scalar>& g,
                 const Canonical<Scalar>& cons, int max_iter)
      : n_(g.size()), g_(g), cons_(cons), max_iter_(max_iter) {
    const MatX<Scalar> L = llt.matrixL();
    J_ = L.transpose().template triangularView<Eigen::Upper>().solve(
        MatX<Scalar>::Identity(n_, n_));
    R_.setZero(n_, n_);
    u_.setZero(n_);
    active_.assign(static_cast<std::size_t>(n_), 0);
  }

  GiResult<Scalar> run() {
    GiResult<Scalar> res;
    const Eigen::Index me = cons_.E.rows();
    const Eigen::Index mi = cons_.N.rows();
    x_ = -(J_ * (J_.transpose() * g_));

    VecX<Scalar> d(n_), z(n_), r(n_);
    for (Eigen::Index i = 0; i < me; ++i) {
      const VecX<Scalar> np = cons_.E.row(i).transpose();
      directions(np, d, z, r);
      const Scalar viol = cons_.e[i] - np.dot(x_);
      const Scalar zn = z.dot(np);
      const Scalar scale = std::max<Scalar>(Scalar(1), np.norm() * (1 + x_.norm()));
      if (std::abs(zn) <= eps() * scale * np.norm()) {
        // Dependent on rows already active: either redundant or inconsistent.
        if (std::abs(viol) > Scalar(1e3) * eps() * scale) {
          res.status = QpStatus::Infeasible;
          res.infeasibility = std::abs(viol);
          return finish(res);
        }
        continue;
      }
      const Scalar t = viol / zn;
      x_ += t * z;
      u_.head(iq_) -= t * r.head(iq_);
      u_[iq_] = t;
      if (!add_constraint(d)) {
        u_[iq_] = 0;
        continue;
      }
      active_[static_cast<std::size_t>(iq_ - 1)] = -static_cast<int>(i) - 1;
    }
    num_eq_active_ = iq_;

    std::vector<char> is_active(static_cast<std::size_t>(mi), 0);
    std::vector<char> excluded(static_cast<std::size_t>(mi), 0);
    for (int iter = 0;; ++iter) {
      res.iterations = iter;
      if (iter >= max_iter_) {
        res.status = QpStatus::MaxIter;
        return finish(res);
      }
      // Most violated inactive inequality.
      Eigen::Index p = -1;
      Scalar worst = 0;
      for (Eigen::Index j = 0; j < mi; ++j) {
        if (is_active[static_cast<std::size_t>(j)] || excluded[static_cast<std::size_t>(j)]) continue;
        const Scalar s = cons_.N.row(j).dot(x_) - cons_.c[j];
        const Scalar thresh =
            eps() * Scalar(10) * (Scalar(1) + std::abs(cons_.c[j]) + cons_.N.row(j).norm() * x_.norm());
        if (s < -thresh && s < worst) {
          worst = s;
          p = j;
        }
      }
      if (p < 0) {
        res.status = QpStatus::Optimal;
        return finish(res);
      }
      const VecX<Scalar> np = cons_.N.row(p).transpose();
      Scalar u_plus = 0;
      Scalar s_p = worst;
      for (;;) {
        directions(np, d, z, r);
        // Partial (dual) step bound from active inequalities.
        Scalar t1 = std::numeric_limits<Scalar>::infinity();
        Eigen::Index drop = -1;
        for (Eigen::Index k = num_eq_active_; k < iq_; ++k) {
          if (r[k] > 0) {
            const Scalar ratio = u_[k] / r[k];
            if (ratio < t1) {
              t1 = ratio;
              drop = k;
            }
          }
        }
        Scalar t2 = std::numeric_limits<Scalar>::infinity();
        const Scalar zn = z.dot(np);
        if (z.norm() > eps() * Scalar(100) * np.norm() && zn > 0) t2 = -s_p / zn;
        const Scalar t = std::min(t1, t2);
        if (!std::isfinite(t)) {
          res.status = QpStatus::Infeasible;
          res.infeasibility = -s_p;
          return finish(res);
        }
        if (!std::isfinite(t2)) {
          u_.head(iq_) -= t * r.head(iq_);
          u_plus += t;
          release(drop, is_active);
          continue;
        }
        x_ += t * z;
        u_.head(iq_) -= t * r.head(iq_);
        u_plus += t;
        if (t == t2) {
          directions(np, d, z, r);
          if (!add_constraint(d)) {
            excluded[static_cast<std::size_t>(p)] = 1;
          } else {
            u_[iq_ - 1] = u_plus;
            active_[static_cast<std::size_t>(iq_ - 1)] = static_cast<int>(p);
            is_active[static_cast<std::size_t>(p)] = 1;
          }
          break;
        }
        release(drop, is_active);
        s_p = np.dot(x_) - cons_.c[p];
        if (s_p >= 0) break;
      }
    }
  }

 private:
  static Scalar eps() { return std::numeric_limits<Scalar>::epsilon(); }

  void directions(const VecX<Scalar>& np, VecX<Scalar>& d, VecX<Scalar>& z, VecX<Scalar>& r) const {
    d = J_.transpose() * np;
    z = J_.rightCols(n_ - iq_) * d.tail(n_ - iq_);
    r.setZero(n_);
    if (iq_ > 0)
      r.head(iq_) = R_.topLeftCorner(iq_, iq_).template triangularView<Eigen::Upper>().solve(d.head(iq_));
  }

  bool add_constraint(VecX<Scalar>& d) {
    for (Eigen::Index j = n_ - 1; j > iq_; --j) {
      const Scalar a = d[j - 1];
      const Scalar b = d[j];
      if (b == 0) continue;
      const Scalar hyp = std::hypot(a, b);
      const Scalar cs = a / hyp;
      const Scalar sn = b / hyp;
      d[j - 1] = hyp;
      d[j] = 0;
      const VecX<Scalar> c1 = J_.col(j - 1);
      const VecX<Scalar> c2 = J_.col(j);
      J_.col(j - 1) = cs * c1 + sn * c2;
      J_.col(j) = -sn * c1 + cs * c2;
    }
    if (std::abs(d[iq_]) <= eps() * Scalar(100) * std::max(r_norm_, Scalar(1))) return false;
    R_.col(iq_).head(iq_ + 1) = d.head(iq_ + 1);
    r_norm_ = std::max(r_norm_, std::abs(d[iq_]));
    ++iq_;
    return true;
  }

  void release(Eigen::Index pos, std::vector<char>& is_active) {
    is_active[static_cast<std::size_t>(active_[static_cast<std::size_t>(pos)])] = 0;
    for (Eigen::Index k = pos; k < iq_ - 1; ++k) {
      active_[static_cast<std::size_t>(k)] = active_[static_cast<std::size_t>(k + 1)];
      u_[k] = u_[k + 1];
      R_.col(k) = R_.col(k + 1);
    }
    u_[iq_ - 1] = 0;
    R_.col(iq_ - 1).setZero();
    --iq_;
    for (Eigen::Index j = pos; j < iq_; ++j) {
      const Scalar a = R_(j, j);
      const Scalar b = R_(j + 1, j);
      if (b == 0) continue;
      const Scalar hyp = std::hypot(a, b);
      const Scalar cs = a / hyp;
      const Scalar sn = b / hyp;
      for (Eigen::Index k = j; k < iq_; ++k) {
        const Scalar t1 = R_(j, k);
        const Scalar t2 = R_(j + 1, k);
        R_(j, k) = cs * t1 + sn * t2;
        R_(j + 1, k) = -sn * t1 + cs * t2;
      }
      R_(j + 1, j) = 0;
      const VecX<Scalar> c1 = J_.col(j);
      const VecX<Scalar> c2 = J_.col(j + 1);
      J_.col(j) = cs * c1 + sn * c2;
      J_.col(j + 1) = -sn * c1 + cs * c2;
    }
  }

  GiResult<Scalar>& finish(GiResult<Scalar>& res) {
    res.x = x_;
    res.u_eq.setZero(cons_.E.rows());
    res.u_ineq.setZero(cons_.N.rows());
    res.working.clear();
    for (Eigen::Index k = 0; k < iq_; ++k) {
      const int a = active_[static_cast<std::size_t>(k)];
      if (a < 0) {
        res.u_eq[-a - 1] = u_[k];
      } else {
        res.u_ineq[a] = u_[k];
        res.working.push_back(a);
      }
    }
    return res;
  }

  Eigen::Index n_;
  VecX<Scalar> g_;
  const Canonical<Scalar>& cons_;
  int max_iter_;
  MatX<Scalar> J_;
  MatX<Scalar> R_;
  VecX<Scalar> u_;
  VecX<Scalar> x_;
  std::vector<int> active_;
  Eigen::Index iq_ = 0;
  Eigen::Index num_eq_active_ = 0;
  Scalar r_norm_ = 1;
};

// Solves the equality-constrained KKT system for a fixed working set of
// inequality rows, optionally refining an existing primal/dual guess.
template <typename Scalar>
bool solve_working_set(const MatX<Scalar>& P, const VecX<Scalar>& g, const Canonical<Scalar>& cons,
                       const std::vector<Eigen::Index>& work, VecX<Scalar>& x, VecX<Scalar>& u_eq,
                       VecX<Scalar>& u_ineq, int refinements) {
  const Eigen::Index n = g.size();
  const Eigen::Index me = cons.E.rows();
  const auto mw = static_cast<Eigen::Index>(work.size());
  MatX<Scalar> A(me + mw, n);
  VecX<Scalar> b(me + mw);
  A.topRows(me) = cons.E;
  b.head(me) = cons.e;
  for (Eigen::Index k = 0; k < mw; ++k) {
    A.row(me + k) = cons.N.row(work[static_cast<std::size_t>(k)]);
    b[me + k] = cons.c[work[static_cast<std::size_t>(k)]];
  }
  MatX<Scalar> K = MatX<Scalar>::Zero(n + me + mw, n + me + mw);
  K.topLeftCorner(n, n) = P;
  K.topRightCorner(n, me + mw) = -A.transpose();
  K.bottomLeftCorner(me + mw, n) = A;
  const Eigen::FullPivLU<MatX<Scalar>> lu(K);
  if (lu.rank() < K.rows()) return false;

  VecX<Scalar> y(me + mw);
  y.head(me) = u_eq;
  for (Eigen::Index k = 0; k < mw; ++k) y[me + k] = u_ineq[work[static_cast<std::size_t>(k)]];
  VecX<Scalar> sol(n + me + mw);
  sol << x, y;
  VecX<Scalar> rhs(n + me + mw);
  rhs << -g, b;
  for (int it = 0; it < refinements; ++it) sol += lu.solve(rhs - K * sol);
  x = sol.head(n);
  u_eq = sol.segment(n, me);
  u_ineq.setZero(cons.N.rows());
  for (Eigen::Index k = 0; k < mw; ++k) u_ineq[work[static_cast<std::size_t>(k)]] = sol[n + me + k];
  return true;
}

}  // namespace detail

/// Solves the QP. Always returns; the outcome is in `status`, and residuals
/// are attached regardless of it.
template <typename Scalar>
QpSolution<Scalar> solve(const QpProblem<Scalar>& problem, const QpSettings<Scalar>& settings = {}) {
  if (!(settings.tol > 0)) throw InvalidArgument("QP tolerance must be positive");
  const Eigen::Index n = problem.num_vars();
  if (problem.P.rows() != n || problem.P.cols() != n)
    throw InvalidArgument("QP cost matrix has inconsistent dimensions");
  if (problem.A_eq.rows() != problem.b_eq.size() ||
      (problem.A_eq.rows() > 0 && problem.A_eq.cols() != n))
    throw InvalidArgument("QP equality rows have inconsistent dimensions");
  if (problem.G.rows() != problem.h.size() || (problem.G.rows() > 0 && problem.G.cols() != n))
    throw InvalidArgument("QP inequality rows have inconsistent dimensions");
  if ((problem.lb.size() != 0 && problem.lb.size() != n) ||
      (problem.ub.size() != 0 && problem.ub.size() != n))
    throw InvalidArgument("QP bounds have inconsistent dimensions");

  const MatX<Scalar> P = (problem.P + problem.P.transpose()) / 2;
  const detail::Canonical<Scalar> cons = detail::canonicalize(problem);
  const Eigen::Index m = problem.G.rows();

  auto assemble = [&](const VecX<Scalar>& x, const VecX<Scalar>& u_eq, const VecX<Scalar>& u_ineq,
                      const std::vector<Eigen::Index>& working, QpStatus st, int iters) {
    QpSolution<Scalar> s;
    s.z = x;
    s.lambda = -u_eq;
    s.mu.setZero(m);
    if (problem.ub.size() == n) s.mu_ub.setZero(n);
    if (problem.lb.size() == n) s.mu_lb.setZero(n);
    for (std::size_t k = 0; k < cons.id.size(); ++k) {
      const int id = cons.id[k];
      const Scalar u = u_ineq[static_cast<Eigen::Index>(k)];
      if (id < m)
        s.mu[id] = u;
      else if (id < m + n)
        s.mu_ub[id - m] = u;
      else
        s.mu_lb[id - m - n] = u;
    }
    for (Eigen::Index k : working) s.active_set.push_back(cons.id[static_cast<std::size_t>(k)]);
    std::sort(s.active_set.begin(), s.active_set.end());
    s.status = st;
    s.iterations = iters;
    s.kkt = kkt_residuals(problem, s);
    if (st == QpStatus::Optimal && s.kkt.max() > settings.tol) s.status = QpStatus::MaxIter;
    return s;
  };

  auto working_set_of = [&](const std::vector<int>& ids) {
    std::vector<Eigen::Index> work;
    for (int id : ids) {
      auto it = std::find(cons.id.begin(), cons.id.end(), id);
      if (it != cons.id.end()) work.push_back(it - cons.id.begin());
    }
    return work;
  };

  // Warm start: accept the guessed working set if its KKT point is optimal.
  if (settings.warm_start) {
    VecX<Scalar> x = VecX<Scalar>::Zero(n);
    VecX<Scalar> u_eq = VecX<Scalar>::Zero(cons.E.rows());
    VecX<Scalar> u_ineq = VecX<Scalar>::Zero(cons.N.rows());
    const auto work = working_set_of(*settings.warm_start);
    if (detail::solve_working_set(P, problem.q, cons, work, x, u_eq, u_ineq, 2)) {
      auto s = assemble(x, u_eq, u_ineq, work, QpStatus::Optimal, 0);
      if (s.ok()) return s;
    }
  }

  Eigen::LLT<MatX<Scalar>> llt(P);
  const bool strictly_convex =
      llt.info() == Eigen::Success &&
      llt.matrixL().toDenseMatrix().diagonal().minCoeff() >
          std::sqrt(std::numeric_limits<Scalar>::epsilon()) *
              std::sqrt(std::max<Scalar>(P.diagonal().maxCoeff(), Scalar(1e-300)));

  // One Newton correction on the final working set's KKT system, kept only
  // when it lowers the residuals.
  auto finalize = [&](const detail::GiResult<Scalar>& r, int iters) {
    auto s = assemble(r.x, r.u_eq, r.u_ineq, r.working, r.status, iters);
    if (r.status == QpStatus::Infeasible) {
      s.kkt.primal = std::max(s.kkt.primal, r.infeasibility);
      return s;
    }
    if (r.status != QpStatus::Optimal) return s;
    VecX<Scalar> x = r.x, ue = r.u_eq, ui = r.u_ineq;
    if (detail::solve_working_set(P, problem.q, cons, r.working, x, ue, ui, 1)) {
      auto t = assemble(x, ue, ui, r.working, r.status, iters);
      if (t.kkt.max() < s.kkt.max()) return t;
    }
    return s;
  };

  if (strictly_convex) {
    detail::GoldfarbIdnani<Scalar> gi(llt, problem.q, cons, settings.max_iter);
    const auto r = gi.run();
    return finalize(r, r.iterations);
  }

  // Proximal point: minimize f(z) + sigma/2 |z - z_k|^2 until z_k settles.
  const Scalar sigma =
      std::max<Scalar>(Scalar(1e-3) * std::max<Scalar>(P.diagonal().maxCoeff(), Scalar(0)), Scalar(1e-3));
  const MatX<Scalar> Pr = P + sigma * MatX<Scalar>::Identity(n, n);
  const Eigen::LLT<MatX<Scalar>> llt_r(Pr);
  VecX<Scalar> zk = VecX<Scalar>::Zero(n);
  detail::GiResult<Scalar> r;
  int total = 0;
  for (int outer = 0; outer < settings.max_iter; ++outer) {
    const VecX<Scalar> g = problem.q - sigma * zk;
    detail::GoldfarbIdnani<Scalar> gi(llt_r, g, cons, settings.max_iter);
    r = gi.run();
    total += r.iterations;
    if (r.status != QpStatus::Optimal) return finalize(r, total);
    const Scalar moved = (r.x - zk).template lpNorm<Eigen::Infinity>();
    zk = r.x;
    auto s = assemble(r.x, r.u_eq, r.u_ineq, r.working, QpStatus::Optimal, total);
    if (s.ok() || sigma * moved <= settings.tol * Scalar(1e-3)) return s;
  }
  return assemble(r.x, r.u_eq, r.u_ineq, r.working, QpStatus::MaxIter, total);
}

using QpProblemd = QpProblem<double>;
using QpSolutiond = QpSolution<double>;
using QpSettingsd = QpSettings<double>;

}  // namespace safewalk
