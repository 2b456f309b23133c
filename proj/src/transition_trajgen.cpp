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

#include "safewalk/transition_trajgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "safewalk/qp_solver.hpp"

namespace safewalk {

std::string to_string(TransitionDirection d) {
  return d == TransitionDirection::Downward ? "downward" : "upward";
}

std::string to_string(SupportPhase p) {
  switch (p) {
    case SupportPhase::AllFeet: return "all_feet";
    case SupportPhase::RearRoller: return "rear_roller";
    case SupportPhase::FrontRoller: return "front_roller";
  }
  return "unknown";
}

TransitionDirection direction_from_string(const std::string& s) {
  if (s == "downward") return TransitionDirection::Downward;
  if (s == "upward") return TransitionDirection::Upward;
  throw InvalidArgument("unknown transition direction '" + s + "'");
}

std::vector<int> PhaseSchedule::phases_at(double t, double tol) const {
  std::vector<int> out;
  double t0 = 0.0;
  for (std::size_t i = 0; i < durations.size(); ++i) {
    const double t1 = t0 + durations[i];
    if (t >= t0 - tol && t <= t1 + tol) out.push_back(static_cast<int>(i));
    t0 = t1;
  }
  return out;
}

PhaseSchedule build_schedule(TransitionDirection dir, double t_a, double t_r, double t_f) {
  for (double d : {t_a, t_r, t_f}) {
    if (!(d > 0.0) || !std::isfinite(d)) throw InvalidArgument("phase durations must be > 0");
  }
  PhaseSchedule s;
  s.direction = dir;
  const SupportPhase a = SupportPhase::AllFeet;
  if (dir == TransitionDirection::Downward) {
    s.sequence = {a, SupportPhase::RearRoller, a, SupportPhase::FrontRoller, a};
    s.durations = {t_a, t_r, t_a, t_f, t_a};
  } else {
    s.sequence = {a, SupportPhase::FrontRoller, a, SupportPhase::RearRoller, a};
    s.durations = {t_a, t_f, t_a, t_r, t_a};
  }
  s.total = 0.0;
  for (double d : s.durations) s.total += d;
  return s;
}

ConvexPolygon::ConvexPolygon(std::vector<Vec2d> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw InvalidArgument("polygon needs at least 3 vertices");
  for (const auto& v : vertices_) {
    if (!v.allFinite()) throw InvalidArgument("polygon vertices must be finite");
  }
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2d& a = vertices_[i];
    const Vec2d& b = vertices_[(i + 1) % n];
    area2 += a.x() * b.y() - b.x() * a.y();
  }
  if (std::abs(area2) <= 1e-12) throw InvalidArgument("polygon is degenerate");
  if (area2 < 0.0) std::reverse(vertices_.begin(), vertices_.end());
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2d e1 = vertices_[(i + 1) % n] - vertices_[i];
    const Vec2d e2 = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
    if (e1.norm() <= 1e-12) throw InvalidArgument("polygon has repeated vertices");
    if (e1.x() * e2.y() - e1.y() * e2.x() < -1e-12) throw InvalidArgument("polygon is not convex");
  }
}

void ConvexPolygon::half_planes(double margin, MatXd& A, VecXd& b) const {
  const std::size_t n = vertices_.size();
  A.resize(static_cast<Eigen::Index>(n), 2);
  b.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2d e = vertices_[(i + 1) % n] - vertices_[i];
    const Vec2d out = Vec2d(e.y(), -e.x()).normalized();
    A.row(static_cast<Eigen::Index>(i)) = out.transpose();
    b(static_cast<Eigen::Index>(i)) = out.dot(vertices_[i]) - margin;
  }
}

double ConvexPolygon::violation(const Vec2d& p, double margin) const {
  MatXd A;
  VecXd b;
  half_planes(margin, A, b);
  return (A * p - b).maxCoeff();
}

const ConvexPolygon& SupportPolygonSpec::polygon(SupportPhase p) const {
  switch (p) {
    case SupportPhase::RearRoller: return rear_roller;
    case SupportPhase::FrontRoller: return front_roller;
    case SupportPhase::AllFeet: break;
  }
  return all_feet;
}

namespace {
ConvexPolygon box(double x0, double x1, double y0, double y1) {
  return ConvexPolygon({Vec2d(x0, y0), Vec2d(x1, y0), Vec2d(x1, y1), Vec2d(x0, y1)});
}
}  // namespace

SupportPolygonSpec default_support_polygons() {
  SupportPolygonSpec s;
  s.all_feet = box(-0.05, 0.65, -0.12, 0.12);
  s.rear_roller = ConvexPolygon({Vec2d(-0.05, -0.1), Vec2d(0.35, -0.06), Vec2d(0.35, 0.06),
                                 Vec2d(-0.05, 0.1)});
  s.front_roller = ConvexPolygon({Vec2d(0.25, -0.06), Vec2d(0.65, -0.1), Vec2d(0.65, 0.1),
                                  Vec2d(0.25, 0.06)});
  return s;
}

namespace {

void check_intersection(const ConvexPolygon& a, const ConvexPolygon& b, double margin, int knot,
                        double t) {
  MatXd Aa, Ab;
  VecXd ba, bb;
  a.half_planes(margin, Aa, ba);
  b.half_planes(margin, Ab, bb);
  QpProblemd p;
  p.P = 2.0 * MatXd::Identity(2, 2);
  p.q = VecXd::Zero(2);
  p.G.resize(Aa.rows() + Ab.rows(), 2);
  p.G << Aa, Ab;
  p.h.resize(ba.size() + bb.size());
  p.h << ba, bb;
  const QpSolutiond s = solve(p);
  if (s.status != QpStatus::Optimal) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "support polygons do not intersect at knot %d (t = %.3f s)", knot, t);
    throw Infeasible(buf, s.kkt.primal);
  }
}

}  // namespace

ComTrajectory generate_com_trajectory(const PhaseSchedule& schedule,
                                      const SupportPolygonSpec& polygons, const Vec2d& start,
                                      const Vec2d& goal, const TrajgenOptions& opt) {
  if (schedule.sequence.empty() || schedule.sequence.size() != schedule.durations.size()) {
    throw InvalidArgument("malformed phase schedule");
  }
  if (!(opt.knot_dt > 0.0) || !(opt.dense_dt > 0.0)) throw InvalidArgument("dt must be > 0");
  const double ratio = schedule.total / opt.knot_dt;
  const int N = static_cast<int>(std::lround(ratio));
  if (N < 1 || std::abs(ratio - N) > 1e-9 * std::max(1.0, ratio)) {
    throw InvalidArgument("total duration must be a multiple of the knot spacing");
  }
  const double margin = polygons.shrink_margin;
  const double dt = opt.knot_dt;
  auto poly_of = [&](int phase) -> const ConvexPolygon& {
    return polygons.polygon(schedule.sequence[static_cast<std::size_t>(phase)]);
  };
  if (poly_of(0).violation(start, margin) > 1e-12) {
    throw InvalidArgument("start is outside the first support polygon");
  }
  if (poly_of(static_cast<int>(schedule.sequence.size()) - 1).violation(goal, margin) > 1e-12) {
    throw InvalidArgument("goal is outside the last support polygon");
  }

  std::vector<std::vector<int>> active(static_cast<std::size_t>(N + 1));
  for (int k = 0; k <= N; ++k) {
    active[static_cast<std::size_t>(k)] = schedule.phases_at(k * dt);
    const auto& ph = active[static_cast<std::size_t>(k)];
    if (ph.size() == 2) check_intersection(poly_of(ph[0]), poly_of(ph[1]), margin, k, k * dt);
  }

  // Knot positions are affine in the stacked accelerations z = [a_0; ...; a_{N-1}]:
  //   p_k = start + sum_{j<k} dt^2 (k - j - 1/2) a_j,  v_k = dt sum_{j<k} a_j.
  const int n = 2 * N;
  auto pos_row = [&](int k, MatXd& C) {
    C = MatXd::Zero(2, n);
    for (int j = 0; j < k; ++j) {
      C.block(0, 2 * j, 2, 2) = dt * dt * (k - j - 0.5) * Mat2d::Identity();
    }
  };

  QpProblemd p;
  p.P = 2.0 * MatXd::Identity(n, n);
  p.q = VecXd::Zero(n);
  p.A_eq = MatXd::Zero(4, n);
  p.b_eq = VecXd::Zero(4);
  MatXd C;
  pos_row(N, C);
  p.A_eq.topRows(2) = C;
  p.b_eq.head<2>() = goal - start;
  for (int j = 0; j < N; ++j) p.A_eq.block(2, 2 * j, 2, 2) = dt * Mat2d::Identity();

  std::vector<MatXd> rows;
  std::vector<VecXd> rhs;
  Eigen::Index m = 0;
  for (int k = 1; k < N; ++k) {
    pos_row(k, C);
    for (int ph : active[static_cast<std::size_t>(k)]) {
      MatXd A;
      VecXd b;
      poly_of(ph).half_planes(margin, A, b);
      rows.push_back(A * C);
      rhs.push_back(b - A * start);
      m += A.rows();
    }
  }
  p.G.resize(m, n);
  p.h.resize(m);
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    p.G.middleRows(r, rows[i].rows()) = rows[i];
    p.h.segment(r, rhs[i].size()) = rhs[i];
    r += rows[i].rows();
  }

  QpSettingsd qs;
  qs.tol = opt.tol;
  qs.max_iter = 20 * (n + static_cast<int>(m));
  const QpSolutiond sol = solve(p, qs);
  if (sol.status == QpStatus::Infeasible) {
    throw Infeasible("transition transcription is infeasible", sol.kkt.primal);
  }
  if (sol.status != QpStatus::Optimal) {
    throw Error("transition transcription did not converge");
  }

  ComTrajectory out;
  out.knots.resize(static_cast<std::size_t>(N + 1));
  Vec2d pk = start, vk = Vec2d::Zero();
  for (int k = 0; k <= N; ++k) {
    ComSample& s = out.knots[static_cast<std::size_t>(k)];
    s.t = k * dt;
    s.p = pk;
    s.v = vk;
    if (k < N) {
      s.a = sol.z.segment<2>(2 * k);
      out.cost += s.a.squaredNorm();
      pk += dt * vk + 0.5 * dt * dt * s.a;
      vk += dt * s.a;
    } else {
      s.a = out.knots[static_cast<std::size_t>(N - 1)].a;
    }
  }
  out.dense = spline_interpolate(out.knots, opt.dense_dt);
  return out;
}

CubicSpline2::CubicSpline2(const std::vector<ComSample>& knots) {
  const std::size_t n = knots.size();
  if (n < 2) throw InvalidArgument("spline needs at least 2 knots");
  t_.resize(n);
  p_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t_[i] = knots[i].t;
    p_[i] = knots[i].p;
    if (i > 0 && !(t_[i] > t_[i - 1])) throw InvalidArgument("knot times must increase");
  }
  // Tridiagonal system for the knot second derivatives, clamped ends.
  std::vector<double> lo(n, 0.0), di(n, 0.0), up(n, 0.0);
  std::vector<Vec2d> r(n, Vec2d::Zero());
  const double h0 = t_[1] - t_[0];
  di[0] = 2 * h0;
  up[0] = h0;
  r[0] = 6 * ((p_[1] - p_[0]) / h0 - knots.front().v);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = t_[i] - t_[i - 1], hr = t_[i + 1] - t_[i];
    lo[i] = hl;
    di[i] = 2 * (hl + hr);
    up[i] = hr;
    r[i] = 6 * ((p_[i + 1] - p_[i]) / hr - (p_[i] - p_[i - 1]) / hl);
  }
  const double hn = t_[n - 1] - t_[n - 2];
  lo[n - 1] = hn;
  di[n - 1] = 2 * hn;
  r[n - 1] = 6 * (knots.back().v - (p_[n - 1] - p_[n - 2]) / hn);
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lo[i] / di[i - 1];
    di[i] -= w * up[i - 1];
    r[i] -= w * r[i - 1];
  }
  m_.assign(n, Vec2d::Zero());
  m_[n - 1] = r[n - 1] / di[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) m_[i] = (r[i] - up[i] * m_[i + 1]) / di[i];
}

ComSample CubicSpline2::evaluate(double t) const {
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
  i = std::min(i, t_.size() - 2);
  const double h = t_[i + 1] - t_[i];
  const double A = (t_[i + 1] - t) / h, B = (t - t_[i]) / h;
  ComSample s;
  s.t = t;
  s.p = A * p_[i] + B * p_[i + 1] +
        ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * (h * h / 6);
  s.v = (p_[i + 1] - p_[i]) / h - (3 * A * A - 1) / 6 * h * m_[i] +
        (3 * B * B - 1) / 6 * h * m_[i + 1];
  s.a = A * m_[i] + B * m_[i + 1];
  return s;
}

std::vector<ComSample> spline_interpolate(const std::vector<ComSample>& knots, double dt_dense) {
  if (!(dt_dense > 0.0)) throw InvalidArgument("dt_dense must be > 0");
  const CubicSpline2 spline(knots);
  const double span = spline.t_end() - spline.t_begin();
  const long M = std::lround(span / dt_dense);
  std::vector<ComSample> out;
  out.reserve(static_cast<std::size_t>(M + 1));
  for (long i = 0; i <= M; ++i) {
    const double t = i == M ? spline.t_end() : spline.t_begin() + static_cast<double>(i) * dt_dense;
    out.push_back(spline.evaluate(t));
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const std::vector<ComSample>& samples) {
  out << "t,x,y,vx,vy,ax,ay\n";
  char buf[512];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.p.x(),
                  s.p.y(), s.v.x(), s.v.y(), s.a.x(), s.a.y());
    out << buf;
  }
}

}  // namespace safewalk
