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

// Planar geometry for the unsafe-region ("manway") logic: rectangles given by
// their four corners, the vertex-hull membership test, quadrant partitions,
// segment projection and the conservative ellipse around a rectangle.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "safewalk/types.hpp"

namespace safewalk {

/// Membership test on the hull spanned by four rectangle corners: `p` is
/// inside iff its projections on edges v1v2 and v2v3 both fall within the
/// edge lengths. Boundary points count as inside.
template <typename Scalar>
bool hull_contains(const std::array<Vec2<Scalar>, 4>& v, const Vec2<Scalar>& p) {
  const Vec2<Scalar> e12 = v[1] - v[0];
  const Vec2<Scalar> e23 = v[2] - v[1];
  const Scalar s12 = e12.dot(p - v[0]);
  const Scalar s23 = e23.dot(p - v[1]);
  return Scalar(0) <= s12 && s12 <= e12.squaredNorm() && Scalar(0) <= s23 &&
         s23 <= e23.squaredNorm();
}

/// Rectangle stored as four counterclockwise corners starting from the
/// lexicographically smallest (x, then y) corner.
template <typename Scalar>
class RectRegion {
 public:
  using Vec = Vec2<Scalar>;

  explicit RectRegion(std::array<Vec, 4> vertices) : v_(std::move(vertices)) {
    normalize();
  }

  /// Axis-aligned rectangle from its center and full side lengths.
  static RectRegion axis_aligned(const Vec& center, Scalar size_x, Scalar size_y) {
    const Vec h(size_x / 2, size_y / 2);
    return RectRegion({center + Vec(-h.x(), -h.y()), center + Vec(h.x(), -h.y()),
                       center + Vec(h.x(), h.y()), center + Vec(-h.x(), h.y())});
  }

  const std::array<Vec, 4>& vertices() const { return v_; }
  const Vec& vertex(int i) const { return v_[static_cast<std::size_t>(i & 3)]; }

  Vec centroid() const { return (v_[0] + v_[1] + v_[2] + v_[3]) / Scalar(4); }
  Scalar area() const { return (v_[1] - v_[0]).norm() * (v_[2] - v_[1]).norm(); }

  /// Orientation in [0, pi/2) together with the side lengths along (width)
  /// and across (height) that orientation.
  struct Frame {
    Scalar theta;
    Scalar width;
    Scalar height;
  };

  Frame frame() const {
    const Vec e1 = v_[1] - v_[0];
    const Vec e2 = v_[2] - v_[1];
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    Scalar t = std::atan2(e1.y(), e1.x());
    t = std::fmod(t + pi, pi);
    if (t >= pi) t -= pi;
    if (t < pi / 2) return {t, e1.norm(), e2.norm()};
    return {t - pi / 2, e2.norm(), e1.norm()};
  }

  bool contains(const Vec& p) const { return hull_contains(v_, p); }

 private:
  void normalize() {
    for (const auto& p : v_) {
      if (!p.allFinite()) throw InvalidRegion("rectangle vertex is not finite");
    }
    Scalar twice_area = 0;
    for (int i = 0; i < 4; ++i) {
      const Vec& a = vertex(i);
      const Vec& b = vertex(i + 1);
      twice_area += a.x() * b.y() - b.x() * a.y();
    }
    if (twice_area < 0) std::reverse(v_.begin(), v_.end());

    Scalar scale = 0;
    for (int i = 0; i < 4; ++i) scale = std::max(scale, (vertex(i + 1) - vertex(i)).norm());
    for (int i = 0; i < 4; ++i) {
      const Vec e = vertex(i + 1) - vertex(i);
      const Vec f = vertex(i + 2) - vertex(i + 1);
      if (e.norm() <= Scalar(1e-12) * std::max(scale, Scalar(1)))
        throw InvalidRegion("rectangle has a zero-length edge");
      if (std::abs(e.dot(f)) > Scalar(1e-9) * e.norm() * f.norm())
        throw InvalidRegion("consecutive rectangle edges are not orthogonal");
    }
    if ((vertex(1) - vertex(0) + vertex(3) - vertex(2)).norm() > Scalar(1e-9) * scale)
      throw InvalidRegion("opposite rectangle edges differ");

    auto first = std::min_element(v_.begin(), v_.end(), [](const Vec& a, const Vec& b) {
      return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    std::rotate(v_.begin(), first, v_.end());
  }

  std::array<Vec, 4> v_;
};

template <typename Scalar>
bool hull_contains(const RectRegion<Scalar>& rect, const Vec2<Scalar>& p) {
  return rect.contains(p);
}

/// Quarters the rectangle at its centroid. Element i holds the quadrant whose
/// only original corner is vertex i.
template <typename Scalar>
std::array<RectRegion<Scalar>, 4> partition_subregions(const RectRegion<Scalar>& rect) {
  const Vec2<Scalar> c = rect.centroid();
  auto quadrant = [&](int i) {
    const Vec2<Scalar>& vi = rect.vertex(i);
    const Vec2<Scalar> next = (vi + rect.vertex(i + 1)) / Scalar(2);
    const Vec2<Scalar> prev = (vi + rect.vertex(i + 3)) / Scalar(2);
    return RectRegion<Scalar>({vi, next, c, prev});
  };
  return {quadrant(0), quadrant(1), quadrant(2), quadrant(3)};
}

template <typename Scalar>
struct SegmentProjection {
  Vec2<Scalar> point;
  Scalar distance;
};

/// Closest point on the closed segment [a, b] and its distance from `p`.
template <typename Scalar>
SegmentProjection<Scalar> project_to_segment(const Vec2<Scalar>& p, const Vec2<Scalar>& a,
                                             const Vec2<Scalar>& b) {
  const Vec2<Scalar> ab = b - a;
  const Scalar len2 = ab.squaredNorm();
  if (!(len2 > Scalar(0))) throw InvalidSegment("segment has zero length");
  const Scalar t = std::clamp((p - a).dot(ab) / len2, Scalar(0), Scalar(1));
  const Vec2<Scalar> q = a + t * ab;
  return {q, (p - q).norm()};
}

template <typename Scalar>
struct Ellipse {
  Vec2<Scalar> center;
  Scalar a;      // semi-axis along theta
  Scalar b;      // semi-axis across theta
  Scalar theta;  // radians

  Ellipse(Vec2<Scalar> c, Scalar a_, Scalar b_, Scalar theta_ = 0)
      : center(std::move(c)), a(a_), b(b_), theta(theta_) {
    if (!(a > 0) || !(b > 0)) throw InvalidArgument("ellipse semi-axes must be positive");
    if (!center.allFinite() || !std::isfinite(theta))
      throw InvalidArgument("ellipse parameters must be finite");
  }
};

/// Ellipse through the rectangle's edge midpoints (beta = 1), scaled by beta.
template <typename Scalar>
Ellipse<Scalar> ellipse_from_rect(const RectRegion<Scalar>& rect, Scalar beta) {
  if (!(beta > 0)) throw InvalidArgument("ellipse scaling factor must be positive");
  const auto f = rect.frame();
  return Ellipse<Scalar>(rect.centroid(), beta * f.width / 2, beta * f.height / 2, f.theta);
}

using RectRegiond = RectRegion<double>;
using Ellipsed = Ellipse<double>;

}  // namespace safewalk
