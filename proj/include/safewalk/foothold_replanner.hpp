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

// Relocates planned footholds that land inside the unsafe rectangle. The
// rectangle is quartered at its centroid; a foothold in quadrant s is
// projected onto the two outline edges meeting at the quadrant's own corner
// v_s, and pushed a further fraction epsilon past that edge.

#include <array>
#include <type_traits>

#include "safewalk/geometry.hpp"

namespace safewalk {

template <typename Scalar>
struct FootholdQuery {
  Vec2<Scalar> x_f;   // planned foothold
  Vec2<Scalar> hip;   // hip position at touchdown
  Scalar reach;       // admissible foothold distance from the hip
};

template <typename Scalar>
struct ReplanResult {
  Vec2<Scalar> x_f_safe;
  Vec2<Scalar> x_f_proj;  // boundary point the result was pushed from
  bool was_replanned = false;
  bool used_fallback_edge = false;
};

/// Index of the first quadrant (see partition_subregions) containing x_f.
template <typename Scalar>
int locate_subregion(const RectRegion<Scalar>& rect, const std::type_identity_t<Vec2<Scalar>>& x_f) {
  if (!hull_contains(rect, x_f)) throw NotInRegion("foothold is outside the region");
  const auto parts = partition_subregions(rect);
  for (int s = 0; s < 4; ++s) {
    if (parts[static_cast<std::size_t>(s)].contains(x_f)) return s;
  }
  // Rounding on a shared edge can miss every quadrant; fall back to the
  // corner nearest the point.
  int best = 0;
  for (int s = 1; s < 4; ++s) {
    if ((rect.vertex(s) - x_f).squaredNorm() < (rect.vertex(best) - x_f).squaredNorm()) best = s;
  }
  return best;
}

/// Both candidate projections for quadrant s. `candidates[0]` lies on edge
/// (v_{s-1}, v_s), `candidates[1]` on edge (v_s, v_{s+1}).
template <typename Scalar>
struct BoundaryCandidates {
  std::array<SegmentProjection<Scalar>, 2> candidates;
  std::array<Vec2<Scalar>, 2> outward_normals;

  int nearest() const { return candidates[1].distance < candidates[0].distance ? 1 : 0; }
};

template <typename Scalar>
BoundaryCandidates<Scalar> boundary_candidates(const RectRegion<Scalar>& rect,
                                               const Vec2<Scalar>& x_f, int s) {
  if (s < 0 || s > 3) throw InvalidArgument("sub-region index must be in [0, 3]");
  const Vec2<Scalar>& vi = rect.vertex(s + 3);
  const Vec2<Scalar>& vj = rect.vertex(s);
  const Vec2<Scalar>& vk = rect.vertex(s + 1);
  auto outward = [](const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
    const Vec2<Scalar> e = (b - a).normalized();
    return Vec2<Scalar>(e.y(), -e.x());
  };
  return {{project_to_segment(x_f, vi, vj), project_to_segment(x_f, vj, vk)},
          {outward(vi, vj), outward(vj, vk)}};
}

/// Nearest outline point among the two edges adjacent to quadrant s's corner.
/// Equidistant points resolve to edge (v_{s-1}, v_s).
template <typename Scalar>
Vec2<Scalar> project_to_boundary(const RectRegion<Scalar>& rect,
                                 const std::type_identity_t<Vec2<Scalar>>& x_f, int s) {
  if (!hull_contains(rect, x_f)) throw NotInRegion("foothold is outside the region");
  const auto bc = boundary_candidates(rect, x_f, s);
  return bc.candidates[static_cast<std::size_t>(bc.nearest())].point;
}

/// x_safe = x_f + (1 + epsilon)(x_proj - x_f), falling back to the other edge
/// when the first candidate is out of reach. A foothold exactly on the
/// outline is moved `boundary_margin` along the edge's outward normal.
template <typename Scalar>
ReplanResult<Scalar> replan(const RectRegion<Scalar>& rect, const FootholdQuery<Scalar>& q,
                            Scalar epsilon, Scalar boundary_margin = Scalar(1e-3)) {
  if (!(epsilon > 0)) throw InvalidArgument("foothold margin factor must be positive");
  if (!(q.reach > 0)) throw InvalidArgument("foothold reach must be positive");
  ReplanResult<Scalar> out;
  out.x_f_safe = q.x_f;
  out.x_f_proj = q.x_f;
  if (!hull_contains(rect, q.x_f)) return out;

  const int s = locate_subregion(rect, q.x_f);
  const auto bc = boundary_candidates(rect, q.x_f, s);
  const int first = bc.nearest();
  for (int attempt = 0; attempt < 2; ++attempt) {
    const auto idx = static_cast<std::size_t>(attempt == 0 ? first : 1 - first);
    const Vec2<Scalar> proj = bc.candidates[idx].point;
    Vec2<Scalar> safe = q.x_f + (Scalar(1) + epsilon) * (proj - q.x_f);
    if (hull_contains(rect, safe)) safe = proj + boundary_margin * bc.outward_normals[idx];
    if ((safe - q.hip).norm() <= q.reach) {
      out.x_f_safe = safe;
      out.x_f_proj = proj;
      out.was_replanned = true;
      out.used_fallback_edge = attempt == 1;
      return out;
    }
  }
  throw UnreachableFoothold("no relocated foothold is within reach of the hip");
}

using FootholdQueryd = FootholdQuery<double>;
using ReplanResultd = ReplanResult<double>;

}  // namespace safewalk
