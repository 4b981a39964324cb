#pragma once

#include <cstdint>

#include "stabidx/box.hpp"

namespace stabidx {

/// Intersection polygons with BEV area below this are treated as empty;
/// clipping of near-tangent rectangles produces slivers at floating noise
/// scale.
inline constexpr double kMinPatchArea = 1e-12;

/// Maps `b` from the frame anchored at `from` into the frame anchored at
/// `to`: the center offset is rotated in the horizontal plane by
/// (to.yaw - from.yaw) and re-based on to's center, extents are rescaled per
/// axis by to/from, and yaw is shifted by the same angle difference. z is
/// translated only. Mapping the anchor itself lands exactly on the target.
///
/// Throws std::invalid_argument for non-finite inputs or non-positive
/// extents in `from`/`to`.
Box3D transform_box(const Box3D& b, const Box3D& from, const Box3D& to);

/// IoU of two axis-aligned boxes of identical extents whose centers differ by
/// `offset`. Closed form: V_int = (l-|x|)(w-|y|)(h-|z|) when every |offset|
/// component is below its extent, else 0; result V_int / (2lwh - V_int).
double iou_aligned_same_size(const Vec3& offset, const Vec3& extents);

/// IoU of two origin-centered axis-aligned boxes with extents e1, e2.
/// Closed form: V_int = prod(min(e1, e2)); result V_int / (V1 + V2 - V_int).
double iou_centered_axis_aligned(const Vec3& e1, const Vec3& e2);

/// Volumetric IoU of two yaw-rotated boxes: BEV intersection area by convex
/// polygon clipping, times the vertical overlap, over the union volume.
/// Agrees with the two closed forms above on their domains.
double iou_rotated(const Box3D& b1, const Box3D& b2);

/// Monte-Carlo IoU estimate: `samples` points drawn uniformly in the common
/// axis-aligned hull of both boxes, containment tested via inverse-rotation.
/// Deterministic for a fixed seed. Disjoint boxes return exactly 0.
double iou_oracle(const Box3D& b1, const Box3D& b2, std::int64_t samples,
                  std::uint64_t seed = 0x5eedULL);

}  // namespace stabidx
