#include "stabidx/stability.hpp"

#include <algorithm>
#include <cmath>

#include "stabidx/geometry.hpp"

namespace stabidx {

Box3D pivot_box(const Box3D& gt1, const Box3D& gt2) {
  validate_box(gt1, "gt1");
  validate_box(gt2, "gt2");
  Box3D pivot;
  pivot.l = std::sqrt(gt1.l * gt2.l);
  pivot.w = std::sqrt(gt1.w * gt2.w);
  pivot.h = std::sqrt(gt1.h * gt2.h);
  return pivot;
}

Box3D project_to_pivot(const Box3D& pred, const Box3D& gt, const Box3D& pivot) {
  return transform_box(pred, gt, pivot);
}

double si_localization(const Box3D& p1, const Box3D& p2, const Box3D& pivot) {
  return iou_aligned_same_size({p2.x - p1.x, p2.y - p1.y, p2.z - p1.z}, pivot.extents());
}

double si_extent(const Box3D& p1, const Box3D& p2) {
  return iou_centered_axis_aligned(p1.extents(), p2.extents());
}

double si_heading(const Box3D& p1, const Box3D& p2, const Box3D& pivot, double cutoff) {
  const double diff = std::abs(wrap_angle(p1.yaw - p2.yaw));
  if (diff >= cutoff) return 0.0;
  // |diff| on a zero-yaw base keeps the value bit-identical under swapping
  // the observations; rectangles are mirror symmetric, so nothing is lost.
  Box3D a = pivot;
  a.yaw = 0.0;
  Box3D b = a;
  b.yaw = diff;
  return iou_rotated(a, b);
}

double si_confidence(double c1, double c2, const CalibrationRange& cal) {
  const double dc = std::abs(c1 - c2);
  const double width = cal.width();
  if (width < 1e-9) return dc < 1e-9 ? 1.0 : 0.0;
  return std::max(0.0, 1.0 - dc / width);
}

StabilityScore stability_index(const MatchedObservation& obs1, const MatchedObservation& obs2,
                               const CalibrationRange& cal, double heading_cutoff) {
  StabilityScore out;
  out.valid_pair = true;
  if (!obs1.present() || !obs2.present()) {
    return out;  // missing match scores 0 but still contributes to averages
  }
  const Box3D pivot = pivot_box(obs1.gt, obs2.gt);
  const Box3D p1 = project_to_pivot(obs1.pred->box, obs1.gt, pivot);
  const Box3D p2 = project_to_pivot(obs2.pred->box, obs2.gt, pivot);
  out.si_l = si_localization(p1, p2, pivot);
  out.si_e = si_extent(p1, p2);
  out.si_h = si_heading(p1, p2, pivot, heading_cutoff);
  out.si_c = si_confidence(obs1.pred->score, obs2.pred->score, cal);
  out.si = out.si_c * (out.si_l + out.si_e + out.si_h) / 3.0;
  return out;
}

}  // namespace stabidx
