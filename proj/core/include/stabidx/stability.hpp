#pragma once

#include <optional>

#include "stabidx/box.hpp"

namespace stabidx {

/// Heading gate: a wrapped yaw difference at or beyond this counts as a
/// failed detection and scores 0.
inline constexpr double kHeadingCutoff = kPi / 4.0;

struct ScoredBox {
  Box3D box;
  double score = 0.0;
};

/// One side of a stability pair: the ground-truth box plus the prediction the
/// matcher assigned to it, when one exists.
struct MatchedObservation {
  Box3D gt;
  std::optional<ScoredBox> pred;

  bool present() const { return pred.has_value(); }
};

/// Per-class confidence calibration percentiles.
struct CalibrationRange {
  double c99 = 0.0;
  double c01 = 0.0;

  double width() const { return c99 - c01; }
};

struct StabilityScore {
  double si = 0.0;
  double si_c = 0.0;
  double si_l = 0.0;
  double si_e = 0.0;
  double si_h = 0.0;
  /// True whenever the pair contributes to dataset averages. A pair missing a
  /// matched prediction on either side is still valid and scores 0.
  bool valid_pair = false;
};

/// Origin-centered, zero-yaw box with geometric-mean extents of the two
/// ground truths.
Box3D pivot_box(const Box3D& gt1, const Box3D& gt2);

/// Re-expresses a prediction relative to its ground truth in the pivot frame.
Box3D project_to_pivot(const Box3D& pred, const Box3D& gt, const Box3D& pivot);

/// Location stability: same-size IoU of the two pivot-projected centers with
/// every other element replaced by the pivot's.
double si_localization(const Box3D& p1, const Box3D& p2, const Box3D& pivot);

/// Extent stability: centered axis-aligned IoU of the projected extents.
double si_extent(const Box3D& p1, const Box3D& p2);

/// Heading stability: 0 when the wrapped yaw difference reaches `cutoff`,
/// otherwise the rotated IoU of two pivot-sized boxes separated by that
/// difference. `cutoff` is overridable only as a property-lab control.
double si_heading(const Box3D& p1, const Box3D& p2, const Box3D& pivot,
                  double cutoff = kHeadingCutoff);

/// Confidence stability, calibrated by the per-class percentile width.
/// A degenerate width treats only (near-)equal scores as stable.
double si_confidence(double c1, double c2, const CalibrationRange& cal);

/// The full index for one object observed at two timestamps:
/// si = si_c * (si_l + si_e + si_h) / 3. When either observation lacks a
/// matched prediction, every component is 0 and the pair still counts.
StabilityScore stability_index(const MatchedObservation& obs1, const MatchedObservation& obs2,
                               const CalibrationRange& cal, double heading_cutoff = kHeadingCutoff);

}  // namespace stabidx
