#pragma once

#include <cstdint>
#include <vector>

#include "stabidx/frame.hpp"

namespace stabidx {

/// Flip/rotate/scale parameters applied to a training frame, sufficient to
/// invert them on a prediction.
struct AugmentationRecord {
  int ix = 1;          // -1 when x-flipped
  int iy = 1;          // -1 when y-flipped
  double alpha = 0.0;  // rotation angle, radians
  double s = 1.0;      // scale factor, > 0
};

/// Per-object prediction error vector in the object's ego frame.
struct PredictionErrors {
  double e_c = 0.0;          // confidence error, 1 - score
  Vec3 e_l;                  // center error, meters, ego frame
  Vec3 e_e{1.0, 1.0, 1.0};   // extent ratios
  double e_h_sin = 0.0;      // heading error encoding (sin, cos); unit norm
  double e_h_cos = 1.0;
};

/// Forward augmentation: center through the recorded matrix, extents scaled,
/// yaw updated so that de_augment inverts it exactly.
Box3D apply_augmentation(const Box3D& b, const AugmentationRecord& aug);
Prediction apply_augmentation(const Prediction& p, const AugmentationRecord& aug);

/// Inverse of apply_augmentation; the score is untouched.
Box3D de_augment(const Box3D& b, const AugmentationRecord& aug);
Prediction de_augment(const Prediction& p, const AugmentationRecord& aug);

/// Errors of a de-augmented prediction against its ground truth. Throws
/// std::invalid_argument for non-positive GT extents.
PredictionErrors prediction_errors(const Prediction& deaug, const GroundTruthObject& gt);

struct PclWeights {
  double w1 = 1.0;  // confidence (squared error)
  double w2 = 1.0;  // localization (L1)
  double w3 = 1.0;  // extent (L1)
  double w4 = 1.0;  // heading (L1)
};

/// Mean per-object consistency penalty between two index-aligned error
/// collections. Zero iff the collections are identical. Throws
/// std::invalid_argument on length mismatch or empty input.
double pcl_loss(const std::vector<PredictionErrors>& a, const std::vector<PredictionErrors>& b,
                const PclWeights& weights = {});

/// Uniform integer in [-n, n]; deterministic per seed.
std::int64_t sample_neighbor_offset(std::int64_t n, std::uint64_t seed);

}  // namespace stabidx
