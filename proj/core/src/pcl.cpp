#include "stabidx/pcl.hpp"

#include <cmath>
#include <stdexcept>

#include "stabidx/rng.hpp"

namespace stabidx {
namespace {

void validate_record(const AugmentationRecord& aug) {
  if ((aug.ix != 1 && aug.ix != -1) || (aug.iy != 1 && aug.iy != -1)) {
    throw std::invalid_argument("augmentation: flip indicators must be +1 or -1");
  }
  if (!(aug.s > 0.0) || !std::isfinite(aug.s) || !std::isfinite(aug.alpha)) {
    throw std::invalid_argument("augmentation: scale must be positive and finite");
  }
}

}  // namespace

Box3D apply_augmentation(const Box3D& b, const AugmentationRecord& aug) {
  validate_record(aug);
  const double c = std::cos(aug.alpha);
  const double s = std::sin(aug.alpha);
  // center' = Flip * Rot * s applied to the center.
  const double rx = c * b.x + s * b.y;
  const double ry = -s * b.x + c * b.y;
  Box3D out = b;
  out.x = aug.ix * rx * aug.s;
  out.y = aug.iy * ry * aug.s;
  out.z = b.z * aug.s;
  out.l = b.l * aug.s;
  out.w = b.w * aug.s;
  out.h = b.h * aug.s;
  out.yaw = aug.ix * aug.iy * b.yaw + aug.alpha;
  return out;
}

Prediction apply_augmentation(const Prediction& p, const AugmentationRecord& aug) {
  Prediction out = p;
  out.box = apply_augmentation(p.box, aug);
  return out;
}

Box3D de_augment(const Box3D& b, const AugmentationRecord& aug) {
  validate_record(aug);
  const double c = std::cos(aug.alpha);
  const double s = std::sin(aug.alpha);
  // center = (1/s) * Rot^T * Flip applied to the augmented center.
  const double fx = aug.ix * b.x;
  const double fy = aug.iy * b.y;
  Box3D out = b;
  out.x = (c * fx - s * fy) / aug.s;
  out.y = (s * fx + c * fy) / aug.s;
  out.z = b.z / aug.s;
  out.l = b.l / aug.s;
  out.w = b.w / aug.s;
  out.h = b.h / aug.s;
  out.yaw = aug.ix * aug.iy * (b.yaw - aug.alpha);
  return out;
}

Prediction de_augment(const Prediction& p, const AugmentationRecord& aug) {
  Prediction out = p;
  out.box = de_augment(p.box, aug);
  return out;
}

PredictionErrors prediction_errors(const Prediction& deaug, const GroundTruthObject& gt) {
  if (!has_positive_extents(gt.box)) {
    throw std::invalid_argument("prediction_errors: GT extents must be positive");
  }
  const Box3D& p = deaug.box;
  const Box3D& g = gt.box;
  const double c = std::cos(g.yaw);
  const double s = std::sin(g.yaw);
  const double dx = p.x - g.x;
  const double dy = p.y - g.y;

  PredictionErrors e;
  e.e_c = 1.0 - deaug.score;
  e.e_l = {c * dx + s * dy, -s * dx + c * dy, p.z - g.z};
  e.e_e = {p.l / g.l, p.w / g.w, p.h / g.h};
  const double dyaw = p.yaw - g.yaw;
  e.e_h_sin = std::sin(dyaw);
  e.e_h_cos = std::cos(dyaw);
  return e;
}

double pcl_loss(const std::vector<PredictionErrors>& a, const std::vector<PredictionErrors>& b,
                const PclWeights& weights) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("pcl_loss: error collections differ in length");
  }
  if (a.empty()) throw std::invalid_argument("pcl_loss: error collections are empty");

  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const PredictionErrors& x = a[i];
    const PredictionErrors& y = b[i];
    const double dc = x.e_c - y.e_c;
    const double l1_loc =
        std::abs(x.e_l.x - y.e_l.x) + std::abs(x.e_l.y - y.e_l.y) + std::abs(x.e_l.z - y.e_l.z);
    const double l1_ext =
        std::abs(x.e_e.x - y.e_e.x) + std::abs(x.e_e.y - y.e_e.y) + std::abs(x.e_e.z - y.e_e.z);
    const double l1_hdg = std::abs(x.e_h_sin - y.e_h_sin) + std::abs(x.e_h_cos - y.e_h_cos);
    acc += weights.w1 * dc * dc + weights.w2 * l1_loc + weights.w3 * l1_ext + weights.w4 * l1_hdg;
  }
  return acc / static_cast<double>(a.size());
}

std::int64_t sample_neighbor_offset(std::int64_t n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("sample_neighbor_offset: n must be non-negative");
  if (n == 0) return 0;
  Rng rng(seed);
  return rng.uniform_int(-n, n);
}

}  // namespace stabidx
