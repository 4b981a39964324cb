#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stabidx/curve.hpp"
#include "stabidx/dataset.hpp"
#include "stabidx/evaluator.hpp"

namespace stabidx {

enum class MotionModel { kStatic, kConstantVelocity, kTurning };

struct ScenarioSpec {
  int sequences = 4;
  int frames_per_sequence = 20;
  double capture_interval = 0.1;  // seconds
  int objects_per_frame = 8;
  MotionModel motion = MotionModel::kConstantVelocity;
  std::vector<std::string> classes{"vehicle", "pedestrian", "cyclist"};
  std::uint64_t seed = 1;
};

struct NoiseSpec {
  double center_sigma = 0.0;  // meters, per axis
  double extent_sigma = 0.0;  // relative
  double yaw_sigma = 0.0;     // radians
  double score_sigma = 0.0;
  double dropout = 0.0;  // probability a prediction is dropped entirely
  std::uint64_t seed = 2;
};

/// Ground-truth trajectories with persistent ids plus noise-injected
/// predictions. Noise is independent per frame; dropout removes the
/// prediction entirely. Deterministic per seeds, for any generation order.
Dataset generate_dataset(const ScenarioSpec& scenario, const NoiseSpec& noise);

enum class NoiseAxis { kCenter, kExtent, kYaw, kScore, kDropout };

struct SweepGrid {
  double start = 0.0;
  double stop = 0.0;
  int steps = 2;
};

/// Evaluates the full pipeline at each grid point of one noise element and
/// reports the overall (pair-weighted) mean SI per point.
CurveTable response_sweep(const ScenarioSpec& scenario, const NoiseSpec& base_noise,
                          NoiseAxis axis, const SweepGrid& grid,
                          const EvaluationConfig& cfg = {}, int threads = 1);

}  // namespace stabidx
