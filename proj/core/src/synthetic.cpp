#include "stabidx/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stabidx/rng.hpp"

namespace stabidx {
namespace {

struct ObjectTrack {
  std::string id;
  std::string class_label;
  double x0, y0;
  double speed;
  double yaw0;
  double yaw_rate;
  double l, w, h;
  double base_score;
};

struct ClassTemplate {
  double l, w, h;
  double speed_lo, speed_hi;
};

ClassTemplate template_for(const std::string& label) {
  if (label == "pedestrian") return {0.9, 0.85, 1.7, 0.5, 2.0};
  if (label == "cyclist") return {1.8, 0.8, 1.7, 2.0, 8.0};
  return {4.6, 2.0, 1.7, 3.0, 15.0};  // vehicle-like default
}

Box3D track_pose(const ObjectTrack& track, MotionModel motion, double t) {
  Box3D box;
  box.l = track.l;
  box.w = track.w;
  box.h = track.h;
  box.z = 0.5 * track.h;
  switch (motion) {
    case MotionModel::kStatic:
      box.x = track.x0;
      box.y = track.y0;
      box.yaw = track.yaw0;
      break;
    case MotionModel::kConstantVelocity:
      box.x = track.x0 + track.speed * t * std::cos(track.yaw0);
      box.y = track.y0 + track.speed * t * std::sin(track.yaw0);
      box.yaw = track.yaw0;
      break;
    case MotionModel::kTurning: {
      // Constant yaw rate; integrate the heading so GT yaw changes across a
      // pair and exercises the transform's rotation path.
      const double yaw = track.yaw0 + track.yaw_rate * t;
      if (std::abs(track.yaw_rate) < 1e-9) {
        box.x = track.x0 + track.speed * t * std::cos(track.yaw0);
        box.y = track.y0 + track.speed * t * std::sin(track.yaw0);
      } else {
        const double r = track.speed / track.yaw_rate;
        box.x = track.x0 + r * (std::sin(yaw) - std::sin(track.yaw0));
        box.y = track.y0 - r * (std::cos(yaw) - std::cos(track.yaw0));
      }
      box.yaw = yaw;
      break;
    }
  }
  return box;
}

std::int64_t synth_num_points(double distance) {
  // Distance-decay stand-in; only has to populate the breakdown bins.
  const double pts = 5000.0 / (1.0 + 0.05 * distance * distance);
  return std::max<std::int64_t>(0, static_cast<std::int64_t>(std::llround(pts)));
}

}  // namespace

Dataset generate_dataset(const ScenarioSpec& scenario, const NoiseSpec& noise) {
  if (scenario.sequences < 0 || scenario.frames_per_sequence < 0 ||
      scenario.objects_per_frame < 0) {
    throw std::invalid_argument("generate_dataset: counts must be non-negative");
  }
  if (!(scenario.capture_interval > 0.0)) {
    throw std::invalid_argument("generate_dataset: capture interval must be positive");
  }
  if (scenario.classes.empty()) {
    throw std::invalid_argument("generate_dataset: class list must not be empty");
  }
  if (noise.dropout < 0.0 || noise.dropout > 1.0) {
    throw std::invalid_argument("generate_dataset: dropout must lie in [0, 1]");
  }
  if (noise.center_sigma < 0 || noise.extent_sigma < 0 || noise.yaw_sigma < 0 ||
      noise.score_sigma < 0) {
    throw std::invalid_argument("generate_dataset: noise scales must be non-negative");
  }

  Dataset ds;
  for (const auto& label : scenario.classes) ds.class_set.insert(label);

  for (int si = 0; si < scenario.sequences; ++si) {
    const std::string seq_id = "s" + std::to_string(si);
    Rng track_rng(derive_seed(scenario.seed, static_cast<std::uint64_t>(si)));
    Rng noise_rng(derive_seed(noise.seed, 0x700000000ULL + static_cast<std::uint64_t>(si)));

    std::vector<ObjectTrack> tracks;
    tracks.reserve(scenario.objects_per_frame);
    for (int oi = 0; oi < scenario.objects_per_frame; ++oi) {
      ObjectTrack track;
      track.id = seq_id + "_o" + std::to_string(oi);
      track.class_label = scenario.classes[oi % scenario.classes.size()];
      const ClassTemplate tmpl = template_for(track.class_label);
      const double radius = track_rng.uniform(5.0, 75.0);
      const double angle = track_rng.uniform(-kPi, kPi);
      track.x0 = radius * std::cos(angle);
      track.y0 = radius * std::sin(angle);
      track.yaw0 = track_rng.uniform(-kPi, kPi);
      track.speed = track_rng.uniform(tmpl.speed_lo, tmpl.speed_hi);
      track.yaw_rate = track_rng.uniform(-0.3, 0.3);
      track.l = tmpl.l * track_rng.uniform(0.9, 1.1);
      track.w = tmpl.w * track_rng.uniform(0.9, 1.1);
      track.h = tmpl.h * track_rng.uniform(0.9, 1.1);
      track.base_score = track_rng.uniform(0.35, 0.95);
      tracks.push_back(std::move(track));
    }

    std::vector<FrameRecord> frames;
    frames.reserve(scenario.frames_per_sequence);
    for (int fi = 0; fi < scenario.frames_per_sequence; ++fi) {
      FrameRecord frame;
      frame.sequence_id = seq_id;
      frame.frame_index = fi;
      frame.timestamp = fi * scenario.capture_interval;
      frame.gts.reserve(tracks.size());
      frame.preds.reserve(tracks.size());
      for (const auto& track : tracks) {
        const Box3D gt_box = track_pose(track, scenario.motion, frame.timestamp);
        GroundTruthObject gt;
        gt.object_id = track.id;
        gt.class_label = track.class_label;
        gt.box = gt_box;
        gt.num_points = synth_num_points(std::hypot(gt_box.x, gt_box.y));
        frame.gts.push_back(std::move(gt));

        // Noise draws happen for every object in fixed order so that changing
        // the dropout rate alone cannot reshuffle other objects' noise.
        Vec3 dc{noise_rng.gaussian(), noise_rng.gaussian(), noise_rng.gaussian()};
        Vec3 de{noise_rng.gaussian(), noise_rng.gaussian(), noise_rng.gaussian()};
        const double dyaw = noise_rng.gaussian();
        const double dscore = noise_rng.gaussian();
        const bool dropped = noise_rng.uniform01() < noise.dropout;
        if (dropped) continue;

        Prediction pred;
        pred.class_label = track.class_label;
        pred.box = gt_box;
        pred.box.x += dc.x * noise.center_sigma;
        pred.box.y += dc.y * noise.center_sigma;
        pred.box.z += dc.z * noise.center_sigma;
        pred.box.l = std::max(0.05, gt_box.l * (1.0 + de.x * noise.extent_sigma));
        pred.box.w = std::max(0.05, gt_box.w * (1.0 + de.y * noise.extent_sigma));
        pred.box.h = std::max(0.05, gt_box.h * (1.0 + de.z * noise.extent_sigma));
        pred.box.yaw += dyaw * noise.yaw_sigma;
        pred.score = std::clamp(track.base_score + dscore * noise.score_sigma, 0.0, 1.0);
        frame.preds.push_back(std::move(pred));
      }
      frames.push_back(std::move(frame));
    }
    ds.sequences.emplace(seq_id, std::move(frames));
  }
  return ds;
}

CurveTable response_sweep(const ScenarioSpec& scenario, const NoiseSpec& base_noise,
                          NoiseAxis axis, const SweepGrid& grid, const EvaluationConfig& cfg,
                          int threads) {
  if (grid.steps < 2) throw std::invalid_argument("response_sweep: grid needs at least 2 steps");

  CurveTable curve;
  switch (axis) {
    case NoiseAxis::kCenter: curve.metric_name = "mean_si_vs_center_sigma"; break;
    case NoiseAxis::kExtent: curve.metric_name = "mean_si_vs_extent_sigma"; break;
    case NoiseAxis::kYaw: curve.metric_name = "mean_si_vs_yaw_sigma"; break;
    case NoiseAxis::kScore: curve.metric_name = "mean_si_vs_score_sigma"; break;
    case NoiseAxis::kDropout: curve.metric_name = "mean_si_vs_dropout"; break;
  }

  for (int i = 0; i < grid.steps; ++i) {
    const double value =
        grid.start + (grid.stop - grid.start) * i / static_cast<double>(grid.steps - 1);
    NoiseSpec noise = base_noise;
    switch (axis) {
      case NoiseAxis::kCenter: noise.center_sigma = value; break;
      case NoiseAxis::kExtent: noise.extent_sigma = value; break;
      case NoiseAxis::kYaw: noise.yaw_sigma = value; break;
      case NoiseAxis::kScore: noise.score_sigma = value; break;
      case NoiseAxis::kDropout: noise.dropout = std::clamp(value, 0.0, 1.0); break;
    }
    const Dataset ds = generate_dataset(scenario, noise);
    std::vector<PairOutcome> pairs;
    evaluate(ds, cfg, threads, &pairs);
    double acc = 0.0;
    for (const auto& p : pairs) acc += p.score.si;
    const double mean = pairs.empty() ? 0.0 : acc / static_cast<double>(pairs.size());
    curve.rows.emplace_back(value, mean);
  }
  return curve;
}

}  // namespace stabidx
