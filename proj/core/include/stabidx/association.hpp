#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stabidx/frame.hpp"
#include "stabidx/stability.hpp"

namespace stabidx {

/// Per-frame matching result keyed by ground-truth object id.
using FrameMatches = std::map<std::string, std::optional<Prediction>>;

/// Hungarian matching of predictions to ground truths within each class.
/// Cost is 1 - volumetric rotated IoU; assignments whose IoU falls below
/// `min_iou` are discarded. Returns, per GT index, the index of the matched
/// prediction or -1. Each prediction is assigned at most once.
std::vector<int> match_frame_indices(const std::vector<GroundTruthObject>& gts,
                                     const std::vector<Prediction>& preds, double min_iou);

FrameMatches match_frame(const std::vector<GroundTruthObject>& gts,
                         const std::vector<Prediction>& preds, double min_iou);

/// One object observed at two timestamps delta_t apart, with whatever
/// predictions the matcher found on each side.
struct StabilityPair {
  std::string object_id;
  std::string class_label;
  double t1 = 0.0;
  double t2 = 0.0;
  Box3D gt1;
  Box3D gt2;
  MatchedObservation obs1;
  MatchedObservation obs2;
  std::optional<std::int64_t> num_points;  // of the first observation's GT
};

/// Median interval between consecutive timestamps; 0 for fewer than 2 frames.
double median_interval(const std::vector<FrameRecord>& frames);

/// Enumerates stability pairs of a sequence sorted by timestamp: every object
/// labeled both in a frame at t and in the frame at t + delta_t (located
/// within `tolerance`; <= 0 selects half the median capture interval).
/// Objects labeled in only one of the two frames are skipped. `matches` must
/// align with `frames` (one entry per GT, as from match_frame_indices).
///
/// Throws std::runtime_error for unordered or duplicate timestamps, duplicate
/// object ids within a frame, or an object id changing class across frames.
std::vector<StabilityPair> enumerate_pairs(const std::vector<FrameRecord>& frames,
                                           const std::vector<std::vector<int>>& matches,
                                           double delta_t, double tolerance = 0.0);

/// Convenience form that runs match_frame_indices on every frame first.
std::vector<StabilityPair> enumerate_pairs(const std::vector<FrameRecord>& frames, double delta_t,
                                           double tolerance = 0.0, double min_iou = 1e-6);

}  // namespace stabidx
