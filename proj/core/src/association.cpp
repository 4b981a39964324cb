#include "stabidx/association.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "stabidx/geometry.hpp"
#include "stabidx/hungarian.hpp"

namespace stabidx {
namespace {

// Cheap reject before polygon clipping: no vertical overlap, or BEV
// circumcircles disjoint.
double match_iou(const Box3D& a, const Box3D& b) {
  if (std::min(a.z + 0.5 * a.h, b.z + 0.5 * b.h) <= std::max(a.z - 0.5 * a.h, b.z - 0.5 * b.h)) {
    return 0.0;
  }
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double reach = 0.5 * (std::hypot(a.l, a.w) + std::hypot(b.l, b.w));
  if (dx * dx + dy * dy >= reach * reach) return 0.0;
  return iou_rotated(a, b);
}

void check_unique_ids(const FrameRecord& frame) {
  std::unordered_set<std::string> seen;
  seen.reserve(frame.gts.size());
  for (const auto& gt : frame.gts) {
    if (!seen.insert(gt.object_id).second) {
      throw std::runtime_error("sequence '" + frame.sequence_id + "' frame " +
                               std::to_string(frame.frame_index) + ": duplicate object id '" +
                               gt.object_id + "'");
    }
  }
}

}  // namespace

std::vector<int> match_frame_indices(const std::vector<GroundTruthObject>& gts,
                                     const std::vector<Prediction>& preds, double min_iou) {
  std::vector<int> result(gts.size(), -1);
  if (gts.empty() || preds.empty()) return result;

  // Class-restricted matching: solve one assignment per class present in GTs.
  std::map<std::string, std::pair<std::vector<int>, std::vector<int>>> by_class;
  for (int i = 0; i < static_cast<int>(gts.size()); ++i) {
    by_class[gts[i].class_label].first.push_back(i);
  }
  for (int j = 0; j < static_cast<int>(preds.size()); ++j) {
    auto it = by_class.find(preds[j].class_label);
    if (it != by_class.end()) it->second.second.push_back(j);
  }

  for (const auto& [label, indices] : by_class) {
    const auto& gt_idx = indices.first;
    const auto& pred_idx = indices.second;
    if (pred_idx.empty()) continue;

    const int rows = static_cast<int>(gt_idx.size());
    const int cols = static_cast<int>(pred_idx.size());
    std::vector<double> cost(static_cast<std::size_t>(rows) * cols);
    std::vector<double> iou(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double v = match_iou(gts[gt_idx[r]].box, preds[pred_idx[c]].box);
        iou[static_cast<std::size_t>(r) * cols + c] = v;
        cost[static_cast<std::size_t>(r) * cols + c] = 1.0 - v;
      }
    }

    const AssignmentResult assignment = solve_assignment(cost, rows, cols);
    for (int r = 0; r < rows; ++r) {
      const int c = assignment.row_to_col[r];
      if (c < 0) continue;
      if (iou[static_cast<std::size_t>(r) * cols + c] < min_iou) continue;
      result[gt_idx[r]] = pred_idx[c];
    }
  }
  return result;
}

FrameMatches match_frame(const std::vector<GroundTruthObject>& gts,
                         const std::vector<Prediction>& preds, double min_iou) {
  const std::vector<int> indices = match_frame_indices(gts, preds, min_iou);
  FrameMatches out;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (indices[i] >= 0) {
      out[gts[i].object_id] = preds[indices[i]];
    } else {
      out[gts[i].object_id] = std::nullopt;
    }
  }
  return out;
}

double median_interval(const std::vector<FrameRecord>& frames) {
  if (frames.size() < 2) return 0.0;
  std::vector<double> gaps;
  gaps.reserve(frames.size() - 1);
  for (std::size_t i = 1; i < frames.size(); ++i) {
    gaps.push_back(frames[i].timestamp - frames[i - 1].timestamp);
  }
  std::sort(gaps.begin(), gaps.end());
  return gaps[gaps.size() / 2];
}

std::vector<StabilityPair> enumerate_pairs(const std::vector<FrameRecord>& frames,
                                           const std::vector<std::vector<int>>& matches,
                                           double delta_t, double tolerance) {
  if (delta_t <= 0.0) throw std::invalid_argument("enumerate_pairs: delta_t must be positive");
  if (matches.size() != frames.size()) {
    throw std::invalid_argument("enumerate_pairs: matches must align with frames");
  }

  std::vector<StabilityPair> pairs;
  if (frames.empty()) return pairs;

  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].timestamp == frames[i - 1].timestamp) {
      throw std::runtime_error("sequence '" + frames[i].sequence_id +
                               "': duplicate timestamp " + std::to_string(frames[i].timestamp));
    }
    if (frames[i].timestamp < frames[i - 1].timestamp) {
      throw std::runtime_error("sequence '" + frames[i].sequence_id +
                               "': frames not sorted by timestamp");
    }
  }
  for (const auto& frame : frames) check_unique_ids(frame);

  const double tol = tolerance > 0.0 ? tolerance : 0.5 * median_interval(frames);

  std::vector<double> times;
  times.reserve(frames.size());
  for (const auto& f : frames) times.push_back(f.timestamp);

  // Per-frame id -> gt index lookup, built lazily for frames used as targets.
  std::vector<std::unordered_map<std::string, int>> id_maps(frames.size());
  std::vector<char> id_map_built(frames.size(), 0);
  auto id_map = [&](std::size_t fi) -> const std::unordered_map<std::string, int>& {
    if (!id_map_built[fi]) {
      auto& m = id_maps[fi];
      m.reserve(frames[fi].gts.size());
      for (int g = 0; g < static_cast<int>(frames[fi].gts.size()); ++g) {
        m.emplace(frames[fi].gts[g].object_id, g);
      }
      id_map_built[fi] = 1;
    }
    return id_maps[fi];
  };

  auto observation = [&](std::size_t fi, int gi) {
    MatchedObservation obs;
    obs.gt = frames[fi].gts[gi].box;
    const int pi = matches[fi][gi];
    if (pi >= 0) obs.pred = ScoredBox{frames[fi].preds[pi].box, frames[fi].preds[pi].score};
    return obs;
  };

  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (matches[i].size() != frames[i].gts.size()) {
      throw std::invalid_argument("enumerate_pairs: matches entry does not align with frame GTs");
    }
    const double target = frames[i].timestamp + delta_t;
    auto it = std::lower_bound(times.begin(), times.end(), target - tol);
    // Pick the closest candidate inside the tolerance window.
    std::size_t best = frames.size();
    double best_err = tol;
    for (; it != times.end() && *it <= target + tol; ++it) {
      const double err = std::abs(*it - target);
      if (err <= best_err) {
        best_err = err;
        best = static_cast<std::size_t>(it - times.begin());
      }
    }
    if (best >= frames.size() || best == i) continue;

    const auto& target_ids = id_map(best);
    for (int g = 0; g < static_cast<int>(frames[i].gts.size()); ++g) {
      const auto& gt1 = frames[i].gts[g];
      const auto found = target_ids.find(gt1.object_id);
      if (found == target_ids.end()) continue;  // labeled in one frame only: no pair
      const auto& gt2 = frames[best].gts[found->second];
      if (gt1.class_label != gt2.class_label) {
        throw std::runtime_error("sequence '" + frames[i].sequence_id + "': object '" +
                                 gt1.object_id + "' changes class between frames");
      }
      StabilityPair pair;
      pair.object_id = gt1.object_id;
      pair.class_label = gt1.class_label;
      pair.t1 = frames[i].timestamp;
      pair.t2 = frames[best].timestamp;
      pair.gt1 = gt1.box;
      pair.gt2 = gt2.box;
      pair.obs1 = observation(i, g);
      pair.obs2 = observation(best, found->second);
      pair.num_points = gt1.num_points;
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

std::vector<StabilityPair> enumerate_pairs(const std::vector<FrameRecord>& frames, double delta_t,
                                           double tolerance, double min_iou) {
  std::vector<std::vector<int>> matches;
  matches.reserve(frames.size());
  for (const auto& frame : frames) {
    matches.push_back(match_frame_indices(frame.gts, frame.preds, min_iou));
  }
  return enumerate_pairs(frames, matches, delta_t, tolerance);
}

}  // namespace stabidx
