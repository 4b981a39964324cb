#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stabidx/box.hpp"

namespace stabidx {

struct GroundTruthObject {
  std::string object_id;  // persistent across the frames of a sequence
  std::string class_label;
  Box3D box;
  std::optional<std::int64_t> num_points;
};

struct Prediction {
  std::string class_label;
  double score = 0.0;
  Box3D box;
};

/// One timestamped frame: the labeled objects plus the detector output.
struct FrameRecord {
  std::string sequence_id;
  std::int64_t frame_index = 0;
  double timestamp = 0.0;  // seconds
  std::vector<GroundTruthObject> gts;
  std::vector<Prediction> preds;
};

}  // namespace stabidx
