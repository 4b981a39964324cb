#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "stabidx/frame.hpp"

namespace stabidx {

/// Validated multi-sequence detection data. Frames are stored in timestamp
/// order; every referenced class label appears in class_set.
struct Dataset {
  std::map<std::string, std::vector<FrameRecord>> sequences;
  std::set<std::string> class_set;
};

struct LoadOptions {
  /// Reject unknown keys instead of warning about them.
  bool strict = false;
  /// Sink for non-strict warnings; null silences them.
  std::ostream* warnings = nullptr;
};

/// Loads a line-delimited dataset file, one frame object per line:
///   {"seq": str, "frame": int, "time": float,
///    "gts":  [{"id": str, "class": str, "box": [x,y,z,l,w,h,yaw],
///              "num_points": int (optional)}],
///    "preds":[{"class": str, "score": float, "box": [x,y,z,l,w,h,yaw]}]}
/// Violations (malformed records, timestamp regressions, duplicate frame
/// indices or object ids, bad boxes) raise std::runtime_error naming the
/// offending line.
Dataset load_dataset(const std::string& path, const LoadOptions& opts = {});

/// Stream variant of load_dataset; `origin` names the source in errors.
Dataset parse_dataset(std::istream& in, const LoadOptions& opts = {},
                      const std::string& origin = "<stream>");

/// Canonical single-line serialization of one frame (fixed key order).
std::string serialize_frame(const FrameRecord& frame);

/// Writes the dataset in canonical form; loading the result and saving it
/// again reproduces the bytes exactly.
void save_dataset(const Dataset& ds, const std::string& path);
std::string serialize_dataset(const Dataset& ds);

/// Sorted matched-prediction confidences per class. `matches` holds, per
/// sequence, one entry per frame with the matched prediction index per GT
/// (as produced by match_frame_indices); it must align with `ds`.
std::map<std::string, std::vector<double>> collect_confidences(
    const Dataset& ds, const std::map<std::string, std::vector<std::vector<int>>>& matches);

}  // namespace stabidx
