#include "stabidx/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

namespace stabidx {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& msg) {
  throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + msg);
}

void check_keys(const json& obj, std::initializer_list<const char*> known,
                const std::string& context, const LoadOptions& opts, const std::string& origin,
                std::size_t line) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find_if(known.begin(), known.end(),
                     [&](const char* k) { return key == k; }) != known.end()) {
      continue;
    }
    if (opts.strict) fail(origin, line, context + ": unknown key '" + key + "'");
    if (opts.warnings) {
      *opts.warnings << origin << ":" << line << ": warning: ignoring unknown key '" << key
                     << "' in " << context << "\n";
    }
  }
}

double require_number(const json& obj, const char* key, const std::string& context,
                      const std::string& origin, std::size_t line) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    fail(origin, line, context + ": missing or non-numeric field '" + std::string(key) + "'");
  }
  const double v = obj[key].get<double>();
  if (!std::isfinite(v)) {
    fail(origin, line, context + ": field '" + std::string(key) + "' is not finite");
  }
  return v;
}

std::string require_string(const json& obj, const char* key, const std::string& context,
                           const std::string& origin, std::size_t line) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    fail(origin, line, context + ": missing or non-string field '" + std::string(key) + "'");
  }
  return obj[key].get<std::string>();
}

Box3D parse_box(const json& arr, const std::string& context, const std::string& origin,
                std::size_t line) {
  if (!arr.is_array() || arr.size() != 7) {
    fail(origin, line, context + ": 'box' must be an array of 7 numbers");
  }
  double v[7];
  for (std::size_t i = 0; i < 7; ++i) {
    if (!arr[i].is_number()) fail(origin, line, context + ": 'box' entries must be numbers");
    v[i] = arr[i].get<double>();
    if (!std::isfinite(v[i])) fail(origin, line, context + ": 'box' entries must be finite");
  }
  Box3D box{v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
  if (!has_positive_extents(box)) {
    fail(origin, line, context + ": box extents must be positive");
  }
  return box;
}

FrameRecord parse_frame(const std::string& text, const LoadOptions& opts,
                        const std::string& origin, std::size_t line) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(origin, line, std::string("malformed record: ") + e.what());
  }
  if (!j.is_object()) fail(origin, line, "record is not an object");
  check_keys(j, {"seq", "frame", "time", "gts", "preds"}, "frame", opts, origin, line);

  FrameRecord frame;
  frame.sequence_id = require_string(j, "seq", "frame", origin, line);
  if (!j.contains("frame") || !j["frame"].is_number_integer()) {
    fail(origin, line, "frame: missing or non-integer field 'frame'");
  }
  frame.frame_index = j["frame"].get<std::int64_t>();
  if (frame.frame_index < 0) fail(origin, line, "frame: 'frame' must be non-negative");
  frame.timestamp = require_number(j, "time", "frame", origin, line);

  if (!j.contains("gts") || !j["gts"].is_array()) {
    fail(origin, line, "frame: missing array field 'gts'");
  }
  if (!j.contains("preds") || !j["preds"].is_array()) {
    fail(origin, line, "frame: missing array field 'preds'");
  }

  std::unordered_set<std::string> ids;
  for (const auto& g : j["gts"]) {
    if (!g.is_object()) fail(origin, line, "gts entry is not an object");
    check_keys(g, {"id", "class", "box", "num_points"}, "gt", opts, origin, line);
    GroundTruthObject gt;
    gt.object_id = require_string(g, "id", "gt", origin, line);
    gt.class_label = require_string(g, "class", "gt", origin, line);
    if (!g.contains("box")) fail(origin, line, "gt: missing field 'box'");
    gt.box = parse_box(g["box"], "gt", origin, line);
    if (g.contains("num_points")) {
      if (!g["num_points"].is_number_integer() || g["num_points"].get<std::int64_t>() < 0) {
        fail(origin, line, "gt: 'num_points' must be a non-negative integer");
      }
      gt.num_points = g["num_points"].get<std::int64_t>();
    }
    if (!ids.insert(gt.object_id).second) {
      fail(origin, line, "duplicate object id '" + gt.object_id + "' in frame");
    }
    frame.gts.push_back(std::move(gt));
  }

  for (const auto& p : j["preds"]) {
    if (!p.is_object()) fail(origin, line, "preds entry is not an object");
    check_keys(p, {"class", "score", "box"}, "pred", opts, origin, line);
    Prediction pred;
    pred.class_label = require_string(p, "class", "pred", origin, line);
    pred.score = require_number(p, "score", "pred", origin, line);
    if (!p.contains("box")) fail(origin, line, "pred: missing field 'box'");
    pred.box = parse_box(p["box"], "pred", origin, line);
    frame.preds.push_back(std::move(pred));
  }
  return frame;
}

}  // namespace

Dataset parse_dataset(std::istream& in, const LoadOptions& opts, const std::string& origin) {
  Dataset ds;
  std::map<std::string, std::unordered_set<std::int64_t>> frame_indices;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    FrameRecord frame = parse_frame(line, opts, origin, line_no);

    auto& seq = ds.sequences[frame.sequence_id];
    if (!seq.empty() && frame.timestamp <= seq.back().timestamp) {
      fail(origin, line_no,
           "sequence '" + frame.sequence_id + "': timestamp " + std::to_string(frame.timestamp) +
               " does not increase past " + std::to_string(seq.back().timestamp));
    }
    if (!frame_indices[frame.sequence_id].insert(frame.frame_index).second) {
      fail(origin, line_no,
           "sequence '" + frame.sequence_id + "': duplicate frame index " +
               std::to_string(frame.frame_index));
    }
    for (const auto& gt : frame.gts) ds.class_set.insert(gt.class_label);
    for (const auto& p : frame.preds) ds.class_set.insert(p.class_label);
    seq.push_back(std::move(frame));
  }
  return ds;
}

Dataset load_dataset(const std::string& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  return parse_dataset(in, opts, path);
}

std::string serialize_frame(const FrameRecord& frame) {
  ordered_json j;
  j["seq"] = frame.sequence_id;
  j["frame"] = frame.frame_index;
  j["time"] = frame.timestamp;
  j["gts"] = ordered_json::array();
  for (const auto& gt : frame.gts) {
    ordered_json g;
    g["id"] = gt.object_id;
    g["class"] = gt.class_label;
    g["box"] = {gt.box.x, gt.box.y, gt.box.z, gt.box.l, gt.box.w, gt.box.h, gt.box.yaw};
    if (gt.num_points) g["num_points"] = *gt.num_points;
    j["gts"].push_back(std::move(g));
  }
  j["preds"] = ordered_json::array();
  for (const auto& p : frame.preds) {
    ordered_json q;
    q["class"] = p.class_label;
    q["score"] = p.score;
    q["box"] = {p.box.x, p.box.y, p.box.z, p.box.l, p.box.w, p.box.h, p.box.yaw};
    j["preds"].push_back(std::move(q));
  }
  return j.dump();
}

std::string serialize_dataset(const Dataset& ds) {
  std::string out;
  for (const auto& [seq_id, frames] : ds.sequences) {
    (void)seq_id;
    for (const auto& frame : frames) {
      out += serialize_frame(frame);
      out += '\n';
    }
  }
  return out;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << serialize_dataset(ds);
  if (!out) throw std::runtime_error("failed writing dataset file: " + path);
}

std::map<std::string, std::vector<double>> collect_confidences(
    const Dataset& ds, const std::map<std::string, std::vector<std::vector<int>>>& matches) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& [seq_id, frames] : ds.sequences) {
    const auto found = matches.find(seq_id);
    if (found == matches.end() || found->second.size() != frames.size()) {
      throw std::invalid_argument("collect_confidences: matches do not align with dataset");
    }
    for (std::size_t f = 0; f < frames.size(); ++f) {
      const auto& frame_matches = found->second[f];
      if (frame_matches.size() != frames[f].gts.size()) {
        throw std::invalid_argument("collect_confidences: matches do not align with frame GTs");
      }
      for (std::size_t g = 0; g < frame_matches.size(); ++g) {
        const int pi = frame_matches[g];
        if (pi >= 0) {
          out[frames[f].gts[g].class_label].push_back(frames[f].preds[pi].score);
        }
      }
    }
  }
  for (auto& [label, scores] : out) {
    (void)label;
    std::sort(scores.begin(), scores.end());
  }
  return out;
}

}  // namespace stabidx
