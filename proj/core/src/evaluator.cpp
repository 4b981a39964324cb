#include "stabidx/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "stabidx/parallel.hpp"

namespace stabidx {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Order-independent mean: summing the sorted values makes the result a pure
/// function of the multiset, so reversing sequences or changing the thread
/// count cannot move it by even one ulp.
std::optional<double> sorted_mean(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

std::uint64_t fnv1a(std::uint64_t hash, const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t fnv1a_str(std::uint64_t hash, const std::string& s) {
  return fnv1a(hash, s.data(), s.size());
}

std::uint64_t fnv1a_f64(std::uint64_t hash, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  return fnv1a(hash, &bits, sizeof(bits));
}

std::uint64_t fnv1a_box(std::uint64_t hash, const Box3D& b) {
  for (double v : {b.x, b.y, b.z, b.l, b.w, b.h, b.yaw}) hash = fnv1a_f64(hash, v);
  return hash;
}

std::string format_f6(double v) {
  char buf[64];
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// --- JSON rendering (hand-rolled: fixed 6-decimal floats, fixed order) ---

void json_string(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void json_number(std::string& out, double v) {
  // JSON has no infinity; overflow bin bounds render as null.
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  out += format_f6(v);
}

void json_opt(std::string& out, const std::optional<double>& v) {
  if (v) {
    json_number(out, *v);
  } else {
    out += "null";
  }
}

void json_edges(std::string& out, const std::vector<double>& edges) {
  out += '[';
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (i) out += ',';
    json_number(out, edges[i]);
  }
  out += ']';
}

void json_string_list(std::string& out, const std::vector<std::string>& items) {
  out += '[';
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    json_string(out, items[i]);
  }
  out += ']';
}

}  // namespace

CalibrationRange calibrate(const std::vector<double>& sorted_confidences, double hi, double lo) {
  if (!(hi > lo)) throw std::invalid_argument("calibrate: hi percentile must exceed lo");
  if (sorted_confidences.empty()) return {0.0, 0.0};

  auto percentile = [&](double q) {
    const std::size_t n = sorted_confidences.size();
    if (n == 1) return sorted_confidences[0];
    const double pos = q * static_cast<double>(n - 1);
    const auto idx = static_cast<std::size_t>(pos);
    if (idx + 1 >= n) return sorted_confidences[n - 1];
    const double frac = pos - static_cast<double>(idx);
    return sorted_confidences[idx] * (1.0 - frac) + sorted_confidences[idx + 1] * frac;
  };
  return {percentile(hi), percentile(lo)};
}

DatasetDigest digest_dataset(const Dataset& ds) {
  DatasetDigest digest;
  digest.sequences = static_cast<std::int64_t>(ds.sequences.size());
  digest.classes.assign(ds.class_set.begin(), ds.class_set.end());

  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const auto& [seq_id, frames] : ds.sequences) {
    hash = fnv1a_str(hash, seq_id);
    digest.frames += static_cast<std::int64_t>(frames.size());
    for (const auto& frame : frames) {
      hash = fnv1a(hash, &frame.frame_index, sizeof(frame.frame_index));
      hash = fnv1a_f64(hash, frame.timestamp);
      digest.gts += static_cast<std::int64_t>(frame.gts.size());
      digest.preds += static_cast<std::int64_t>(frame.preds.size());
      for (const auto& gt : frame.gts) {
        hash = fnv1a_str(hash, gt.object_id);
        hash = fnv1a_str(hash, gt.class_label);
        hash = fnv1a_box(hash, gt.box);
        const std::int64_t pts = gt.num_points.value_or(-1);
        hash = fnv1a(hash, &pts, sizeof(pts));
      }
      for (const auto& p : frame.preds) {
        hash = fnv1a_str(hash, p.class_label);
        hash = fnv1a_f64(hash, p.score);
        hash = fnv1a_box(hash, p.box);
      }
    }
  }
  digest.content_hash = hash;
  return digest;
}

std::vector<BreakdownRow> breakdown(const std::vector<PairOutcome>& pairs, PairProperty property,
                                    const std::vector<double>& edges) {
  if (edges.size() < 2) throw std::invalid_argument("breakdown: need at least two bin edges");
  if (!std::is_sorted(edges.begin(), edges.end())) {
    throw std::invalid_argument("breakdown: bin edges must be ascending");
  }

  const bool with_unknown = property == PairProperty::kPoints;
  // rows: underflow, edges.size()-1 interior bins, overflow, optional unknown.
  const std::size_t n_rows = edges.size() + 1 + (with_unknown ? 1 : 0);
  std::vector<BreakdownRow> rows(n_rows);
  rows[0].lo = -kInf;
  rows[0].hi = edges.front();
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    rows[i + 1].lo = edges[i];
    rows[i + 1].hi = edges[i + 1];
  }
  rows[edges.size()].lo = edges.back();
  rows[edges.size()].hi = kInf;
  if (with_unknown) {
    rows[n_rows - 1].lo = std::numeric_limits<double>::quiet_NaN();
    rows[n_rows - 1].hi = std::numeric_limits<double>::quiet_NaN();
  }

  std::vector<std::vector<double>> values(n_rows);
  for (const auto& pair : pairs) {
    std::optional<double> v;
    switch (property) {
      case PairProperty::kDistance: v = pair.distance; break;
      case PairProperty::kVolume: v = pair.volume; break;
      case PairProperty::kLwr: v = pair.lwr; break;
      case PairProperty::kPoints:
        if (pair.num_points) v = static_cast<double>(*pair.num_points);
        break;
    }
    std::size_t row;
    if (!v) {
      row = n_rows - 1;  // unknown bin
    } else {
      // upper_bound maps a value equal to an edge into the bin starting there.
      const auto it = std::upper_bound(edges.begin(), edges.end(), *v);
      row = static_cast<std::size_t>(it - edges.begin());
    }
    values[row].push_back(pair.score.si);
  }
  for (std::size_t r = 0; r < n_rows; ++r) {
    rows[r].count = static_cast<std::int64_t>(values[r].size());
    rows[r].mean_si = sorted_mean(std::move(values[r]));
  }
  return rows;
}

EvaluationReport evaluate(const Dataset& ds, const EvaluationConfig& cfg, int threads,
                          std::vector<PairOutcome>* pair_dump) {
  if (cfg.delta_t <= 0.0) throw std::invalid_argument("evaluate: delta_t must be positive");
  if (!(cfg.percentile_hi > cfg.percentile_lo)) {
    throw std::invalid_argument("evaluate: percentile_hi must exceed percentile_lo");
  }

  EvaluationReport report;
  report.config = cfg;
  report.digest = digest_dataset(ds);

  const std::set<std::string> filter(cfg.classes.begin(), cfg.classes.end());
  const auto class_selected = [&](const std::string& label) {
    return filter.empty() || filter.count(label) > 0;
  };

  std::vector<const std::vector<FrameRecord>*> seqs;
  seqs.reserve(ds.sequences.size());
  for (const auto& [seq_id, frames] : ds.sequences) {
    (void)seq_id;
    seqs.push_back(&frames);
  }

  // Pass 1: match every frame. Sequences are independent; slots keep the
  // outcome identical for any worker count.
  std::vector<std::vector<std::vector<int>>> matches(seqs.size());
  parallel_for(seqs.size(), threads, [&](std::size_t si) {
    const auto& frames = *seqs[si];
    auto& seq_matches = matches[si];
    seq_matches.reserve(frames.size());
    for (const auto& frame : frames) {
      std::vector<int> frame_match(frame.gts.size(), -1);
      if (!frame.preds.empty()) {
        // Skip classes outside the filter: matching is class-restricted, so
        // the remaining assignments are unaffected.
        std::vector<GroundTruthObject> const* gts = &frame.gts;
        std::vector<GroundTruthObject> kept;
        std::vector<int> kept_idx;
        if (!filter.empty()) {
          for (int g = 0; g < static_cast<int>(frame.gts.size()); ++g) {
            if (class_selected(frame.gts[g].class_label)) {
              kept.push_back(frame.gts[g]);
              kept_idx.push_back(g);
            }
          }
          gts = &kept;
        }
        const std::vector<int> m = match_frame_indices(*gts, frame.preds, cfg.min_iou);
        if (filter.empty()) {
          frame_match = m;
        } else {
          for (std::size_t k = 0; k < kept_idx.size(); ++k) frame_match[kept_idx[k]] = m[k];
        }
      }
      seq_matches.push_back(std::move(frame_match));
    }
  });

  // Calibration inputs: matched confidences per class, in deterministic
  // sequence order.
  std::map<std::string, std::vector<std::vector<int>>> matches_by_seq;
  {
    std::size_t si = 0;
    for (const auto& [seq_id, frames] : ds.sequences) {
      (void)frames;
      matches_by_seq[seq_id] = matches[si++];
    }
  }
  const auto confidences = collect_confidences(ds, matches_by_seq);
  std::map<std::string, CalibrationRange> calibration;
  for (const auto& [label, scores] : confidences) {
    calibration[label] = calibrate(scores, cfg.percentile_hi, cfg.percentile_lo);
  }

  // Pass 2: enumerate and score pairs per sequence.
  std::vector<std::vector<PairOutcome>> outcomes(seqs.size());
  parallel_for(seqs.size(), threads, [&](std::size_t si) {
    const auto& frames = *seqs[si];
    const auto pairs = enumerate_pairs(frames, matches[si], cfg.delta_t, cfg.frame_tolerance);
    auto& out = outcomes[si];
    out.reserve(pairs.size());
    for (const auto& pair : pairs) {
      if (!class_selected(pair.class_label)) continue;
      CalibrationRange cal;
      const auto cal_it = calibration.find(pair.class_label);
      if (cal_it != calibration.end()) cal = cal_it->second;

      PairOutcome outcome;
      outcome.sequence_id = frames.front().sequence_id;
      outcome.object_id = pair.object_id;
      outcome.class_label = pair.class_label;
      outcome.t1 = pair.t1;
      outcome.t2 = pair.t2;
      outcome.matched = pair.obs1.present() && pair.obs2.present();
      outcome.score = stability_index(pair.obs1, pair.obs2, cal);
      outcome.distance = std::sqrt(pair.gt1.x * pair.gt1.x + pair.gt1.y * pair.gt1.y +
                                   pair.gt1.z * pair.gt1.z);
      outcome.volume = pair.gt1.volume();
      outcome.lwr = pair.gt1.l / pair.gt1.w;
      outcome.num_points = pair.num_points;
      out.push_back(std::move(outcome));
    }
  });

  std::vector<PairOutcome> all;
  std::size_t total = 0;
  for (const auto& v : outcomes) total += v.size();
  all.reserve(total);
  for (auto& v : outcomes) {
    all.insert(all.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  }

  // Every evaluated class appears in the report, with explicit empty markers
  // when it produced no pairs.
  std::map<std::string, std::vector<const PairOutcome*>> by_class;
  for (const auto& [seq_id, frames] : ds.sequences) {
    (void)seq_id;
    for (const auto& frame : frames) {
      for (const auto& gt : frame.gts) {
        if (class_selected(gt.class_label)) by_class[gt.class_label];
      }
    }
  }
  for (const auto& outcome : all) by_class[outcome.class_label].push_back(&outcome);

  for (const auto& [label, class_pairs] : by_class) {
    ClassReport cr;
    cr.pairs = static_cast<std::int64_t>(class_pairs.size());
    std::vector<double> si_values, c_values, l_values, e_values, h_values;
    si_values.reserve(class_pairs.size());
    for (const PairOutcome* p : class_pairs) {
      si_values.push_back(p->score.si);
      if (p->matched) {
        c_values.push_back(p->score.si_c);
        l_values.push_back(p->score.si_l);
        e_values.push_back(p->score.si_e);
        h_values.push_back(p->score.si_h);
      } else {
        ++cr.invalid_pairs;
      }
    }
    cr.si = sorted_mean(std::move(si_values));
    cr.si_c = sorted_mean(std::move(c_values));
    cr.si_l = sorted_mean(std::move(l_values));
    cr.si_e = sorted_mean(std::move(e_values));
    cr.si_h = sorted_mean(std::move(h_values));
    report.classes[label] = cr;
  }

  report.breakdowns["distance"] = breakdown(all, PairProperty::kDistance, cfg.distance_bins);
  report.breakdowns["points"] = breakdown(all, PairProperty::kPoints, cfg.points_bins);
  report.breakdowns["volume"] = breakdown(all, PairProperty::kVolume, cfg.volume_bins);
  report.breakdowns["lwr"] = breakdown(all, PairProperty::kLwr, cfg.lwr_bins);

  if (pair_dump) *pair_dump = std::move(all);
  return report;
}

std::string render_report(const EvaluationReport& report, ReportFormat format) {
  char buf[64];
  if (format == ReportFormat::kJson) {
    std::string out = "{\"config\":{";
    out += "\"delta_t\":";
    json_number(out, report.config.delta_t);
    out += ",\"min_iou\":";
    json_number(out, report.config.min_iou);
    out += ",\"percentile_hi\":";
    json_number(out, report.config.percentile_hi);
    out += ",\"percentile_lo\":";
    json_number(out, report.config.percentile_lo);
    out += ",\"frame_tolerance\":";
    json_number(out, report.config.frame_tolerance);
    out += ",\"classes\":";
    json_string_list(out, report.config.classes);
    out += ",\"distance_bins\":";
    json_edges(out, report.config.distance_bins);
    out += ",\"points_bins\":";
    json_edges(out, report.config.points_bins);
    out += ",\"volume_bins\":";
    json_edges(out, report.config.volume_bins);
    out += ",\"lwr_bins\":";
    json_edges(out, report.config.lwr_bins);
    out += "},\"digest\":{";
    out += "\"sequences\":" + std::to_string(report.digest.sequences);
    out += ",\"frames\":" + std::to_string(report.digest.frames);
    out += ",\"gts\":" + std::to_string(report.digest.gts);
    out += ",\"preds\":" + std::to_string(report.digest.preds);
    out += ",\"classes\":";
    json_string_list(out, report.digest.classes);
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(report.digest.content_hash));
    out += ",\"content_hash\":\"";
    out += buf;
    out += "\"},\"classes\":{";
    bool first = true;
    for (const auto& [label, cr] : report.classes) {
      if (!first) out += ',';
      first = false;
      json_string(out, label);
      out += ":{\"si\":";
      json_opt(out, cr.si);
      out += ",\"si_c\":";
      json_opt(out, cr.si_c);
      out += ",\"si_l\":";
      json_opt(out, cr.si_l);
      out += ",\"si_e\":";
      json_opt(out, cr.si_e);
      out += ",\"si_h\":";
      json_opt(out, cr.si_h);
      out += ",\"pairs\":" + std::to_string(cr.pairs);
      out += ",\"invalid_pairs\":" + std::to_string(cr.invalid_pairs);
      out += '}';
    }
    out += "},\"breakdowns\":{";
    first = true;
    for (const auto& [name, rows] : report.breakdowns) {
      if (!first) out += ',';
      first = false;
      json_string(out, name);
      out += ":[";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i) out += ',';
        out += "{\"lo\":";
        json_number(out, rows[i].lo);
        out += ",\"hi\":";
        json_number(out, rows[i].hi);
        out += ",\"mean_si\":";
        json_opt(out, rows[i].mean_si);
        out += ",\"count\":" + std::to_string(rows[i].count);
        out += '}';
      }
      out += ']';
    }
    out += "}}";
    return out;
  }

  // CSV: sections separated by headers; empty cells for missing values.
  std::string out = "[config]\nkey,value\n";
  out += "delta_t," + format_f6(report.config.delta_t) + "\n";
  out += "min_iou," + format_f6(report.config.min_iou) + "\n";
  out += "percentile_hi," + format_f6(report.config.percentile_hi) + "\n";
  out += "percentile_lo," + format_f6(report.config.percentile_lo) + "\n";
  out += "frame_tolerance," + format_f6(report.config.frame_tolerance) + "\n";
  out += "\n[digest]\nkey,value\n";
  out += "sequences," + std::to_string(report.digest.sequences) + "\n";
  out += "frames," + std::to_string(report.digest.frames) + "\n";
  out += "gts," + std::to_string(report.digest.gts) + "\n";
  out += "preds," + std::to_string(report.digest.preds) + "\n";
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(report.digest.content_hash));
  out += "content_hash,";
  out += buf;
  out += "\n";
  out += "\n[classes]\nclass,si,si_c,si_l,si_e,si_h,pairs,invalid_pairs\n";
  auto opt_cell = [&](const std::optional<double>& v) { return v ? format_f6(*v) : std::string(); };
  for (const auto& [label, cr] : report.classes) {
    out += label + "," + opt_cell(cr.si) + "," + opt_cell(cr.si_c) + "," + opt_cell(cr.si_l) +
           "," + opt_cell(cr.si_e) + "," + opt_cell(cr.si_h) + "," + std::to_string(cr.pairs) +
           "," + std::to_string(cr.invalid_pairs) + "\n";
  }
  for (const auto& [name, rows] : report.breakdowns) {
    out += "\n[breakdown " + name + "]\nbin_lo,bin_hi,mean_si,count\n";
    for (const auto& row : rows) {
      out += format_f6(row.lo) + "," + format_f6(row.hi) + "," + opt_cell(row.mean_si) + "," +
             std::to_string(row.count) + "\n";
    }
  }
  return out;
}

void emit_report(const EvaluationReport& report, const std::string& path, ReportFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open report file: " + path);
  out << render_report(report, format);
  if (format == ReportFormat::kJson) out << '\n';
  if (!out) throw std::runtime_error("failed writing report file: " + path);
}

std::string render_pair_dump(const std::vector<PairOutcome>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    nlohmann::ordered_json j;
    j["seq"] = p.sequence_id;
    j["id"] = p.object_id;
    j["class"] = p.class_label;
    j["t1"] = p.t1;
    j["t2"] = p.t2;
    j["si"] = p.score.si;
    j["si_c"] = p.score.si_c;
    j["si_l"] = p.score.si_l;
    j["si_e"] = p.score.si_e;
    j["si_h"] = p.score.si_h;
    j["matched"] = p.matched;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_pair_dump(const std::vector<PairOutcome>& pairs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open pair dump file: " + path);
  out << render_pair_dump(pairs);
  if (!out) throw std::runtime_error("failed writing pair dump file: " + path);
}

}  // namespace stabidx
