#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stabidx/association.hpp"
#include "stabidx/dataset.hpp"

namespace stabidx {

struct EvaluationConfig {
  double delta_t = 0.5;   // seconds between the two observations of a pair
  double min_iou = 1e-6;  // any positive overlap qualifies by default
  std::vector<std::string> classes;  // empty evaluates every class present
  double percentile_hi = 0.99;
  double percentile_lo = 0.01;
  double frame_tolerance = 0.0;  // <= 0 selects half the median capture interval
  std::vector<double> distance_bins{0, 10, 20, 30, 40, 50, 60, 70, 80};
  std::vector<double> points_bins{1, 5, 25, 125, 625};
  std::vector<double> volume_bins{0, 10, 20, 30, 40, 50};
  std::vector<double> lwr_bins{0, 1, 2, 3, 4, 5};
};

/// Linear-interpolation percentiles of an ascending confidence list. An empty
/// list yields the degenerate range (0, 0).
CalibrationRange calibrate(const std::vector<double>& sorted_confidences, double hi, double lo);

struct ClassReport {
  std::optional<double> si;  // empty when the class has no pairs
  // Sub-indicator means cover pairs matched on both sides only; empty when
  // there are none.
  std::optional<double> si_c, si_l, si_e, si_h;
  std::int64_t pairs = 0;
  std::int64_t invalid_pairs = 0;  // pairs missing a matched prediction
};

struct BreakdownRow {
  // [lo, hi); +-infinity marks the overflow rows, both NaN the bin for pairs
  // lacking the property (unknown point counts).
  double lo = 0.0;
  double hi = 0.0;
  std::optional<double> mean_si;
  std::int64_t count = 0;
};

struct DatasetDigest {
  std::int64_t sequences = 0;
  std::int64_t frames = 0;
  std::int64_t gts = 0;
  std::int64_t preds = 0;
  std::vector<std::string> classes;
  std::uint64_t content_hash = 0;  // FNV-1a over the canonical content
};

DatasetDigest digest_dataset(const Dataset& ds);

/// One scored pair plus the first observation's GT properties used by the
/// breakdown tables.
struct PairOutcome {
  std::string sequence_id;
  std::string object_id;
  std::string class_label;
  double t1 = 0.0;
  double t2 = 0.0;
  StabilityScore score;
  bool matched = false;  // both sides carried a matched prediction
  double distance = 0.0;
  double volume = 0.0;
  double lwr = 0.0;
  std::optional<std::int64_t> num_points;
};

struct EvaluationReport {
  EvaluationConfig config;
  DatasetDigest digest;
  std::map<std::string, ClassReport> classes;
  std::map<std::string, std::vector<BreakdownRow>> breakdowns;  // distance, points, volume, lwr
};

/// Two passes: match every frame and calibrate per-class confidences, then
/// enumerate pairs and score them. Deterministic for fixed inputs regardless
/// of `threads`; `pair_dump`, when given, receives every scored pair in
/// sequence order.
EvaluationReport evaluate(const Dataset& ds, const EvaluationConfig& cfg, int threads = 1,
                          std::vector<PairOutcome>* pair_dump = nullptr);

enum class PairProperty { kDistance, kPoints, kVolume, kLwr };

/// Buckets pairs by a property of the first observation's GT. Values outside
/// the edges land in overflow rows; pairs lacking the property land in a
/// trailing unknown row (point counts only).
std::vector<BreakdownRow> breakdown(const std::vector<PairOutcome>& pairs, PairProperty property,
                                    const std::vector<double>& edges);

enum class ReportFormat { kJson, kCsv };

/// Stable field ordering, floats at 6 decimal places; identical reports
/// render byte-identically.
std::string render_report(const EvaluationReport& report, ReportFormat format);
void emit_report(const EvaluationReport& report, const std::string& path, ReportFormat format);

/// Line-delimited full-precision dump, one scored pair per line.
std::string render_pair_dump(const std::vector<PairOutcome>& pairs);
void write_pair_dump(const std::vector<PairOutcome>& pairs, const std::string& path);

}  // namespace stabidx
