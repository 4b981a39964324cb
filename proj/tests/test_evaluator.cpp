#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <fstream>

#include "stabidx/evaluator.hpp"
#include "stabidx/synthetic.hpp"
#include "test_support.hpp"

using namespace stabidx;
using test_support::TempDir;

namespace {

Dataset noisy_dataset(std::uint64_t seed = 5) {
  ScenarioSpec scenario;
  scenario.sequences = 4;
  scenario.frames_per_sequence = 16;
  scenario.objects_per_frame = 6;
  scenario.seed = seed;
  NoiseSpec noise;
  noise.center_sigma = 0.15;
  noise.extent_sigma = 0.03;
  noise.yaw_sigma = 0.02;
  noise.score_sigma = 0.08;
  noise.dropout = 0.05;
  noise.seed = seed + 1;
  return generate_dataset(scenario, noise);
}

/// Temporal mirror: t -> t_max - t per sequence, frames re-sorted.
Dataset reverse_dataset(const Dataset& ds) {
  Dataset out;
  out.class_set = ds.class_set;
  for (const auto& [seq_id, frames] : ds.sequences) {
    std::vector<FrameRecord> reversed = frames;
    const double t_max = frames.back().timestamp;
    for (auto& frame : reversed) frame.timestamp = t_max - frame.timestamp;
    std::sort(reversed.begin(), reversed.end(),
              [](const FrameRecord& a, const FrameRecord& b) {
                return a.timestamp < b.timestamp;
              });
    out.sequences[seq_id] = std::move(reversed);
  }
  return out;
}

Dataset scale_scores(const Dataset& ds, double k) {
  Dataset out = ds;
  for (auto& [seq_id, frames] : out.sequences) {
    (void)seq_id;
    for (auto& frame : frames) {
      for (auto& pred : frame.preds) pred.score *= k;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("calibrate uses linear-interpolation percentiles") {
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
  const CalibrationRange cal = calibrate(grid, 0.99, 0.01);
  CHECK(cal.c99 == doctest::Approx(0.99).epsilon(1e-12));
  CHECK(cal.c01 == doctest::Approx(0.01).epsilon(1e-12));

  const CalibrationRange two = calibrate({0.0, 1.0}, 0.99, 0.01);
  CHECK(two.c99 == doctest::Approx(0.99));
  CHECK(two.c01 == doctest::Approx(0.01));

  const CalibrationRange constant = calibrate({0.7, 0.7, 0.7}, 0.99, 0.01);
  CHECK(constant.c99 == 0.7);
  CHECK(constant.c01 == 0.7);

  const CalibrationRange empty = calibrate({}, 0.99, 0.01);
  CHECK(empty.c99 == 0.0);
  CHECK(empty.c01 == 0.0);

  CHECK_THROWS_AS(calibrate({0.5}, 0.01, 0.99), std::invalid_argument);
}

TEST_CASE("evaluate scores a noise-free dataset at exactly one") {
  ScenarioSpec scenario;
  scenario.sequences = 2;
  scenario.frames_per_sequence = 12;
  scenario.objects_per_frame = 6;
  const Dataset ds = generate_dataset(scenario, NoiseSpec{});
  const EvaluationReport report = evaluate(ds, EvaluationConfig{});
  REQUIRE(!report.classes.empty());
  for (const auto& [label, cr] : report.classes) {
    INFO(label);
    REQUIRE(cr.si.has_value());
    CHECK(*cr.si == 1.0);
    CHECK(*cr.si_c == 1.0);
    CHECK(*cr.si_l == 1.0);
    CHECK(*cr.si_e == 1.0);
    CHECK(*cr.si_h == 1.0);
    CHECK(cr.invalid_pairs == 0);
  }
}

TEST_CASE("evaluate zeroes the pair when the prediction is missing on one side") {
  Dataset ds;
  const Box3D box{10, 0, 0.75, 4, 2, 1.5, 0};
  FrameRecord f0;
  f0.sequence_id = "s";
  f0.frame_index = 0;
  f0.timestamp = 0.0;
  f0.gts.push_back({"obj", "vehicle", box, std::nullopt});
  f0.preds.push_back({"vehicle", 0.8, box});
  FrameRecord f1 = f0;
  f1.frame_index = 1;
  f1.timestamp = 0.5;
  f1.preds.clear();  // detector lost the object
  ds.sequences["s"] = {f0, f1};
  ds.class_set = {"vehicle"};

  EvaluationConfig cfg;
  cfg.frame_tolerance = 0.25;
  const EvaluationReport report = evaluate(ds, cfg);
  REQUIRE(report.classes.count("vehicle"));
  const ClassReport& cr = report.classes.at("vehicle");
  CHECK(cr.pairs == 1);
  CHECK(cr.invalid_pairs == 1);
  REQUIRE(cr.si.has_value());
  CHECK(*cr.si == 0.0);
  CHECK_FALSE(cr.si_c.has_value());  // no matched pairs to average
}

TEST_CASE("evaluate emits explicit empty markers for a dataset with zero pairs") {
  Dataset ds;
  FrameRecord f0;
  f0.sequence_id = "s";
  f0.frame_index = 0;
  f0.timestamp = 0.0;
  f0.gts.push_back({"obj", "vehicle", Box3D{0, 0, 0, 4, 2, 1.5, 0}, std::nullopt});
  ds.sequences["s"] = {f0};
  ds.class_set = {"vehicle"};

  const EvaluationReport report = evaluate(ds, EvaluationConfig{});
  REQUIRE(report.classes.count("vehicle"));
  CHECK(report.classes.at("vehicle").pairs == 0);
  CHECK_FALSE(report.classes.at("vehicle").si.has_value());

  const std::string json = render_report(report, ReportFormat::kJson);
  CHECK(json.find("\"si\":null") != std::string::npos);
}

TEST_CASE("evaluate is invariant to confidence scaling") {
  const Dataset ds = noisy_dataset();
  const EvaluationReport base = evaluate(ds, EvaluationConfig{});
  for (double k : {0.1, 0.5, 2.0, 10.0}) {
    const EvaluationReport scaled = evaluate(scale_scores(ds, k), EvaluationConfig{});
    for (const auto& [label, cr] : base.classes) {
      INFO(label, " k=", k);
      const ClassReport& sc = scaled.classes.at(label);
      REQUIRE(cr.si.has_value());
      CHECK(std::abs(*cr.si - *sc.si) < 1e-9);
      CHECK(std::abs(*cr.si_c - *sc.si_c) < 1e-9);
      CHECK(std::abs(*cr.si_l - *sc.si_l) < 1e-9);
      CHECK(std::abs(*cr.si_e - *sc.si_e) < 1e-9);
      CHECK(std::abs(*cr.si_h - *sc.si_h) < 1e-9);
    }
  }
}

TEST_CASE("evaluate is invariant under temporal reversal") {
  const Dataset ds = noisy_dataset(9);
  const EvaluationReport fwd = evaluate(ds, EvaluationConfig{});
  const EvaluationReport rev = evaluate(reverse_dataset(ds), EvaluationConfig{});
  REQUIRE(fwd.classes.size() == rev.classes.size());
  for (const auto& [label, cr] : fwd.classes) {
    const ClassReport& rc = rev.classes.at(label);
    CHECK(cr.pairs == rc.pairs);
    CHECK(cr.invalid_pairs == rc.invalid_pairs);
    REQUIRE(cr.si.has_value());
    CHECK(std::abs(*cr.si - *rc.si) <= 1e-12);
    if (cr.si_c) {
      CHECK(std::abs(*cr.si_c - *rc.si_c) <= 1e-12);
      CHECK(std::abs(*cr.si_l - *rc.si_l) <= 1e-12);
      CHECK(std::abs(*cr.si_e - *rc.si_e) <= 1e-12);
      CHECK(std::abs(*cr.si_h - *rc.si_h) <= 1e-12);
    }
  }
}

TEST_CASE("evaluate is byte-deterministic across thread counts") {
  const Dataset ds = noisy_dataset(13);
  std::vector<PairOutcome> dump1, dump4;
  const EvaluationReport r1 = evaluate(ds, EvaluationConfig{}, 1, &dump1);
  const EvaluationReport r4 = evaluate(ds, EvaluationConfig{}, 4, &dump4);
  CHECK(render_report(r1, ReportFormat::kJson) == render_report(r4, ReportFormat::kJson));
  CHECK(render_report(r1, ReportFormat::kCsv) == render_report(r4, ReportFormat::kCsv));
  CHECK(render_pair_dump(dump1) == render_pair_dump(dump4));
}

TEST_CASE("per-class SI equals the mean of the dumped per-pair scores") {
  const Dataset ds = noisy_dataset(17);
  std::vector<PairOutcome> dump;
  const EvaluationReport report = evaluate(ds, EvaluationConfig{}, 2, &dump);
  std::map<std::string, std::vector<double>> per_class;
  for (const auto& p : dump) per_class[p.class_label].push_back(p.score.si);
  for (const auto& [label, values] : per_class) {
    double acc = 0.0;
    for (double v : values) acc += v;
    const double mean = acc / static_cast<double>(values.size());
    CHECK(std::abs(*report.classes.at(label).si - mean) < 1e-12);
  }
}

TEST_CASE("evaluate honors the class filter") {
  const Dataset ds = noisy_dataset(19);
  EvaluationConfig cfg;
  cfg.classes = {"vehicle"};
  const EvaluationReport report = evaluate(ds, cfg);
  CHECK(report.classes.size() == 1);
  CHECK(report.classes.count("vehicle") == 1);
}

TEST_CASE("breakdown buckets by half-open bins with overflow rows") {
  std::vector<PairOutcome> pairs(5);
  pairs[0].distance = -1.0;  // underflow
  pairs[1].distance = 0.0;   // [0, 10)
  pairs[2].distance = 10.0;  // [10, 20): edge values open the next bin
  pairs[3].distance = 15.0;
  pairs[4].distance = 99.0;  // overflow
  for (std::size_t i = 0; i < pairs.size(); ++i) pairs[i].score.si = 0.5;

  const auto rows = breakdown(pairs, PairProperty::kDistance, {0, 10, 20});
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].count == 1);
  CHECK(rows[1].count == 1);
  CHECK(rows[2].count == 2);
  CHECK(rows[3].count == 1);
  CHECK(*rows[2].mean_si == doctest::Approx(0.5));
  CHECK_FALSE(std::isfinite(rows[0].lo));
  CHECK_FALSE(std::isfinite(rows[3].hi));

  // All values in one bin: its mean is the overall mean.
  const auto single = breakdown(pairs, PairProperty::kDistance, {-10, 1000});
  REQUIRE(single.size() == 3);
  CHECK(single[1].count == 5);
  CHECK(*single[1].mean_si == doctest::Approx(0.5));
}

TEST_CASE("breakdown routes LWR and unknown point counts correctly") {
  std::vector<PairOutcome> pairs(2);
  pairs[0].lwr = 4.0 / 2.0;  // box (4, 2): ratio 2 lands in [2, 3)
  pairs[0].score.si = 1.0;
  pairs[1].lwr = 0.5;
  pairs[1].score.si = 0.0;
  const auto rows = breakdown(pairs, PairProperty::kLwr, {0, 1, 2, 3, 4, 5});
  REQUIRE(rows.size() == 7);
  CHECK(rows[3].count == 1);  // [2, 3)
  CHECK(*rows[3].mean_si == 1.0);
  CHECK(rows[1].count == 1);  // [0, 1)

  pairs[0].num_points = 30;
  pairs[1].num_points.reset();
  const auto points = breakdown(pairs, PairProperty::kPoints, {1, 5, 25, 125, 625});
  REQUIRE(points.size() == 7);  // under, 4 bins, over, unknown
  CHECK(points.back().count == 1);
  CHECK(std::isnan(points.back().lo));
  CHECK(points[3].count == 1);  // [25, 125)
}

TEST_CASE("emit_report writes byte-identical files for identical reports") {
  const Dataset ds = noisy_dataset(23);
  const EvaluationReport report = evaluate(ds, EvaluationConfig{});
  TempDir tmp;
  emit_report(report, tmp.file("a.json"), ReportFormat::kJson);
  emit_report(report, tmp.file("b.json"), ReportFormat::kJson);
  CHECK(test_support::read_file(tmp.file("a.json")) ==
        test_support::read_file(tmp.file("b.json")));

  emit_report(report, tmp.file("a.csv"), ReportFormat::kCsv);
  const std::string csv = test_support::read_file(tmp.file("a.csv"));
  CHECK(csv.find("bin_lo,bin_hi,mean_si,count") != std::string::npos);
  CHECK(csv.find("[breakdown distance]") != std::string::npos);

  CHECK_THROWS_AS(emit_report(report, "/nonexistent/dir/report.json", ReportFormat::kJson),
                  std::runtime_error);
}

TEST_CASE("digest_dataset fingerprints content") {
  const Dataset a = noisy_dataset(29);
  const Dataset b = noisy_dataset(29);
  Dataset c = noisy_dataset(29);
  c.sequences.begin()->second[0].preds[0].score += 1e-9;

  CHECK(digest_dataset(a).content_hash == digest_dataset(b).content_hash);
  CHECK(digest_dataset(a).content_hash != digest_dataset(c).content_hash);
  CHECK(digest_dataset(a).gts == digest_dataset(b).gts);
}
