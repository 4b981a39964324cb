#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>

#include "stabidx/association.hpp"
#include "stabidx/geometry.hpp"
#include "stabidx/hungarian.hpp"
#include "stabidx/rng.hpp"
#include "test_support.hpp"

using namespace stabidx;
using test_support::near_box;
using test_support::random_box;

namespace {

GroundTruthObject make_gt(const std::string& id, const std::string& label, const Box3D& box) {
  GroundTruthObject gt;
  gt.object_id = id;
  gt.class_label = label;
  gt.box = box;
  return gt;
}

Prediction make_pred(const std::string& label, double score, const Box3D& box) {
  return {label, score, box};
}

// A single-object sequence of `n` frames at interval d, with a prediction on
// every frame unless its index appears in `missing`.
std::vector<FrameRecord> single_track(int n, double d, const std::set<int>& missing = {}) {
  std::vector<FrameRecord> frames;
  for (int i = 0; i < n; ++i) {
    FrameRecord f;
    f.sequence_id = "seq";
    f.frame_index = i;
    f.timestamp = i * d;
    const Box3D box{1.0 * i, 0, 0, 4, 2, 1.5, 0};
    f.gts.push_back(make_gt("obj", "vehicle", box));
    if (!missing.count(i)) f.preds.push_back(make_pred("vehicle", 0.8, box));
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace

TEST_CASE("match_frame pairs an overlapping prediction") {
  const Box3D box{0, 0, 0, 4, 2, 1.5, 0.1};
  const auto gts = std::vector<GroundTruthObject>{make_gt("a", "vehicle", box)};
  Box3D shifted = box;
  shifted.x += 0.4;
  const auto preds = std::vector<Prediction>{make_pred("vehicle", 0.9, shifted)};

  const FrameMatches matches = match_frame(gts, preds, 1e-6);
  REQUIRE(matches.count("a"));
  REQUIRE(matches.at("a").has_value());
  CHECK(matches.at("a")->score == doctest::Approx(0.9));
}

TEST_CASE("match_frame leaves objects unmatched without predictions") {
  const Box3D box{0, 0, 0, 4, 2, 1.5, 0};
  const auto gts = std::vector<GroundTruthObject>{make_gt("a", "vehicle", box)};
  const FrameMatches matches = match_frame(gts, {}, 1e-6);
  REQUIRE(matches.count("a"));
  CHECK_FALSE(matches.at("a").has_value());

  CHECK(match_frame({}, {}, 1e-6).empty());
}

TEST_CASE("match_frame is class-restricted") {
  const Box3D box{0, 0, 0, 4, 2, 1.5, 0};
  const auto gts = std::vector<GroundTruthObject>{make_gt("a", "vehicle", box)};
  const auto preds = std::vector<Prediction>{make_pred("pedestrian", 0.9, box)};
  const FrameMatches matches = match_frame(gts, preds, 1e-6);
  CHECK_FALSE(matches.at("a").has_value());
}

TEST_CASE("match_frame discards assignments below min_iou") {
  const Box3D box{0, 0, 0, 4, 2, 1.5, 0};
  Box3D barely = box;
  barely.x = 3.9;  // sliver of overlap
  const auto gts = std::vector<GroundTruthObject>{make_gt("a", "vehicle", box)};
  const auto preds = std::vector<Prediction>{make_pred("vehicle", 0.9, barely)};
  CHECK(match_frame(gts, preds, 1e-6).at("a").has_value());
  CHECK_FALSE(match_frame(gts, preds, 0.5).at("a").has_value());
}

TEST_CASE("match_frame resolves crossing candidates to the optimal assignment") {
  // Prediction 0 overlaps both GTs, better with GT b; greedy on GT a would
  // steal it and beach prediction 1.
  const Box3D gt_a{0, 0, 0, 4, 2, 1.5, 0};
  const Box3D gt_b{3, 0, 0, 4, 2, 1.5, 0};
  Box3D pred0 = gt_b;
  pred0.x = 2.0;  // overlaps a a bit, b more
  Box3D pred1 = gt_a;
  pred1.x = 0.5;  // overlaps a well, b barely
  const auto gts = std::vector<GroundTruthObject>{make_gt("a", "vehicle", gt_a),
                                                  make_gt("b", "vehicle", gt_b)};
  const auto preds =
      std::vector<Prediction>{make_pred("vehicle", 0.6, pred0), make_pred("vehicle", 0.7, pred1)};

  const std::vector<int> assignment = match_frame_indices(gts, preds, 1e-6);
  CHECK(assignment == std::vector<int>{1, 0});
}

TEST_CASE("match_frame total cost equals the brute-force optimum") {
  Rng rng(61);
  for (int trial = 0; trial < 60; ++trial) {
    const int n_gts = static_cast<int>(rng.uniform_int(1, 5));
    const int n_preds = static_cast<int>(rng.uniform_int(1, 5));
    std::vector<GroundTruthObject> gts;
    std::vector<Prediction> preds;
    const Box3D anchor = random_box(rng, 10.0);
    for (int i = 0; i < n_gts; ++i) {
      gts.push_back(make_gt("g" + std::to_string(i), "vehicle", near_box(anchor, rng)));
    }
    for (int j = 0; j < n_preds; ++j) {
      preds.push_back(make_pred("vehicle", 0.5, near_box(anchor, rng)));
    }

    std::vector<double> cost(static_cast<std::size_t>(n_gts) * n_preds);
    for (int i = 0; i < n_gts; ++i) {
      for (int j = 0; j < n_preds; ++j) {
        cost[static_cast<std::size_t>(i) * n_preds + j] =
            1.0 - iou_rotated(gts[i].box, preds[j].box);
      }
    }
    const double best = test_support::brute_force_assignment_cost(cost, n_gts, n_preds);

    const std::vector<int> assignment = match_frame_indices(gts, preds, 0.0);
    double total = 0.0;
    int assigned = 0;
    std::set<int> used;
    for (int i = 0; i < n_gts; ++i) {
      if (assignment[i] < 0) continue;
      total += cost[static_cast<std::size_t>(i) * n_preds + assignment[i]];
      ++assigned;
      CHECK(used.insert(assignment[i]).second);
    }
    CHECK(assigned == std::min(n_gts, n_preds));
    CHECK(total == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("enumerate_pairs yields N - dt/d pairs on a gap-free track") {
  const auto frames = single_track(10, 0.1);
  const auto pairs = enumerate_pairs(frames, 0.5);
  CHECK(pairs.size() == 5);
  for (const auto& p : pairs) {
    CHECK(p.t2 - p.t1 == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(p.obs1.present());
    CHECK(p.obs2.present());
    CHECK(p.object_id == "obj");
  }
}

TEST_CASE("enumerate_pairs skips single-frame objects") {
  auto frames = single_track(10, 0.1);
  FrameRecord& mid = frames[3];
  mid.gts.push_back(make_gt("loner", "vehicle", Box3D{50, 50, 0, 4, 2, 1.5, 0}));
  const auto pairs = enumerate_pairs(frames, 0.5);
  CHECK(pairs.size() == 5);
  for (const auto& p : pairs) CHECK(p.object_id == "obj");
}

TEST_CASE("enumerate_pairs emits unmatched observations") {
  const auto frames = single_track(10, 0.1, {5});
  const auto pairs = enumerate_pairs(frames, 0.5);
  REQUIRE(pairs.size() == 5);
  int missing = 0;
  for (const auto& p : pairs) {
    if (!p.obs1.present() || !p.obs2.present()) ++missing;
  }
  CHECK(missing == 1);  // frame 5 is the target of the (0.0 s, 0.5 s) pair
}

TEST_CASE("enumerate_pairs validates its input") {
  auto frames = single_track(4, 0.1);
  frames[2].timestamp = frames[1].timestamp;
  CHECK_THROWS_WITH_AS(enumerate_pairs(frames, 0.5), doctest::Contains("duplicate timestamp"),
                       std::runtime_error);

  frames = single_track(4, 0.1);
  std::swap(frames[1], frames[2]);
  CHECK_THROWS_AS(enumerate_pairs(frames, 0.5), std::runtime_error);

  frames = single_track(4, 0.1);
  frames[1].gts.push_back(frames[1].gts[0]);
  CHECK_THROWS_WITH_AS(enumerate_pairs(frames, 0.5), doctest::Contains("duplicate object id"),
                       std::runtime_error);

  frames = single_track(10, 0.1);
  frames[6].gts[0].class_label = "pedestrian";
  CHECK_THROWS_WITH_AS(enumerate_pairs(frames, 0.5), doctest::Contains("changes class"),
                       std::runtime_error);

  CHECK_THROWS_AS(enumerate_pairs(single_track(4, 0.1), 0.0), std::invalid_argument);
}

TEST_CASE("enumerate_pairs tolerates dropped frames via the time window") {
  auto frames = single_track(10, 0.1);
  frames.erase(frames.begin() + 3);  // drop t=0.3
  const auto pairs = enumerate_pairs(frames, 0.5);
  // Pairs (0,5),(1,6),(2,7),(4,9) by original indexing still pair up; t=0.3
  // is gone both as source and target.
  CHECK(pairs.size() == 4);
}

TEST_CASE("enumerate_pairs is independent of pre-sort input order") {
  auto frames = single_track(10, 0.1, {2, 7});
  auto shuffled = frames;
  Rng rng(71);
  for (std::size_t i = shuffled.size(); i > 1; --i) {
    std::swap(shuffled[i - 1], shuffled[static_cast<std::size_t>(rng.uniform_int(0, i - 1))]);
  }
  std::sort(shuffled.begin(), shuffled.end(),
            [](const FrameRecord& a, const FrameRecord& b) { return a.timestamp < b.timestamp; });

  const auto a = enumerate_pairs(frames, 0.5);
  const auto b = enumerate_pairs(shuffled, 0.5);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].object_id == b[i].object_id);
    CHECK(a[i].t1 == b[i].t1);
    CHECK(a[i].t2 == b[i].t2);
    CHECK(a[i].obs1.present() == b[i].obs1.present());
  }
}

TEST_CASE("median_interval is robust to a dropped frame") {
  auto frames = single_track(10, 0.1);
  frames.erase(frames.begin() + 4);
  CHECK(median_interval(frames) == doctest::Approx(0.1));
  CHECK(median_interval({}) == 0.0);
}
