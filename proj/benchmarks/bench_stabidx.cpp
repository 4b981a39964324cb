#include <benchmark/benchmark.h>

#include <vector>

#include "stabidx/association.hpp"
#include "stabidx/evaluator.hpp"
#include "stabidx/geometry.hpp"
#include "stabidx/rng.hpp"
#include "stabidx/stability.hpp"
#include "stabidx/synthetic.hpp"

namespace {

using namespace stabidx;

Box3D bench_box(Rng& rng) {
  Box3D b;
  b.x = rng.uniform(-30, 30);
  b.y = rng.uniform(-30, 30);
  b.z = rng.uniform(-1, 1);
  b.l = rng.uniform(1, 6);
  b.w = rng.uniform(0.8, 2.5);
  b.h = rng.uniform(1, 3);
  b.yaw = rng.uniform(-kPi, kPi);
  return b;
}

void BM_IouRotated(benchmark::State& state) {
  Rng rng(1);
  std::vector<std::pair<Box3D, Box3D>> pairs;
  for (int i = 0; i < 256; ++i) {
    Box3D a = bench_box(rng);
    Box3D b = a;
    b.x += rng.uniform(-2, 2);
    b.y += rng.uniform(-2, 2);
    b.yaw += rng.uniform(-0.5, 0.5);
    pairs.emplace_back(a, b);
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [a, b] = pairs[i++ & 255];
    benchmark::DoNotOptimize(iou_rotated(a, b));
  }
}
BENCHMARK(BM_IouRotated);

void BM_IouOracle(benchmark::State& state) {
  const Box3D a{0, 0, 0, 4, 2, 1.5, 0.2};
  Box3D b = a;
  b.x += 0.7;
  b.yaw += 0.2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(iou_oracle(a, b, state.range(0), 17));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IouOracle)->Arg(10000)->Arg(100000);

void BM_StabilityIndex(benchmark::State& state) {
  Rng rng(2);
  const CalibrationRange cal{0.9, 0.1};
  std::vector<std::pair<MatchedObservation, MatchedObservation>> pairs;
  for (int i = 0; i < 256; ++i) {
    const Box3D gt1 = bench_box(rng);
    Box3D gt2 = gt1;
    gt2.x += rng.uniform(-2, 2);
    Box3D p1 = gt1;
    p1.x += rng.uniform(-0.3, 0.3);
    p1.yaw += rng.uniform(-0.1, 0.1);
    Box3D p2 = gt2;
    p2.x += rng.uniform(-0.3, 0.3);
    pairs.push_back({MatchedObservation{gt1, ScoredBox{p1, 0.8}},
                     MatchedObservation{gt2, ScoredBox{p2, 0.75}}});
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [o1, o2] = pairs[i++ & 255];
    benchmark::DoNotOptimize(stability_index(o1, o2, cal));
  }
}
BENCHMARK(BM_StabilityIndex);

void BM_MatchFrame(benchmark::State& state) {
  const int objects = static_cast<int>(state.range(0));
  Rng rng(3);
  std::vector<GroundTruthObject> gts;
  std::vector<Prediction> preds;
  for (int i = 0; i < objects; ++i) {
    GroundTruthObject gt;
    gt.object_id = "o" + std::to_string(i);
    gt.class_label = i % 3 == 0 ? "pedestrian" : "vehicle";
    gt.box = bench_box(rng);
    Prediction p;
    p.class_label = gt.class_label;
    p.score = rng.uniform(0.3, 0.95);
    p.box = gt.box;
    p.box.x += rng.uniform(-0.4, 0.4);
    p.box.y += rng.uniform(-0.4, 0.4);
    gts.push_back(std::move(gt));
    preds.push_back(std::move(p));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(match_frame_indices(gts, preds, 1e-6));
  }
  state.SetItemsProcessed(state.iterations() * objects);
}
BENCHMARK(BM_MatchFrame)->Arg(10)->Arg(50)->Arg(100);

void BM_Evaluate(benchmark::State& state) {
  ScenarioSpec scenario;
  scenario.sequences = 4;
  scenario.frames_per_sequence = 50;
  scenario.objects_per_frame = static_cast<int>(state.range(0));
  NoiseSpec noise;
  noise.center_sigma = 0.15;
  noise.score_sigma = 0.05;
  noise.dropout = 0.03;
  const Dataset ds = generate_dataset(scenario, noise);
  const auto boxes = digest_dataset(ds).gts;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(ds, EvaluationConfig{}, static_cast<int>(state.range(1))));
  }
  state.SetItemsProcessed(state.iterations() * boxes);
}
BENCHMARK(BM_Evaluate)->Args({20, 1})->Args({20, 2})->Args({50, 2});

}  // namespace

BENCHMARK_MAIN();
