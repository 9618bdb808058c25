#include <benchmark/benchmark.h>

#include <random>

#include "resmot/heatmap.hpp"
#include "resmot/hungarian.hpp"
#include "resmot/partition.hpp"
#include "resmot/pipeline.hpp"
#include "resmot/scene.hpp"
#include "resmot/selector.hpp"
#include "resmot/tracker.hpp"
#include "resmot/wire.hpp"

using namespace resmot;

namespace {

const std::vector<Resolution>& ladder() {
  static const auto l = default_ladder();
  return l;
}

const std::vector<Frame>& scene_frames() {
  static const auto frames =
      frames_from_gt(generate_scene(mixed_scene(ladder(), 200, 25)), ladder().back(), "bench");
  return frames;
}

void BM_Hungarian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  CostMatrix m(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) m(r, c) = u(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(hungarian(m));
}
BENCHMARK(BM_Hungarian)->Arg(8)->Arg(32)->Arg(128);

void BM_RenderHeatmap(benchmark::State& state) {
  std::vector<BoundingBox> boxes;
  for (const auto& o : scene_frames()[10].objects) boxes.push_back(o.box);
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_gt_heatmap(boxes, ladder().back(), ladder().back()));
  }
}
BENCHMARK(BM_RenderHeatmap);

void BM_SelectResolution(benchmark::State& state) {
  const SyntheticDetector det({}, ladder());
  const auto stack = det.predict_stack(scene_frames()[80]);
  const auto policy = ResolutionPolicy::preset("C2");
  for (auto _ : state) benchmark::DoNotOptimize(select_resolution(stack, policy));
}
BENCHMARK(BM_SelectResolution);

void BM_PredictStack(benchmark::State& state) {
  const SyntheticDetector det({}, ladder());
  for (auto _ : state) benchmark::DoNotOptimize(det.predict_stack(scene_frames()[80]));
}
BENCHMARK(BM_PredictStack);

void BM_TrackerStep(benchmark::State& state) {
  const SyntheticDetector det({}, ladder());
  std::vector<std::vector<Detection>> dets;
  for (const auto& f : scene_frames()) dets.push_back(det.detect(f, ladder().back()));
  for (auto _ : state) {
    Tracker tracker{AssociationConfig{}};
    for (std::size_t i = 0; i < dets.size(); ++i) {
      benchmark::DoNotOptimize(tracker.step(dets[i], static_cast<int>(i) + 1));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(dets.size()));
}
BENCHMARK(BM_TrackerStep);

void BM_CodecRoundTrip(benchmark::State& state) {
  const wire::Codec codec;
  wire::DetectionResult msg;
  msg.frame_index = 7;
  for (int i = 0; i < 20; ++i) {
    wire::WireDetection d{100.0f + i, 200.0f, 30.0f, 80.0f, 0.9f, {}};
    d.embedding.assign(kDefaultEmbeddingDim, 0.1f);
    msg.detections.push_back(d);
  }
  const wire::Message m = msg;
  for (auto _ : state) benchmark::DoNotOptimize(codec.decode(codec.encode(m)));
}
BENCHMARK(BM_CodecRoundTrip);

void BM_Simulate(benchmark::State& state) {
  const SyntheticDetector det({}, ladder());
  const SimulationInputs in{scene_frames(),
                            ResolutionPolicy::preset("C2", 5),
                            {&det, &det},
                            LinkModel{},
                            ComputeModel::defaults(ladder()),
                            FrameBytesModel::defaults(ladder()),
                            AssociationConfig{}};
  const auto arch = static_cast<Architecture>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(arch, in));
  state.SetLabel(to_string(arch));
}
BENCHMARK(BM_Simulate)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
