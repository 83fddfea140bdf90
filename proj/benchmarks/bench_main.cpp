#include <benchmark/benchmark.h>

#include <numeric>

#include "driveclone/geometry.hpp"
#include "driveclone/models/gradcheck.hpp"
#include "driveclone/models/training.hpp"
#include "driveclone/pipeline.hpp"
#include "driveclone/synthgen.hpp"

using namespace driveclone;

namespace {

struct Fixture {
  std::unique_ptr<models::Model> model;
  models::WindowBatch batch;
};

Fixture make_fixture(models::Architecture arch, std::size_t hidden, std::size_t batch) {
  auto spec = models::ArchitectureSpec::for_variant(arch, 16);
  spec.hidden = hidden;
  models::TinyModelConfig tiny;
  tiny.hidden = hidden;
  tiny.history = spec.history_len;
  tiny.horizon = spec.horizon_len;
  tiny.embedding_dim = 16;
  tiny.batch = batch;
  const auto windows = models::random_windows(tiny);
  std::vector<std::size_t> idx(windows.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const auto views = spec.views();
  Fixture f{models::build_model(spec, 1), models::WindowBatch::gather(windows, idx, views, 16)};
  return f;
}

void BM_Forward(benchmark::State& state, models::Architecture arch) {
  auto f = make_fixture(arch, static_cast<std::size_t>(state.range(0)), 32);
  auto& model = dynamic_cast<models::DifferentiableModel&>(*f.model);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(f.batch));
  state.SetItemsProcessed(state.iterations() * 32);
}

void BM_ForwardBackward(benchmark::State& state, models::Architecture arch) {
  auto f = make_fixture(arch, static_cast<std::size_t>(state.range(0)), 32);
  auto& model = dynamic_cast<models::DifferentiableModel&>(*f.model);
  std::vector<nn::Tensor> grads;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.loss_and_gradients(f.batch, nn::LossKind::mse, grads));
  }
  state.SetItemsProcessed(state.iterations() * 32);
}

BENCHMARK_CAPTURE(BM_Forward, lstm_12, models::Architecture::lstm_12)->Arg(32)->Arg(128);
BENCHMARK_CAPTURE(BM_Forward, lstm_all, models::Architecture::lstm_all)->Arg(32)->Arg(128);
BENCHMARK_CAPTURE(BM_ForwardBackward, lstm_12, models::Architecture::lstm_12)->Arg(32)->Arg(128);
BENCHMARK_CAPTURE(BM_ForwardBackward, lstm_front, models::Architecture::lstm_front)->Arg(32);
BENCHMARK_CAPTURE(BM_ForwardBackward, lstm_all, models::Architecture::lstm_all)->Arg(32);

void BM_DetectFront(benchmark::State& state) {
  synthgen::ScenarioConfig cfg;
  cfg.seed = 3;
  const auto seg = synthgen::generate_segment(cfg).segment;
  Frame frame = seg.frames[50];
  // Pad the scene with clutter off the corridor.
  for (int k = 0; k < state.range(0); ++k) {
    TrackedObject o = frame.labels.front();
    o.obj_id = "clutter-" + std::to_string(k);
    o.center_v = {5.0 * k, (k % 2 ? 6.0 : -6.0), 0.0};
    frame.labels.push_back(o);
  }
  const geometry::DetectionConfig det;
  for (auto _ : state) benchmark::DoNotOptimize(geometry::detect_front_vehicle(frame, det));
}
BENCHMARK(BM_DetectFront)->Arg(0)->Arg(50);

void BM_BuildWindows(benchmark::State& state) {
  const auto segs = synthgen::generate_segments(4, 9);
  std::vector<Segment> raw;
  for (const auto& g : segs) raw.push_back(g.segment);
  const pipeline::PipelineConfig pc;
  for (auto _ : state) benchmark::DoNotOptimize(pipeline::build_dataset(raw, pc));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(raw.size()));
}
BENCHMARK(BM_BuildWindows);

}  // namespace
BENCHMARK_MAIN();
