// Parallel kernels against their serial references. Worker counts are
// the benchmark argument; the serial variants take none.

#include "spdlab/batch.hpp"
#include "spdlab/pipeline.hpp"

#include <benchmark/benchmark.h>

using namespace spdlab;

namespace {

ExperimentConfig femur_config(std::size_t n) {
  ExperimentConfig cfg;
  cfg.mesh.preset.kind = "femur_like_2d";
  cfg.model = scenario_model("ortho-ortho-dir", 2);
  cfg.n_samples = n;
  cfg.seed = 1;
  return cfg;
}

const TensorModel& model_3d() {
  static const TensorModel m = build_model(scenario_model("ortho-ortho-dir", 3));
  return m;
}

SymMat log_reference() {
  return spd_log(reference_spectrum(scenario_model("ortho-ortho-dir", 2)).reconstruct());
}

constexpr std::size_t kMcSamples = 1000;
constexpr std::size_t kDraws = 100'000;

void BM_run_mc(benchmark::State& state) {
  const ExperimentConfig cfg = femur_config(kMcSamples);
  for (auto _ : state) benchmark::DoNotOptimize(run_mc(cfg, static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * kMcSamples);
}

void BM_run_mc_serial(benchmark::State& state) {
  const ExperimentConfig cfg = femur_config(kMcSamples);
  for (auto _ : state) benchmark::DoNotOptimize(run_mc_serial(cfg));
  state.SetItemsProcessed(state.iterations() * kMcSamples);
}

void BM_sample_spectra(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_spectra(model_3d(), 7, kDraws, static_cast<int>(state.range(0))));
  }
  state.SetItemsProcessed(state.iterations() * kDraws);
}

void BM_sample_spectra_serial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sample_spectra_serial(model_3d(), 7, kDraws));
  state.SetItemsProcessed(state.iterations() * kDraws);
}

void BM_rotated_mean(benchmark::State& state) {
  const SymMat h = log_reference();
  const OrientationModel o = OrientationModel::planar(0.0, 75.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rotated_mean(h, o, 3, kDraws, static_cast<int>(state.range(0))));
  }
  state.SetItemsProcessed(state.iterations() * kDraws);
}

void BM_rotated_mean_serial(benchmark::State& state) {
  const SymMat h = log_reference();
  const OrientationModel o = OrientationModel::planar(0.0, 75.0);
  for (auto _ : state) benchmark::DoNotOptimize(rotated_mean_serial(h, o, 3, kDraws));
  state.SetItemsProcessed(state.iterations() * kDraws);
}

}  // namespace

BENCHMARK(BM_run_mc)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_run_mc_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_sample_spectra)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_sample_spectra_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_rotated_mean)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_rotated_mean_serial)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
