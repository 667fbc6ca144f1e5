#include <benchmark/benchmark.h>

#include "specseg/forecasting.hpp"
#include "specseg/segmentation.hpp"
#include "specseg/simgen.hpp"
#include "specseg/spectral.hpp"

namespace {

using namespace specseg;

void BM_SmoothSpectral(benchmark::State& state) {
  const auto length = static_cast<Eigen::Index>(state.range(0));
  const auto draw = build_model(ModelPreset::Model1, length, 1);
  const auto series = demean(draw.x);
  const KernelSpec kernel;
  for (auto _ : state) benchmark::DoNotOptimize(smooth_spectral(series, kernel));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SmoothSpectral)->RangeMultiplier(2)->Range(256, 4096)->Complexity();

void BM_Segment(benchmark::State& state) {
  const auto preset = model_preset(static_cast<int>(state.range(0)));
  const auto draw = build_model(preset, static_cast<Eigen::Index>(state.range(1)), 2);
  const SegmentConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(segment(draw.x, config));
}
BENCHMARK(BM_Segment)->ArgsProduct({{1, 5}, {500, 2000}})->Unit(benchmark::kMillisecond);

void BM_ForecastPipeline(benchmark::State& state) {
  const auto draw = build_model(ModelPreset::Model1, 500, 3);
  const ForecastConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(forecast_pipeline(draw.x, 2, config));
}
BENCHMARK(BM_ForecastPipeline)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
