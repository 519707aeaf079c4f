// Fast engine (one thread, OpenMP default) against the serial reference.

#include "mdl/loss_engine.hpp"
#include "mdl/scenarios.hpp"

#include <benchmark/benchmark.h>

namespace {

const mdl::ParamClass& bench_class() {
  static const mdl::ParamClass cls = mdl::qbstar_class(8, mdl::Dyadic::parse("3/16"));
  return cls;
}

mdl::Predictor predictor_of(const benchmark::State& state) {
  return state.range(1) == 0 ? mdl::Predictor::mdl : mdl::Predictor::bayes;
}

void BM_engine(benchmark::State& state, int threads) {
  mdl::EngineOptions opts;
  opts.window = mdl::WindowPolicy::full;
  opts.threads = threads;
  for (auto _ : state) {
    auto curve = mdl::cumulative_loss(bench_class(), predictor_of(state), static_cast<std::uint64_t>(state.range(0)), opts);
    benchmark::DoNotOptimize(curve.points.data());
  }
}

void BM_reference(benchmark::State& state) {
  mdl::EngineOptions opts;
  opts.window = mdl::WindowPolicy::full;
  for (auto _ : state) {
    auto curve = mdl::cumulative_loss_reference(bench_class(), predictor_of(state),
                                                static_cast<std::uint64_t>(state.range(0)), opts);
    benchmark::DoNotOptimize(curve.points.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_engine, serial, 1)->ArgsProduct({{500, 2000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_engine, openmp, 0)->ArgsProduct({{500, 2000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_reference)->ArgsProduct({{500, 2000}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
