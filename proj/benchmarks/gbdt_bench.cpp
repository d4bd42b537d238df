#include "bench_data.hpp"

#include "eventflow/forest.hpp"
#include "eventflow/gbdt.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace eventflow;

void BM_FitGbdt(benchmark::State& state) {
    const auto d = bench::make_dataset(static_cast<int>(state.range(0)), 20);
    GbdtParams params;
    params.n_estimators = static_cast<int>(state.range(1));
    params.max_depth = 5;
    for (auto _ : state) benchmark::DoNotOptimize(fit_gbdt(d.x, d.y, params));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}
BENCHMARK(BM_FitGbdt)->Args({400, 100})->Args({400, 500})->Args({2000, 100})->Unit(benchmark::kMillisecond);

void BM_PredictGbdt(benchmark::State& state) {
    const auto d = bench::make_dataset(2000, 20);
    GbdtParams params;
    params.n_estimators = 500;
    const auto model = fit_gbdt(d.x, d.y, params);
    for (auto _ : state) benchmark::DoNotOptimize(predict_gbdt(model, d.x));
    state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_PredictGbdt)->Unit(benchmark::kMillisecond);

void BM_FitForest(benchmark::State& state) {
    const auto d = bench::make_dataset(400, 20);
    const std::vector<double> w(400, 1.0);
    ForestParams params;
    params.n_trees = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(fit_rf(d.x, d.y, w, params));
}
BENCHMARK(BM_FitForest)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
