#include "eventflow/pipeline.hpp"
#include "eventflow/rolling.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace eventflow;

const FeatureMatrix& corpus_matrix() {
    static const FeatureMatrix fm = [] {
        SynthConfig cfg;
        cfg.n_days = 200;
        return assemble_all(corpus_inputs(generate(cfg)), FeatureSet::FS5);
    }();
    return fm;
}

void BM_RollingGbdt(benchmark::State& state) {
    const auto& fm = corpus_matrix();
    RollingConfig cfg;
    cfg.first_origin = fm.rows() - 21;
    cfg.horizon = static_cast<int>(state.range(0));
    cfg.model.gbdt.n_estimators = 200;
    for (auto _ : state) benchmark::DoNotOptimize(run_rolling(fm, cfg));
}
BENCHMARK(BM_RollingGbdt)->Arg(1)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_GenerateCorpus(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(generate(SynthConfig{}));
}
BENCHMARK(BM_GenerateCorpus)->Unit(benchmark::kMillisecond);

}  // namespace
