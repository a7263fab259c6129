#include <benchmark/benchmark.h>

#include <random>

#include "datasuite/pipeline.hpp"
#include "datasuite/regression_tree.hpp"
#include "datasuite/synth.hpp"
#include "datasuite/vine.hpp"

namespace {

datasuite::TabularDataset synthetic_train(std::size_t rows, std::uint64_t seed) {
    auto cfg = datasuite::default_synth_config();
    cfg.rows = rows;
    cfg.seed = seed;
    return datasuite::generate_gaussian(cfg).train;
}

void BM_RegressionTreeFit(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z;
    datasuite::Matrix x(n, 2);
    datasuite::Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i, 0) = z(rng);
        x(i, 1) = z(rng);
        y(i) = x(i, 0) * x(i, 0) + 0.5 * z(rng);
    }
    for (auto _ : state) {
        auto t = datasuite::RegressionTree::fit(x, {y.data(), static_cast<std::size_t>(n)});
        benchmark::DoNotOptimize(t.leaf_count());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RegressionTreeFit)->Arg(500)->Arg(2000)->Arg(8000)->Complexity();

void BM_VineFit(benchmark::State& state) {
    const auto train = synthetic_train(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(datasuite::fit_dvine(train).pair_count());
}
BENCHMARK(BM_VineFit)->Arg(1000)->Arg(4000);

void BM_VineSample(benchmark::State& state) {
    const auto train = synthetic_train(1000, 4);
    const auto vine = datasuite::fit_dvine(train);
    for (auto _ : state)
        benchmark::DoNotOptimize(datasuite::sample_dvine_uniforms(vine, static_cast<std::size_t>(state.range(0)), 5));
}
BENCHMARK(BM_VineSample)->Arg(1000)->Arg(10000);

void BM_PipelineFitPredict(benchmark::State& state) {
    auto cfg = datasuite::default_synth_config();
    cfg.rows = static_cast<std::size_t>(state.range(0));
    cfg.seed = 6;
    const auto splits = datasuite::generate_gaussian(cfg);
    datasuite::PipelineOptions opts;
    opts.seed = 6;
    for (auto _ : state) {
        const auto fp = datasuite::fit_pipeline(splits.train, opts);
        const auto set = datasuite::predict(fp, datasuite::prepare(fp, splits.test).data);
        benchmark::DoNotOptimize(set.instances());
    }
}
BENCHMARK(BM_PipelineFitPredict)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
