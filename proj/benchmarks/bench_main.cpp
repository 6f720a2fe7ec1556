#include <benchmark/benchmark.h>

#include "cellfit/impute.hpp"
#include "cellfit/matching.hpp"
#include "cellfit/partitioner.hpp"
#include "cellfit/rng.hpp"
#include "cellfit/splits.hpp"
#include "cellfit/synth.hpp"

namespace {

using namespace cellfit;

Dataset checkerboard_sample(int n, uint64_t seed, double missing = 0.0) {
    SynthSpec spec = SynthSpec::checkerboard();
    spec.missing_rate = missing;
    return sample(spec, n, seed);
}

void BM_fit_model(benchmark::State& state) {
    const auto n = static_cast<int>(state.range(0));
    const Dataset data = checkerboard_sample(n, 11);
    FitConfig config;
    config.alpha = 0.3;
    config.loss = LossKind::log_loss;
    config.M = 2;
    config.seed = 5;
    const std::vector<LearnerSpec> pool = {LearnerSpec::make(LearnerId::constant),
                                           LearnerSpec::make(LearnerId::logistic)};
    for (auto _ : state) {
        PartitionModel model = fit_model(data, pool, config);
        benchmark::DoNotOptimize(model.objective);
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_fit_model)->Arg(500)->Arg(1000)->Arg(2000)->Arg(4000)->Complexity();

void BM_opt_partition_threads(benchmark::State& state) {
    const Dataset data = checkerboard_sample(4000, 11);
    FitConfig config;
    config.alpha = 0.3;
    config.loss = LossKind::log_loss;
    config.M = 2;
    config.seed = 5;
    config.threads = static_cast<int>(state.range(0));
    const std::vector<LearnerSpec> pool = {LearnerSpec::make(LearnerId::constant),
                                           LearnerSpec::make(LearnerId::logistic)};
    const SplitIndices split = stratified_split(data, config.validation_fraction,
                                                derive_seed(config.seed, SeedStream::split));
    for (auto _ : state) {
        SearchResult result = opt_partition(data, split.train, split.validation, pool, config);
        benchmark::DoNotOptimize(result.model.objective);
    }
}
BENCHMARK(BM_opt_partition_threads)->Arg(1)->Arg(2)->Arg(4);

void BM_predict(benchmark::State& state) {
    const Dataset data = checkerboard_sample(4000, 11);
    FitConfig config;
    config.alpha = 0.3;
    config.loss = LossKind::log_loss;
    config.M = 2;
    config.seed = 5;
    const std::vector<LearnerSpec> pool = {LearnerSpec::make(LearnerId::constant),
                                           LearnerSpec::make(LearnerId::logistic)};
    const PartitionModel model = fit_model(data, pool, config);
    const Dataset queries = checkerboard_sample(1024, 99);
    size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            model.predict_proba(queries.instances[i % queries.instances.size()].x));
        ++i;
    }
}
BENCHMARK(BM_predict);

void BM_knn_impute(benchmark::State& state) {
    const auto n = static_cast<int>(state.range(0));
    const Dataset base = checkerboard_sample(n, 21, 0.1);
    for (auto _ : state) {
        Dataset data = base;
        knn_impute(data, 10);
        benchmark::DoNotOptimize(data.instances.front().x[0]);
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_knn_impute)->Arg(250)->Arg(500)->Arg(1000)->Complexity();

void BM_stable_match(benchmark::State& state) {
    const auto n = static_cast<size_t>(state.range(0));
    Rng rng(7);
    std::vector<std::vector<double>> scores(n, std::vector<double>(n));
    for (auto& row : scores)
        for (auto& s : row) s = rng.uniform01();
    const std::vector<int> capacity(n, 1);
    for (auto _ : state) {
        MatchResult result = stable_match(scores, capacity);
        benchmark::DoNotOptimize(result.total_score);
    }
    state.SetComplexityN(static_cast<int64_t>(n));
}
BENCHMARK(BM_stable_match)->Arg(64)->Arg(128)->Arg(256)->Complexity();

} // namespace

BENCHMARK_MAIN();
