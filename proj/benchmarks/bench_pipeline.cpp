// Micro benchmarks for the training-path hot spots, all on the synthetic
// clinical-scale table (hundreds of rows, nine binary features).
#include <benchmark/benchmark.h>

#include "mortml/experiment.hpp"

using namespace mortml;

namespace {

SyntheticSpec bench_spec() {
    SyntheticSpec spec;
    spec.schema = FeatureSchema::clinical_default();
    spec.positive_prior = 0.3;
    for (int j = 0; j < 9; ++j) spec.features.push_back(rates_for_phi(0.4, 0.3));
    return spec;
}

Dataset bench_dataset(std::size_t n) { return synthesize(bench_spec(), n, 99); }

}  // namespace

static void BM_Smote(benchmark::State& state) {
    const auto ds = bench_dataset(static_cast<std::size_t>(state.range(0)));
    SmoteConfig cfg;
    cfg.seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(smote(ds, cfg));
}
BENCHMARK(BM_Smote)->Arg(470)->Arg(2000);

static void BM_PearsonMatrix(benchmark::State& state) {
    const auto ds = bench_dataset(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(correlation_matrix(ds));
}
BENCHMARK(BM_PearsonMatrix)->Arg(470)->Arg(5000);

static void BM_FitTree(benchmark::State& state) {
    const auto ds = bench_dataset(static_cast<std::size_t>(state.range(0)));
    TreeConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(fit_tree(ds.features, ds.labels, cfg));
}
BENCHMARK(BM_FitTree)->Arg(470)->Arg(2000);

static void BM_FitForest(benchmark::State& state) {
    const auto ds = bench_dataset(470);
    ForestConfig cfg;
    cfg.n_trees = static_cast<int>(state.range(0));
    cfg.seed = 3;
    for (auto _ : state) benchmark::DoNotOptimize(fit_forest(ds, cfg));
}
BENCHMARK(BM_FitForest)->Arg(25)->Arg(101);

static void BM_FitGb(benchmark::State& state) {
    const auto ds = bench_dataset(470);
    GbConfig cfg;
    cfg.n_estimators = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(fit_gb(ds, cfg));
}
BENCHMARK(BM_FitGb)->Arg(25)->Arg(100);

static void BM_FitSvm(benchmark::State& state) {
    const auto ds = bench_dataset(static_cast<std::size_t>(state.range(0)));
    SvmConfig cfg;
    cfg.seed = 3;
    for (auto _ : state) benchmark::DoNotOptimize(fit_svm(ds, cfg));
}
BENCHMARK(BM_FitSvm)->Arg(200)->Arg(470);

static void BM_MlpEpoch(benchmark::State& state) {
    const auto ds = bench_dataset(470);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.seed = 3;
    for (auto _ : state) benchmark::DoNotOptimize(train_mlp(ds, cfg));
}
BENCHMARK(BM_MlpEpoch);

static void BM_FullRun(benchmark::State& state) {
    auto cfg = ExperimentConfig::defaults();
    cfg.mlp.epochs = 10;  // the full 100-epoch run is benchmarked by BM_MlpEpoch
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg));
}
BENCHMARK(BM_FullRun)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
