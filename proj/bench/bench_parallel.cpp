// Serial reference vs OpenMP kernels: finite-difference gradient and trial batch.

#include <benchmark/benchmark.h>

#include "gainlab/experiment.hpp"
#include "gainlab/objectives.hpp"

namespace {

using namespace gainlab;

GainMatrix probe_gain(const FilterProblem& p, std::uint64_t seed) {
    return GainMatrix(analytic_gain(p).matrix() + 0.1 * random_gaussian(p.state_dim(), p.obs_dim(), seed));
}

void BM_FiniteDifferenceSerial(benchmark::State& state) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    const FilterProblem p = generate_problem(dim, dim, 10.0, 3);
    const GainMatrix k = probe_gain(p, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(finite_difference_gradient_serial(p, k, ObjectiveKind::LogGeneralizedVariance));
    }
}
BENCHMARK(BM_FiniteDifferenceSerial)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_FiniteDifferenceOpenMP(benchmark::State& state) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    const FilterProblem p = generate_problem(dim, dim, 10.0, 3);
    const GainMatrix k = probe_gain(p, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(finite_difference_gradient(p, k, ObjectiveKind::LogGeneralizedVariance));
    }
}
BENCHMARK(BM_FiniteDifferenceOpenMP)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

ExperimentConfig batch_config() {
    ExperimentConfig config;
    config.trials = 16;
    config.master_seed = 5;
    return config;
}

void BM_ExperimentSerial(benchmark::State& state) {
    const ExperimentConfig config = batch_config();
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment_serial(config));
}
BENCHMARK(BM_ExperimentSerial)->Unit(benchmark::kMillisecond);

void BM_ExperimentOpenMP(benchmark::State& state) {
    const ExperimentConfig config = batch_config();
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment(config));
}
BENCHMARK(BM_ExperimentOpenMP)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
