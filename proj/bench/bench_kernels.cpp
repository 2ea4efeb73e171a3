// Serial reference kernels against their OpenMP counterparts.

#include "ddr/ensemble.hpp"
#include "ddr/reference.hpp"

#include <benchmark/benchmark.h>

using namespace ddr;

namespace {

const Dataset& training_data()
{
    static const Dataset data = generate_synthetic({0.4, 5, 11}, 50000);
    return data;
}

const Dataset& probe_data()
{
    static const Dataset probes = generate_synthetic({0.4, 5, 12}, 200);
    return probes;
}

const LearnerSpec& ka_spec()
{
    static const LearnerSpec spec;
    return spec;
}

const Ensemble& trained_ensemble()
{
    static const Ensemble e =
        build_ensemble(training_data(), DivisionSchedule({1, 5, 11, 29}), ka_spec()).ensemble;
    return e;
}

void fit_clusters_args(benchmark::internal::Benchmark* b)
{
    for (int w : {1, 7, 29})
        b->Arg(w);
}

void BM_fit_clusters_serial(benchmark::State& state)
{
    const auto& data = training_data();
    const auto order = identity_order(data.size());
    const auto clusters = split_consecutive(data.size(), static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(reference::fit_clusters(data, order, clusters, ka_spec(), 1));
}
BENCHMARK(BM_fit_clusters_serial)->Apply(fit_clusters_args)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_fit_clusters_parallel(benchmark::State& state)
{
    const auto& data = training_data();
    const auto order = identity_order(data.size());
    const auto clusters = split_consecutive(data.size(), static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(fit_clusters(data, order, clusters, ka_spec(), 1, Execution::parallel));
}
BENCHMARK(BM_fit_clusters_parallel)->Apply(fit_clusters_args)->Unit(benchmark::kMillisecond)->UseRealTime();

const std::vector<double> probe{0.65, 0.5, 0.5, 0.5, 0.5};

void BM_oracle_sample_serial(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(reference::oracle_sample(probe, static_cast<std::size_t>(state.range(0)), 5));
}
BENCHMARK(BM_oracle_sample_serial)->Arg(20000)->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_oracle_sample_parallel(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(oracle_sample(probe, static_cast<std::size_t>(state.range(0)), 5));
}
BENCHMARK(BM_oracle_sample_parallel)->Arg(20000)->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_predict_samples_serial(benchmark::State& state)
{
    const auto& e = trained_ensemble();
    for (auto _ : state)
        benchmark::DoNotOptimize(predict_samples(e, probe_data(), Execution::serial));
}
BENCHMARK(BM_predict_samples_serial)->Unit(benchmark::kMicrosecond)->UseRealTime();

void BM_predict_samples_parallel(benchmark::State& state)
{
    const auto& e = trained_ensemble();
    for (auto _ : state)
        benchmark::DoNotOptimize(predict_samples(e, probe_data(), Execution::parallel));
}
BENCHMARK(BM_predict_samples_parallel)->Unit(benchmark::kMicrosecond)->UseRealTime();

} // namespace

BENCHMARK_MAIN();
