#include <benchmark/benchmark.h>

#include <vector>

#include "popinfo/divergence.hpp"
#include "popinfo/experiment.hpp"
#include "popinfo/metrics.hpp"
#include "popinfo/montecarlo.hpp"
#include "popinfo/random.hpp"

namespace {

popinfo::PoissonPopulation fig5_population(std::size_t neurons)
{
    auto cfg = popinfo::preset("fig5");
    auto space = popinfo::build_stimulus_space(cfg);
    return popinfo::build_population(cfg, space, neurons);
}

void BM_KlMatrix(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    auto cfg = popinfo::preset("fig5");
    auto space = popinfo::build_stimulus_space(cfg);
    auto pop = popinfo::build_population(cfg, space, n);
    for (auto _ : state) {
        auto d = popinfo::kl_matrix(pop);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(BM_KlMatrix)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ChernoffInformation(benchmark::State& state)
{
    auto pop = fig5_population(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto d = popinfo::chernoff_information_matrix(pop, 1e-10);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(BM_ChernoffInformation)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Metrics(benchmark::State& state)
{
    auto cfg = popinfo::preset("fig5");
    auto space = popinfo::build_stimulus_space(cfg);
    auto pop = popinfo::build_population(cfg, space, static_cast<std::size_t>(state.range(0)));
    const std::vector<popinfo::Metric> which{popinfo::Metric::IE, popinfo::Metric::ID, popinfo::Metric::IDD};
    for (auto _ : state) {
        auto r = popinfo::compute_metrics(pop, space.prior(), which, {});
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_Metrics)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SampleTerms(benchmark::State& state)
{
    auto cfg = popinfo::preset("fig5");
    auto space = popinfo::build_stimulus_space(cfg);
    auto pop = popinfo::build_population(cfg, space, 100);
    popinfo::McConfig mc;
    mc.j_max = static_cast<std::size_t>(state.range(0));
    mc.seed = 7;
    mc.threads = 1;
    for (auto _ : state) {
        auto t = popinfo::sample_information_terms(pop, space.prior(), mc);
        benchmark::DoNotOptimize(t);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleTerms)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Bootstrap(benchmark::State& state)
{
    std::vector<double> terms(static_cast<std::size_t>(state.range(0)));
    popinfo::Substream s(3, popinfo::StreamLane::Test, 0);
    for (auto& t : terms) t = s.uniform();
    for (auto _ : state) {
        auto e = popinfo::bootstrap_terms(terms, 100, 11, 1);
        benchmark::DoNotOptimize(e);
    }
}
BENCHMARK(BM_Bootstrap)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_PoissonSample(benchmark::State& state)
{
    const double mean = static_cast<double>(state.range(0)) / 10.0;
    popinfo::Substream s(1, popinfo::StreamLane::Test, 0);
    for (auto _ : state) benchmark::DoNotOptimize(popinfo::sample_poisson(mean, s));
    state.SetItemsProcessed(state.iterations());
}
// inversion below 10, PTRS above
BENCHMARK(BM_PoissonSample)->Arg(5)->Arg(50)->Arg(200)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();
