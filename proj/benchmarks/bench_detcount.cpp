#include "detcount/counting.hpp"
#include "detcount/density.hpp"
#include "detcount/expsums.hpp"
#include "detcount/singular.hpp"

#include <benchmark/benchmark.h>

using namespace detcount;

static void BM_ProductTable(benchmark::State& state) {
    const auto N = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(counting::ProductTable::full(N));
}
BENCHMARK(BM_ProductTable)->RangeMultiplier(2)->Range(256, 4096)->Unit(benchmark::kMillisecond);

static void BM_CountAtFixedN(benchmark::State& state) {
    const auto N = static_cast<std::uint64_t>(state.range(0));
    const counting::Counter counter(N);
    std::uint64_t h = N * N;
    for (auto _ : state) benchmark::DoNotOptimize(counter.count(h++, counting::Algorithm::decomposition));
}
BENCHMARK(BM_CountAtFixedN)->RangeMultiplier(2)->Range(256, 4096)->Unit(benchmark::kMicrosecond);

static void BM_CountSegmented(benchmark::State& state) {
    const auto N = static_cast<std::uint64_t>(state.range(0));
    counting::CountOptions opts;
    opts.memory_budget = 1 << 14;
    const counting::Counter counter(N, opts);
    for (auto _ : state) benchmark::DoNotOptimize(counter.count(N * N, counting::Algorithm::decomposition));
}
BENCHMARK(BM_CountSegmented)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_LatticeSweep(benchmark::State& state) {
    const auto N = static_cast<std::uint64_t>(state.range(0));
    const auto q = counting::CountQuery::make(N * N, N);
    for (auto _ : state) benchmark::DoNotOptimize(counting::lattice_sweep(q, counting::Kind::additive));
}
BENCHMARK(BM_LatticeSweep)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMillisecond);

static void BM_JQuadrature(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(density::J_quadrature(0.5));
}
BENCHMARK(BM_JQuadrature)->Unit(benchmark::kMillisecond);

static void BM_KQuadrature(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(density::K_quadrature(0.5));
}
BENCHMARK(BM_KQuadrature)->Unit(benchmark::kMillisecond);

static void BM_Kloosterman(benchmark::State& state) {
    const auto u = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(expsums::kloosterman_complete(3, 7, u));
}
BENCHMARK(BM_Kloosterman)->Arg(1009)->Arg(100003)->Unit(benchmark::kMicrosecond);

static void BM_LocalCount(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(singular::local_count_enumerate(97, 1, 5));
}
BENCHMARK(BM_LocalCount)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
