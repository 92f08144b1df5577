#include <benchmark/benchmark.h>

#include "qprep/biham.hpp"
#include "qprep/statevector.hpp"

using namespace qprep;

static void BM_Diffusion(benchmark::State& state) {
    auto s = StateVector::uniform(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        apply_diffusion(s);
        benchmark::DoNotOptimize(s[0]);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.size()));
}
BENCHMARK(BM_Diffusion)->DenseRange(10, 20, 5);

static void BM_GroverIteration(benchmark::State& state) {
    auto s = StateVector::uniform(static_cast<int>(state.range(0)));
    const auto marked = [](std::uint64_t x) { return (x & 7U) == 3U; };
    for (auto _ : state) {
        grover(s, marked, 1);
        benchmark::DoNotOptimize(s[0]);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.size()));
}
BENCHMARK(BM_GroverIteration)->DenseRange(10, 20, 5);

static void BM_AnalyticEvolve(benchmark::State& state) {
    const auto s = StateVector::uniform(static_cast<int>(state.range(0)));
    const auto marked = [](std::uint64_t x) { return (x & 7U) == 3U; };
    for (auto _ : state) {
        auto out = biham::analytic_evolve(s, marked, 8);
        benchmark::DoNotOptimize(out[0]);
    }
}
BENCHMARK(BM_AnalyticEvolve)->DenseRange(10, 20, 5);
