#include <benchmark/benchmark.h>

#include "fixtures.hpp"

using namespace qprep;

static void BM_Schedule(benchmark::State& state) {
    const auto spec = fixtures::make_spec(fixtures::gaussian(16), static_cast<int>(state.range(0)));
    const auto pack = count_classes(spec);
    for (auto _ : state) benchmark::DoNotOptimize(compute_schedule(pack, spec));
}
BENCHMARK(BM_Schedule)->Arg(8)->Arg(12);

static void BM_RunReport(benchmark::State& state) {
    const auto config = fixtures::make_config(
        fixtures::make_spec(fixtures::gaussian(static_cast<std::uint64_t>(state.range(0))),
                            static_cast<int>(state.range(1))));
    for (auto _ : state) benchmark::DoNotOptimize(run_report(config));
}
BENCHMARK(BM_RunReport)->Args({8, 8})->Args({16, 10})->Args({16, 12})->Unit(benchmark::kMillisecond);
