#include <benchmark/benchmark.h>

#include "hmslope/comb.hpp"
#include "hmslope/measure_exact.hpp"
#include "hmslope/wos.hpp"

using namespace hmslope;

static void BM_WosPseudoStrip(benchmark::State& state) {
    const CombBoundary strip = CombBoundary::pseudo_strip(Point(0, 0), 1, 3, 32);
    WosParams p;
    p.walkers = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(estimate_upper_measure(strip, Point(0, 0), 0.0, p));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WosPseudoStrip)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_GridStrip(benchmark::State& state) {
    const GridProblem g = make_strip_grid({1, 3}, static_cast<int>(state.range(0)), 10);
    for (auto _ : state) benchmark::DoNotOptimize(solve_grid(g));
}
BENCHMARK(BM_GridStrip)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_NearestOnComb(benchmark::State& state) {
    std::vector<double> widths;
    const int pairs = static_cast<int>(state.range(0));
    for (int i = 1; i <= 2 * pairs; ++i) widths.push_back(10.0 * i * i);
    const CombDomain d = build_comb(assign_widths(plan_forward(-kPi / 4, kPi / 6, 1.0, pairs), widths));
    double x = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(d.boundary().nearest(Point(x, 0.1)));
        x = x > 1000 ? 0.0 : x + 0.7;
    }
}
BENCHMARK(BM_NearestOnComb)->Arg(4)->Arg(16)->Arg(64);

BENCHMARK_MAIN();
