// Serial reference against the OpenMP batch simulator, plus the non-myopic
// general solver for scale.

#include "ebl/nonmyopic.hpp"
#include "ebl/simulator.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

namespace {

ebl::SimConfig config(int q) {
    ebl::SimConfig c;
    c.seed = 1;
    c.T = 20000;
    c.burn_in = q;
    c.params.q = q;
    c.params.lambda = 1.0;
    return c;
}

void BM_BatchSerial(benchmark::State& state) {
    const auto c = config(static_cast<int>(state.range(1)));
    const auto coeffs = ebl::solve_regime(c);
    const int paths = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(ebl::simulate_batch_serial(c, coeffs, paths));
    state.SetItemsProcessed(state.iterations() * paths * c.T);
}

void BM_BatchOpenMP(benchmark::State& state) {
    const auto c = config(static_cast<int>(state.range(1)));
    const auto coeffs = ebl::solve_regime(c);
    const int paths = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(ebl::simulate_batch(c, coeffs, paths));
    state.SetItemsProcessed(state.iterations() * paths * c.T);
    state.counters["threads"] = omp_get_max_threads();
}

void BM_NonMyopicGeneral(benchmark::State& state) {
    ebl::EconomyParams p;
    p.q = static_cast<int>(state.range(0));
    p.lambda = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(ebl::solve_nonmyopic_general(p));
}

} // namespace

BENCHMARK(BM_BatchSerial)->Args({8, 2})->Args({8, 10})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchOpenMP)->Args({8, 2})->Args({8, 10})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_NonMyopicGeneral)->Arg(2)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
