#include <benchmark/benchmark.h>

#include "etsim/platform.hpp"
#include "etsim/routing.hpp"

namespace {

etsim::WeightMatrix mesh_weights(int side) {
    const auto topo = etsim::mesh(side, side, 1.0);
    return etsim::weights_sdr(topo);
}

void BM_AllPairs(benchmark::State& state) {
    const auto w = mesh_weights(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(etsim::all_pairs(w));
    state.SetComplexityN(state.range(0) * state.range(0));
}

void BM_AllPairsSerial(benchmark::State& state) {
    const auto w = mesh_weights(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(etsim::all_pairs_serial(w));
    state.SetComplexityN(state.range(0) * state.range(0));
}

}  // namespace

BENCHMARK(BM_AllPairs)->DenseRange(4, 16, 4)->Complexity(benchmark::oNCubed);
BENCHMARK(BM_AllPairsSerial)->DenseRange(4, 16, 4)->Complexity(benchmark::oNCubed);

BENCHMARK_MAIN();
