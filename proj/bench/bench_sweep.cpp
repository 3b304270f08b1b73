// Serial reference against the OpenMP sweep on the D = rho model.
#include <benchmark/benchmark.h>

#include "swfront/model.hpp"
#include "swfront/sweep.hpp"

namespace {

const swfront::Model& model() {
    static const swfront::Model m = swfront::Model::build(swfront::preset_polynomial(1.0, {0, 1}, {0}, {1, -1}));
    return m;
}

void BM_SweepSerial(benchmark::State& state) {
    const auto speeds = swfront::sweep_speeds(1.0, 4.0, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(swfront::sweep_serial(model(), speeds));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SweepParallel(benchmark::State& state) {
    const auto speeds = swfront::sweep_speeds(1.0, 4.0, static_cast<int>(state.range(0)));
    const int threads = swfront::sweep_threads();
    for (auto _ : state) benchmark::DoNotOptimize(swfront::sweep_parallel(model(), speeds, threads));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
