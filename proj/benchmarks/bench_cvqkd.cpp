#include <benchmark/benchmark.h>

#include "cvqkd/dsp_recovery.hpp"
#include "cvqkd/keyrate.hpp"
#include "cvqkd/scenario.hpp"

using namespace cvqkd;

static void BM_HolevoClosedForm(benchmark::State& state) {
    const SystemParams p;
    for (auto _ : state) benchmark::DoNotOptimize(holevo_closed_form(p, 0.673, 0.0118, ReceiverTrust::trusted));
}
BENCHMARK(BM_HolevoClosedForm);

static void BM_HolevoCovarianceMatrix(benchmark::State& state) {
    const SystemParams p;
    for (auto _ : state)
        benchmark::DoNotOptimize(holevo_covariance_matrix(p, 0.673, 0.0118, ReceiverTrust::trusted));
}
BENCHMARK(BM_HolevoCovarianceMatrix);

static void BM_EpsilonThreshold(benchmark::State& state) {
    const SystemParams p;
    for (auto _ : state) benchmark::DoNotOptimize(epsilon_threshold(p, 0.673, {ReceiverTrust::trusted, HolevoMethod::closed_form}));
}
BENCHMARK(BM_EpsilonThreshold);

static void BM_SyncOffset(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto seq = gen_gmcs_symbols(n + 256, 1.764, 1);
    const std::span<const QuadratureSymbol> tx(seq.symbols.data() + 100, n);
    for (auto _ : state) benchmark::DoNotOptimize(sync_offset(tx, seq.symbols));
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * n));
}
BENCHMARK(BM_SyncOffset)->Arg(1 << 14)->Arg(100'000)->Unit(benchmark::kMillisecond);

static void BM_PipelineBlock(benchmark::State& state) {
    ScenarioConfig cfg;
    cfg.block_size = static_cast<std::size_t>(state.range(0));
    cfg.n_blocks = 1;
    CoreChannelParams core;
    core.transmittance = 0.673;
    core.excess_noise_at_bob = 0.012;
    core.linewidth_hz = 20e3;
    cfg.cores = {core};
    for (auto _ : state) benchmark::DoNotOptimize(run_scenario(cfg));
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * cfg.block_size));
}
BENCHMARK(BM_PipelineBlock)->Arg(100'000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
