#include "evrng/counterfactual.hpp"

#include <benchmark/benchmark.h>

using namespace evrng;

static void BM_PhiloxBlock(benchmark::State& state)
{
    const Key128 key{0x0123456789abcdefULL, 0xfedcba9876543210ULL};
    Counter128 c{};
    for (auto _ : state) {
        ++c.words[0];
        benchmark::DoNotOptimize(philox_block(key, c));
    }
    state.SetItemsProcessed(state.iterations());
    state.SetBytesProcessed(state.iterations() * 16);
}
BENCHMARK(BM_PhiloxBlock);

static void BM_EventUniform(benchmark::State& state)
{
    const WorldSeed seed{1, 2};
    EventId e{"infection", {0}, 0};
    for (auto _ : state) {
        ++e.components[0];
        benchmark::DoNotOptimize(event_uniform(seed, e));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EventUniform);

static void BM_Splitmix(benchmark::State& state)
{
    StatefulGenerator gen(std::uint64_t{42});
    for (auto _ : state)
        benchmark::DoNotOptimize(gen.next());
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Splitmix);

static void BM_InfectionRun(benchmark::State& state)
{
    const auto mode = static_cast<Mode>(state.range(0));
    const InfectionModelParams params;
    RunOptions opts;
    opts.record_noise = state.range(1) != 0;
    std::uint64_t s = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate(params, mode, Scenario::intervention, WorldSeed{0, ++s}, opts).cases);
    state.SetLabel(std::string(to_string(mode)) + (opts.record_noise ? "+noise" : ""));
}
BENCHMARK(BM_InfectionRun)->ArgsProduct({{0, 1}, {0, 1}});

static void BM_ClinicRun(benchmark::State& state)
{
    auto params = ClinicModelParams::make_default();
    params.keying = state.range(0) ? KeyingMode::dyad : KeyingMode::slot;
    std::uint64_t s = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate_clinic(WorldSeed{0, ++s}, params, Scenario::intervention, Mode::keyed).cases);
    state.SetLabel(std::string(to_string(params.keying)));
}
BENCHMARK(BM_ClinicRun)->Arg(0)->Arg(1);

static void BM_RunPaired(benchmark::State& state)
{
    PairedOptions opts;
    opts.run.record_noise = false;
    opts.threads = static_cast<unsigned>(state.range(0));
    const WorldSeed stream{3, 4};
    for (auto _ : state)
        benchmark::DoNotOptimize(run_paired(1000, InfectionModelParams{}, {}, Mode::keyed, stream, opts));
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_RunPaired)->Arg(1)->Arg(4)->UseRealTime();
BENCHMARK_MAIN();
