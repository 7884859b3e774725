#include "lararp/simulator.hpp"

#include <benchmark/benchmark.h>

using namespace lararp;

static void
BM_SmallRun(benchmark::State& state)
{
    ScenarioConfig c;
    c.nodeCount = 30;
    c.flowCount = 3;
    c.simTime = 10.0;
    c.attackerCount = 3;
    c.protocol.protocol = state.range(0) == 0 ? Protocol::Lararp : Protocol::Saodv;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(RunScenario(c, false).report.dataDelivered);
    }
}
BENCHMARK(BM_SmallRun)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// One sweep point at full size.
static void
BM_DefaultRun(benchmark::State& state)
{
    ScenarioConfig c;
    c.attackerCount = static_cast<std::uint32_t>(state.range(0));
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(RunScenario(c, false).report.dataDelivered);
    }
}
BENCHMARK(BM_DefaultRun)->Arg(5)->Arg(25)->Unit(benchmark::kMillisecond)->Iterations(3);

static void
BM_DefaultRunLogged(benchmark::State& state)
{
    ScenarioConfig c;
    c.attackerCount = 5;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(RunScenario(c, true).log.size());
    }
}
BENCHMARK(BM_DefaultRunLogged)->Unit(benchmark::kMillisecond)->Iterations(3);

BENCHMARK_MAIN();
