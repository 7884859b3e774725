#include "lararp/crypto.hpp"

#include <benchmark/benchmark.h>

using namespace lararp;

static void
BM_ComputeTag(benchmark::State& state)
{
    Rng rng(1);
    const auto key = rng.FillBlock<SymmetricKey>();
    Bytes msg(static_cast<std::size_t>(state.range(0)), 0x5a);
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(ComputeTag(key, msg));
    }
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ComputeTag)->Arg(16)->Arg(128)->Arg(512);

static void
BM_VerifyReveal(benchmark::State& state)
{
    Rng rng(2);
    KeyChain chain = KeyChain::Generate(0, rng.FillBlock<Secret>(), 64);
    const Reveal r = chain.RevealNext();
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(VerifyReveal(chain.Publics(), r.index, r.secret));
    }
}
BENCHMARK(BM_VerifyReveal);

static void
BM_ChainGenerate(benchmark::State& state)
{
    Rng rng(3);
    const Secret seed = rng.FillBlock<Secret>();
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(KeyChain::Generate(0, seed, static_cast<std::size_t>(state.range(0))));
    }
}
BENCHMARK(BM_ChainGenerate)->Arg(64)->Arg(1024);

static void
BM_ProvisionKeys(benchmark::State& state)
{
    for (auto _ : state)
    {
        Rng rng(4);
        benchmark::DoNotOptimize(SharedKeyTable::Provision(static_cast<std::size_t>(state.range(0)), rng));
    }
}
BENCHMARK(BM_ProvisionKeys)->Arg(100);
