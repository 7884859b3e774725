#include "lararp/messages.hpp"

#include <benchmark/benchmark.h>

using namespace lararp;

namespace
{

Rreq
RequestWithHops(std::size_t hops)
{
    Rng rng(5);
    Rreq r;
    r.source = 0;
    r.dest = 1;
    r.requestId = rng.FillBytes<8>();
    r.sourceTag = rng.FillBlock<AuthTag>();
    r.verifier = Reveal{7, rng.FillBlock<Secret>()};
    for (std::size_t i = 0; i < hops; ++i)
    {
        r.nodeList.push_back(static_cast<NodeId>(2 + i));
        r.hopTags.push_back(rng.FillBlock<AuthTag>());
    }
    return r;
}

} // namespace

static void
BM_EncodeRreq(benchmark::State& state)
{
    const Message m = RequestWithHops(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(Encode(m));
    }
}
BENCHMARK(BM_EncodeRreq)->Arg(0)->Arg(4)->Arg(16);

static void
BM_DecodeRreq(benchmark::State& state)
{
    const Bytes wire = Encode(RequestWithHops(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(Decode(wire));
    }
}
BENCHMARK(BM_DecodeRreq)->Arg(0)->Arg(4)->Arg(16);

static void
BM_HopDigest(benchmark::State& state)
{
    const Rreq r = RequestWithHops(8);
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(HopDigest(r, 7));
    }
}
BENCHMARK(BM_HopDigest);
