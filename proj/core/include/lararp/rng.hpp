#pragma once

#include "lararp/types.hpp"

#include <cstdint>
#include <random>

namespace lararp
{

/**
 * \brief Seeded generator used for every random draw in a run.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the
 * standard. The distributions below are written out by hand because the
 * std:: distributions are implementation-defined, and runs must be
 * bit-identical across toolchains.
 */
class Rng
{
  public:
    explicit Rng(std::uint64_t seed)
        : m_engine(seed)
    {
    }

    std::uint64_t Next()
    {
        return m_engine();
    }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double Uniform()
    {
        return static_cast<double>(Next() >> 11) * 0x1.0p-53;
    }

    double Uniform(double lo, double hi)
    {
        return lo + (hi - lo) * Uniform();
    }

    /// Unbiased integer in [0, bound). bound must be > 0.
    std::uint64_t Below(std::uint64_t bound)
    {
        if (bound == 0)
        {
            throw InvalidParameter("Rng::Below: bound must be positive");
        }
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x = Next();
        while (x >= limit)
        {
            x = Next();
        }
        return x % bound;
    }

    bool Bernoulli(double p)
    {
        return Uniform() < p;
    }

    template <std::size_t N>
    std::array<std::uint8_t, N> FillBytes()
    {
        std::array<std::uint8_t, N> out{};
        for (std::size_t i = 0; i < N; i += 8)
        {
            std::uint64_t word = Next();
            for (std::size_t j = 0; j < 8 && i + j < N; ++j)
            {
                out[i + j] = static_cast<std::uint8_t>(word >> (8 * j));
            }
        }
        return out;
    }

    template <typename B>
    B FillBlock()
    {
        B b;
        b.bytes = FillBytes<kBlockSize>();
        return b;
    }

    /// Child generator for an independent stream; draws one value from this one.
    Rng Fork(std::uint64_t stream)
    {
        return Rng(SplitMix(Next() ^ SplitMix(stream + 0x9e3779b97f4a7c15ULL)));
    }

  private:
    static std::uint64_t SplitMix(std::uint64_t x)
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 m_engine;
};

} // namespace lararp
