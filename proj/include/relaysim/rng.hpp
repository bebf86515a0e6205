#ifndef RELAYSIM_RNG_HPP_
#define RELAYSIM_RNG_HPP_

#include <cstdint>
#include <random>

namespace relaysim {

/// Random engine used by every stochastic operation.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Named substreams derived from a campaign's master seed.
enum class Stream : std::uint64_t {
    Topology = 1,
    Packet = 2,
    SweepPoint = 3,
};

/// Derives the seed of substream (stream, index) from a master seed:
/// splitmix64(splitmix64(master ^ stream_tag) + index).
constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                    std::uint64_t index = 0)
{
    const auto tag = static_cast<std::uint64_t>(stream) * 0xD1B54A32D192ED03ULL;
    return splitmix64(splitmix64(master ^ tag) + index);
}

inline Rng make_rng(std::uint64_t master, Stream stream, std::uint64_t index = 0)
{
    return Rng{derive_seed(master, stream, index)};
}

} // namespace relaysim

#endif // RELAYSIM_RNG_HPP_
