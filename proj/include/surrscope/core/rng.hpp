#pragma once

#include <cstdint>
#include <string_view>

#include "surrscope/core/types.hpp"

namespace surrscope {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// FNV-1a over the bytes of an operation tag.
constexpr std::uint64_t tag_hash(std::string_view tag) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Seed of the independent stream identified by (base, tag, index).
///
/// Every stochastic operation derives its randomness this way rather than
/// consuming a shared generator, so a replicate or radius can be recomputed in
/// isolation and work items can run in any order or in parallel.
constexpr RngSeed derive_seed(RngSeed base, std::string_view tag, std::uint64_t index = 0) noexcept
{
    const std::uint64_t keyed = mix64(base.value ^ tag_hash(tag));
    return RngSeed{mix64(keyed + 0x9e3779b97f4a7c15ULL * (index + 1))};
}

/// Counter-based generator: output k is a hash of (key, k). Substreams are new
/// keys derived from (key, index), so row i of a sample can be generated
/// without generating rows 0..i-1.
class RandomStream {
public:
    explicit RandomStream(RngSeed seed) noexcept : key_(mix64(seed.value ^ 0x6a09e667f3bcc908ULL)) {}

    RandomStream(RngSeed base, std::string_view tag, std::uint64_t index = 0) noexcept
        : RandomStream(derive_seed(base, tag, index))
    {
    }

    RandomStream substream(std::uint64_t index) const noexcept
    {
        return RandomStream(RngSeed{mix64(key_ + 0xd1b54a32d192ed03ULL * (index + 1))});
    }

    std::uint64_t next_u64() noexcept
    {
        ++counter_;
        return mix64(key_ ^ mix64(counter_ * 0x9e3779b97f4a7c15ULL));
    }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_positive() noexcept { return 1.0 - uniform(); }

    /// Uniform integer on [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound) noexcept;

    /// Standard normal via Box-Muller; the second variate of each pair is kept.
    double normal() noexcept;

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace surrscope
