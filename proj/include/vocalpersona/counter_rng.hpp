#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace vocalpersona {

//---------------------------------------------------------------------------//
/*!
 * \brief Philox4x32-10 counter-based generator.
 *
 * Salmon et al., "Parallel random numbers: as easy as 1, 2, 3" (SC'11).
 * Output is a pure function of (key, counter), so any draw can be recomputed
 * without replaying a sequence and independent streams need no shared state.
 *
 * Layout used throughout this library:
 *
 *   key     = (seed & 0xffffffff, seed >> 32)
 *   counter = (index & 0xffffffff, index >> 32, stream & 0xffffffff, stream >> 32)
 *
 * Each block yields four 32-bit words, combined into two 64-bit words as
 * (w1 << 32 | w0) and (w3 << 32 | w2). Doubles in the open interval (0, 1)
 * are formed from the top 52 bits: ((u >> 12) + 0.5) * 2^-52, so the
 * extremes 2^-53 and 1 - 2^-53 are exactly representable.
 *
 * This layout is part of the reproducibility contract: changing it changes
 * every sampled persona value.
 */
class Philox4x32 {
  public:
    using Block = std::array<std::uint32_t, 4>;

    explicit constexpr Philox4x32(std::uint64_t seed) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}
    {
    }

    constexpr Block operator()(Block ctr) const noexcept
    {
        std::array<std::uint32_t, 2> key = key_;
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

  private:
    std::array<std::uint32_t, 2> key_;
};

/// Open-interval double from the top 52 bits of `bits`.
constexpr double to_unit_open(std::uint64_t bits) noexcept
{
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// A seed plus stream id. `block(i)` is the i-th output of that stream, a
/// pure function of (seed, stream, i).
class RngStream {
  public:
    constexpr RngStream(std::uint64_t seed, std::uint64_t stream) noexcept
        : engine_(seed), stream_(stream)
    {
    }

    /// Two 64-bit words for draw `index`.
    constexpr std::array<std::uint64_t, 2> words(std::uint64_t index) const noexcept
    {
        const auto b = engine_({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                                static_cast<std::uint32_t>(stream_),
                                static_cast<std::uint32_t>(stream_ >> 32)});
        return {(std::uint64_t{b[1]} << 32) | b[0], (std::uint64_t{b[3]} << 32) | b[2]};
    }

    /// Two uniforms in (0, 1) for draw `index`.
    constexpr std::array<double, 2> uniforms(std::uint64_t index) const noexcept
    {
        const auto w = words(index);
        return {to_unit_open(w[0]), to_unit_open(w[1])};
    }

    /// Child stream: same seed, stream id mixed with `child`.
    RngStream split(std::uint64_t child) const noexcept;

    std::uint64_t stream() const noexcept { return stream_; }

  private:
    Philox4x32 engine_;
    std::uint64_t stream_;
};

/// SplitMix64 finalizer; used to derive seeds, never as a sampling source.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

/// Seed for the `counter`-th synthesis of a session.
constexpr std::uint64_t derive_seed(std::string_view session_id, std::uint64_t counter) noexcept
{
    return mix64(fnv1a64(session_id) ^ mix64(counter));
}

}  // namespace vocalpersona
