#pragma once

// Counter-based random numbers: every draw is a pure function of
// (seed, stream key, counter), so results do not depend on the order in which
// work is scheduled.

#include <array>
#include <cstdint>
#include <string_view>

namespace tta {

/// Philox4x32 with 10 rounds (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Output matches the Random123 reference vectors.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter generate(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter single_round(const Counter& c, const Key& k) noexcept {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// 64-bit FNV-1a; stable across platforms, unlike std::hash.
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

/// Random stream for one (seed, image) pair, indexed by (resample, draw).
class KeyedStream {
public:
    constexpr KeyedStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : key_{static_cast<std::uint32_t>(mix(seed ^ stream_id)), static_cast<std::uint32_t>(mix(seed ^ stream_id) >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream_id)),
          stream_hi_(static_cast<std::uint32_t>(stream_id >> 32)) {}

    constexpr KeyedStream(std::uint64_t seed, std::string_view stream_name) noexcept
        : KeyedStream(seed, fnv1a64(stream_name)) {}

    /// 64 random bits for counter (a, b).
    constexpr std::uint64_t bits(std::uint32_t a, std::uint32_t b) const noexcept {
        const auto out = Philox4x32::generate({a, b, stream_lo_, stream_hi_}, key_);
        return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    }

    /// Uniform index in [0, n) via 128-bit multiply-high. Bias is at most
    /// n / 2^64, far below anything observable at the sizes used here.
    constexpr std::uint64_t index(std::uint32_t a, std::uint32_t b, std::uint64_t n) const noexcept {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits(a, b)) * n) >> 64);
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    constexpr double uniform(std::uint32_t a, std::uint32_t b) const noexcept {
        return static_cast<double>(bits(a, b) >> 11) * 0x1.0p-53;
    }

private:
    // SplitMix64 finalizer; spreads seed bits across the key.
    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    Philox4x32::Key key_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
};

}  // namespace tta
