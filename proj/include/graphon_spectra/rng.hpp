#pragma once

// Counter-based random numbers (Philox4x32-10). A draw is a pure function of
// (seed, a, b, stream), so matrix entry (i, j) does not depend on the order in
// which entries are generated.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace graphon_spectra {

class CounterRng {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit constexpr CounterRng(std::uint64_t seed) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    /// Raw 128 random bits for counter (a, b, stream). Distinct counters are
    /// guaranteed for a, b < 2^32.
    constexpr Block bits(std::uint64_t a, std::uint64_t b, std::uint32_t stream) const noexcept {
        const auto hi_a = static_cast<std::uint32_t>(a >> 32);
        const auto hi_b = static_cast<std::uint32_t>(b >> 32);
        const Block ctr{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                        hi_a ^ ((hi_b << 16) | (hi_b >> 16)), stream};
        return philox4x32(ctr, key_);
    }

    /// The Philox4x32-10 bijection itself.
    static constexpr Block philox4x32(Block ctr, std::array<std::uint32_t, 2> key) noexcept {
        for (int round = 0; round < 10; ++round) {
            ctr = philox_round(ctr, key);
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

    /// Uniform double in the open interval (0, 1) with 53 random bits.
    constexpr double uniform(std::uint64_t a, std::uint64_t b, std::uint32_t stream) const noexcept {
        const Block x = bits(a, b, stream);
        return to_unit((static_cast<std::uint64_t>(x[0]) << 32) | x[1]);
    }

    /// Standard normal via Box-Muller on one Philox block.
    double normal(std::uint64_t a, std::uint64_t b, std::uint32_t stream) const noexcept {
        const Block x = bits(a, b, stream);
        const double u1 = to_unit((static_cast<std::uint64_t>(x[0]) << 32) | x[1]);
        const double u2 = to_unit((static_cast<std::uint64_t>(x[2]) << 32) | x[3]);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr double to_unit(std::uint64_t r) noexcept {
        return (static_cast<double>(r >> 11) + 0.5) * 0x1.0p-53;
    }

    static constexpr Block philox_round(const Block& c, const std::array<std::uint32_t, 2>& k) noexcept {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }

    std::array<std::uint32_t, 2> key_;
};

}  // namespace graphon_spectra
