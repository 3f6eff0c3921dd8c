#ifndef PULSALOOP_PHILOX_HPP
#define PULSALOOP_PHILOX_HPP

// Philox4x32-10 counter-based generator.
// Salmon et al., "Parallel random numbers: as easy as 1, 2, 3", SC 2011.
//
// A draw is a pure function of (key, counter), so each particle can own an
// independent stream addressed by (seed, particle index, step index) with no
// shared state between threads.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace pulsaloop {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr PhiloxCounter philox_round(const PhiloxCounter& ctr, const PhiloxKey& key) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace detail

constexpr PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += detail::kPhiloxW0;
            key[1] += detail::kPhiloxW1;
        }
        ctr = detail::philox_round(ctr, key);
    }
    return ctr;
}

/// Uniform on (0, 1]: never returns 0, so log() is always finite.
constexpr double uint32_to_open_unit(std::uint32_t v) {
    return (static_cast<double>(v) + 1.0) * (1.0 / 4294967296.0);
}

/// Keyed Philox stream: draws are addressed by a (stream, substream, step) triple.
class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    constexpr PhiloxCounter block(std::uint32_t stream, std::uint32_t substream, std::uint64_t step) const {
        return philox4x32({stream, substream, static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32)},
                          key_);
    }

    /// Four independent standard normals (two Box-Muller pairs) from one block.
    std::array<double, 4> normals(std::uint32_t stream, std::uint32_t substream, std::uint64_t step) const {
        const PhiloxCounter b = block(stream, substream, step);
        std::array<double, 4> out{};
        for (int pair = 0; pair < 2; ++pair) {
            const double radius = std::sqrt(-2.0 * std::log(uint32_to_open_unit(b[2 * pair])));
            const double angle = 2.0 * std::numbers::pi * uint32_to_open_unit(b[2 * pair + 1]);
            out[2 * pair] = radius * std::cos(angle);
            out[2 * pair + 1] = radius * std::sin(angle);
        }
        return out;
    }

    /// Four uniforms on (0, 1].
    std::array<double, 4> uniforms(std::uint32_t stream, std::uint32_t substream, std::uint64_t step) const {
        const PhiloxCounter b = block(stream, substream, step);
        return {uint32_to_open_unit(b[0]), uint32_to_open_unit(b[1]), uint32_to_open_unit(b[2]),
                uint32_to_open_unit(b[3])};
    }

private:
    PhiloxKey key_;
};

}  // namespace pulsaloop

#endif  // PULSALOOP_PHILOX_HPP
