#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace niche {

using Philox4x64Block = std::array<std::uint64_t, 4>;
using Philox4x64Key = std::array<std::uint64_t, 2>;

/// Philox4x64-10 block function (Salmon et al. counter-based generator).
inline Philox4x64Block philox4x64(Philox4x64Block ctr, Philox4x64Key key) {
    constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
    constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
    constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
    constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kW0;
            key[1] += kW1;
        }
        const unsigned __int128 p0 = static_cast<unsigned __int128>(kM0) * ctr[0];
        const unsigned __int128 p1 = static_cast<unsigned __int128>(kM1) * ctr[2];
        const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
        const auto lo0 = static_cast<std::uint64_t>(p0);
        const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
        const auto lo1 = static_cast<std::uint64_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

/// Random stream addressed by (seed, stream, substream). Draw k of a stream
/// is a pure function of those three numbers and k, so results never depend
/// on which thread evaluates them or in what order streams are visited.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0)
        : key_{seed, stream}, substream_(substream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (pos_ == 4) {
            ++block_;
            buf_ = philox4x64({block_, substream_, 0, 0}, key_);
            pos_ = 0;
        }
        return buf_[pos_++];
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() {
        return (static_cast<double>((*this)() >> 12) + 0.5) * 0x1.0p-52;
    }

    /// Standard normal (Box-Muller, one value per call).
    double normal() {
        const double u1 = uniform_open();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    Philox4x64Key key_;
    std::uint64_t substream_;
    std::uint64_t block_ = 0;
    Philox4x64Block buf_{};
    int pos_ = 4;
};

}  // namespace niche
