// rng.hpp — counter-based Philox4x32-10 generator with per-stream keying.
//
// Streams are addressed by (seed, stream): the seed fills the Philox key and
// the stream index fills the upper counter words, so any two streams are
// independent and a stream's output depends only on (seed, stream, draw index)
// — never on thread scheduling. One Box-Muller call consumes exactly one
// 4x32 block, keeping draw counters aligned across schemes.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace g2kit {

class Philox {
public:
    Philox(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          ctr_{0u, 0u, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

    std::array<std::uint32_t, 4> next_block() {
        std::array<std::uint32_t, 4> x = ctr_;
        std::uint32_t k0 = key_[0], k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            x = single_round(x, k0, k1);
            k0 += 0x9E3779B9u; // golden-ratio key schedule
            k1 += 0xBB67AE85u;
        }
        if (++ctr_[0] == 0u) ++ctr_[1]; // 2^64 blocks per stream
        return x;
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform01() {
        if (spare_valid_) {
            spare_valid_ = false;
            return to_unit(spare_);
        }
        const auto b = next_block();
        spare_ = (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
        spare_valid_ = true;
        const std::uint64_t u = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
        return to_unit(u);
    }

    // Two independent standard normals from one counter block (Box-Muller).
    std::array<double, 2> normal_pair() {
        const auto b = next_block();
        const std::uint64_t u64a = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
        const std::uint64_t u64b = (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
        const double u1 = 1.0 - to_unit(u64a); // (0,1], keeps the log finite
        const double u2 = to_unit(u64b);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(th), r * std::sin(th)};
    }

private:
    static double to_unit(std::uint64_t u) {
        return static_cast<double>(u >> 11) * 0x1.0p-53;
    }

    static std::array<std::uint32_t, 4> single_round(std::array<std::uint32_t, 4> c,
                                                     std::uint32_t k0, std::uint32_t k1) {
        const std::uint64_t p0 = 0xD2511F53ull * c[0];
        const std::uint64_t p1 = 0xCD9E8D57ull * c[2];
        return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k0,
                static_cast<std::uint32_t>(p1),
                static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k1,
                static_cast<std::uint32_t>(p0)};
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::uint64_t spare_ = 0;
    bool spare_valid_ = false;
};

} // namespace g2kit
