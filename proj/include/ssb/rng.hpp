#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace ssb {

/// Identifies one independent random stream. The (master_seed, stream_index)
/// pair maps to generator output through a pure function, so any trajectory
/// can be regenerated in isolation, in any order, on any thread.
struct RngSeed {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Derive an unrelated master seed for auxiliary randomness (bootstrap
/// replicas, per-field-value sub-ensembles) so it cannot collide with the
/// trajectory streams of the parent seed.
inline std::uint64_t derived_master(std::uint64_t master, std::uint64_t purpose) {
    std::uint64_t s = master ^ (0x6a09e667f3bcc909ull + purpose * 0x9e3779b97f4a7c15ull);
    return splitmix64(s);
}

/// Philox4x32-10 counter-based generator. The key holds the master seed, the
/// stream index occupies the upper counter words and the block index the
/// lower ones, so every stream owns 2^64 blocks of 128 random bits.
class Philox4x32 {
public:
    explicit Philox4x32(RngSeed seed)
        : k0_(static_cast<std::uint32_t>(seed.master_seed)),
          k1_(static_cast<std::uint32_t>(seed.master_seed >> 32)),
          c2_(static_cast<std::uint32_t>(seed.stream_index)),
          c3_(static_cast<std::uint32_t>(seed.stream_index >> 32)) {}

    std::array<std::uint32_t, 4> block(std::uint64_t block_index) const {
        std::uint32_t x0 = static_cast<std::uint32_t>(block_index);
        std::uint32_t x1 = static_cast<std::uint32_t>(block_index >> 32);
        std::uint32_t x2 = c2_;
        std::uint32_t x3 = c3_;
        std::uint32_t k0 = k0_;
        std::uint32_t k1 = k1_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = 0xd2511f53ull * x0;
            const std::uint64_t p1 = 0xcd9e8d57ull * x2;
            const std::uint32_t y0 = static_cast<std::uint32_t>(p1 >> 32) ^ x1 ^ k0;
            const std::uint32_t y1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t y2 = static_cast<std::uint32_t>(p0 >> 32) ^ x3 ^ k1;
            const std::uint32_t y3 = static_cast<std::uint32_t>(p0);
            x0 = y0;
            x1 = y1;
            x2 = y2;
            x3 = y3;
            k0 += 0x9e3779b9u;
            k1 += 0xbb67ae85u;
        }
        return {x0, x1, x2, x3};
    }

private:
    std::uint32_t k0_, k1_, c2_, c3_;
};

/// Sequential uniform/Gaussian draws on top of the block generator.
class RandomStream {
public:
    explicit RandomStream(RngSeed seed) : philox_(seed) {}

    std::uint64_t next_u64() {
        if (!second_half_) {
            cache_ = philox_.block(block_++);
            second_half_ = true;
            return (static_cast<std::uint64_t>(cache_[1]) << 32) | cache_[0];
        }
        second_half_ = false;
        return (static_cast<std::uint64_t>(cache_[3]) << 32) | cache_[2];
    }

    /// Uniform on [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via the polar (Marsaglia) rejection method.
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, r2;
        do {
            u = 2.0 * next_unit() - 1.0;
            v = 2.0 * next_unit() - 1.0;
            r2 = u * u + v * v;
        } while (r2 >= 1.0 || r2 == 0.0);
        const double f = std::sqrt(-2.0 * std::log(r2) / r2);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

private:
    Philox4x32 philox_;
    std::array<std::uint32_t, 4> cache_{};
    std::uint64_t block_ = 0;
    bool second_half_ = false;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ssb
