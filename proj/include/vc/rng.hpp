#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace vc {

// Philox 4x64 with 10 rounds (Salmon et al., "Parallel random numbers:
// as easy as 1, 2, 3", SC 2011). Constants and round structure match the
// widely used reference implementation, so blocks can be cross-checked
// against numpy's Philox bit generator. block() is the pure function of
// the counter it is given; numpy increments its counter before producing,
// so numpy's output for counter c equals block(c+1 mod 2^256).
struct Philox4x64 {
    static constexpr std::uint64_t M0 = 0xD2E7470EE14C6C93ULL;
    static constexpr std::uint64_t M1 = 0xCA5A826395121157ULL;
    static constexpr std::uint64_t W0 = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t W1 = 0xBB67AE8584CAA73BULL;

    static std::array<std::uint64_t, 4> block(std::array<std::uint64_t, 4> ctr,
                                              std::uint64_t k0, std::uint64_t k1) {
        for (int round = 0;; ++round) {
            const auto p0 = static_cast<unsigned __int128>(M0) * ctr[0];
            const auto p1 = static_cast<unsigned __int128>(M1) * ctr[2];
            const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
            const auto lo0 = static_cast<std::uint64_t>(p0);
            const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
            const auto lo1 = static_cast<std::uint64_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
            if (round == 9) break;
            k0 += W0;
            k1 += W1;
        }
        return ctr;
    }
};

// Map a 64-bit word to (0, 1); never returns an endpoint. Uses 52 bits so
// that (max + 0.5) is still exactly representable: with 53 bits the top
// word would round up to 1.0.
inline double u64_to_unit(std::uint64_t x) {
    return (static_cast<double>(x >> 12) + 0.5) * 0x1.0p-52;
}

inline void box_muller(std::uint64_t w0, std::uint64_t w1, double& z0, double& z1) {
    const double u1 = u64_to_unit(w0);
    const double u2 = u64_to_unit(w1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    z0 = r * std::cos(a);
    z1 = r * std::sin(a);
}

// Deterministic noise source. Every value is a pure function of
// (master_seed, domain, stream, step, slot); evaluation order, thread
// count and consumption pattern cannot change any draw.
class NoisePlan {
public:
    enum Domain : std::uint64_t {
        Increments = 1,  // Brownian increments, stream = path index, step = grid step
        Init = 2,        // initial condition draws, stream = path index
        Subsample = 3,   // permutations and subsampling, stream = caller tag
        Slice = 4,       // sliced-Wasserstein projection directions
        Pairs = 5,       // admissibility pair sampling
        Derive = 6,      // child seed derivation
    };

    NoisePlan() = default;
    explicit NoisePlan(std::uint64_t master_seed) : seed_(master_seed) {}

    std::uint64_t master_seed() const { return seed_; }

    std::array<std::uint64_t, 4> raw(std::uint64_t domain, std::uint64_t stream,
                                     std::uint64_t step, std::uint64_t blk) const {
        return Philox4x64::block({blk, step, stream, 0}, seed_, domain);
    }

    // count independent N(0,1) draws for the cell (domain, stream, step).
    void normals(std::uint64_t domain, std::uint64_t stream, std::uint64_t step,
                 double* out, int count) const {
        int produced = 0;
        for (std::uint64_t blk = 0; produced < count; ++blk) {
            const auto w = raw(domain, stream, step, blk);
            double z[4];
            box_muller(w[0], w[1], z[0], z[1]);
            box_muller(w[2], w[3], z[2], z[3]);
            for (int j = 0; j < 4 && produced < count; ++j) out[produced++] = z[j];
        }
    }

    double uniform(std::uint64_t domain, std::uint64_t stream, std::uint64_t step,
                   std::uint64_t slot) const {
        return u64_to_unit(raw(domain, stream, step, slot / 4)[slot % 4]);
    }

    std::uint64_t word(std::uint64_t domain, std::uint64_t stream, std::uint64_t step,
                       std::uint64_t slot) const {
        return raw(domain, stream, step, slot / 4)[slot % 4];
    }

    // Fisher-Yates permutation of {0..n-1} keyed by (Subsample, tag).
    std::vector<std::uint32_t> permutation(std::uint64_t tag, std::uint32_t n) const {
        std::vector<std::uint32_t> p(n);
        for (std::uint32_t i = 0; i < n; ++i) p[i] = i;
        for (std::uint32_t i = n; i > 1; --i) {
            const auto j = static_cast<std::uint32_t>(word(Subsample, tag, i, 0) % i);
            std::swap(p[i - 1], p[j]);
        }
        return p;
    }

    // Deterministic child seed for a named purpose.
    std::uint64_t derive(std::uint64_t purpose, std::uint64_t index) const {
        return raw(Derive, purpose, index, 0)[0];
    }

private:
    std::uint64_t seed_ = 0;
};

}  // namespace vc
