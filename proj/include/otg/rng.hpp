#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace otg {

// Deterministic RNG used everywhere randomness appears. std::<random>
// distributions are implementation-defined, which would break the
// bit-reproducibility contracts, so sampling is done by hand on top of
// xoshiro256++ seeded through splitmix64.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& s : s_) s = splitmix64(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0,1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n ? next_u64() % n : 0; }

    // Standard normal via Box-Muller (no cached spare: two draws per call keeps
    // the stream position independent of call history).
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    // Uniform direction on the Euclidean unit sphere in R^n.
    std::vector<double> unit_vector(int n) {
        std::vector<double> v(n);
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (int i = 0; i < n; ++i) {
                v[i] = normal();
                norm2 += v[i] * v[i];
            }
        } while (norm2 < 1e-24);
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& x : v) x *= inv;
        return v;
    }

    // Derive an independent per-item stream; mixing is splitmix-style so the
    // result does not depend on draw order (parallel-merge contract).
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t item) {
        std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (item + 1));
        return splitmix64(x);
    }

  private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
};

// Latin hypercube: `count` points in [0,1)^dims, one stratum per point and
// dimension, strata permuted per dimension. Deterministic in (seed).
inline std::vector<std::vector<double>> latin_hypercube(int count, int dims, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> pts(count, std::vector<double>(dims));
    std::vector<int> perm(count);
    for (int d = 0; d < dims; ++d) {
        for (int i = 0; i < count; ++i) perm[i] = i;
        for (int i = count - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i + 1)));
            std::swap(perm[i], perm[j]);
        }
        for (int i = 0; i < count; ++i)
            pts[i][d] = (perm[i] + rng.uniform01()) / count;
    }
    return pts;
}

}  // namespace otg
