#pragma once

#include <cmath>
#include <cstdint>

namespace truend {

// SplitMix64 (Steele, Lea, Flood; public domain reference constants).
// Used for seeding and for deriving per-stream seeds.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

// xoshiro256** 1.0 (Blackman & Vigna; public domain reference constants).
// State is initialised from the seed via four SplitMix64 draws. All random
// quantities in this project come from this generator so that runs are
// reproducible across platforms and languages given the same seed. The
// derivation of doubles, bounded integers and geometric variates below is
// part of the documented contract (see README).
class Xoshiro256ss {
public:
    explicit Xoshiro256ss(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& word : s_) word = sm.next();
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in [0, 1): top 53 bits scaled by 2^-53.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + uniform01() * (hi - lo);
    }

    // Uniform integer in [0, n): floor(u53 * n / 2^53), exact via 128-bit
    // multiply. Slight modulo-free bias of at most n/2^53, acceptable here.
    std::uint64_t bounded(std::uint64_t n) {
        const std::uint64_t u = next_u64() >> 11;
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(u) * n) >> 53);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Geometric number of trials until first success, support {1, 2, ...},
    // mean 1/p; via inversion k = 1 + floor(log(1-u)/log(1-p)).
    int geometric(double p) {
        if (p >= 1.0) return 1;
        const double u = uniform01();
        return 1 + static_cast<int>(std::floor(std::log1p(-u) / std::log1p(-p)));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

// Per-loan substream seed: decorrelates streams so loans can be generated
// independently and in parallel without affecting the output.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    SplitMix64 sm(master ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
    return sm.next();
}

}  // namespace truend
