#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "truend/rng.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

using namespace truend;

namespace {

// Independent transcription of the reference generators, kept separate from
// the production header so the two implementations check each other.
struct RefSplitMix64 {
    std::uint64_t x;
    std::uint64_t next() {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

struct RefXoshiro {
    std::uint64_t s[4];
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t next() {
        const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }
};

}  // namespace

TEST_CASE("matches an independent transcription of the reference algorithm") {
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xDEADBEEFULL}) {
        RefSplitMix64 sm{seed};
        RefXoshiro ref{};
        for (auto& w : ref.s) w = sm.next();
        Xoshiro256ss ours(seed);
        for (int i = 0; i < 1000; ++i) CHECK(ours.next_u64() == ref.next());
    }
}

TEST_CASE("frozen stream for seed 42") {
    // First outputs for seed 42, fixed as cross-implementation vectors.
    Xoshiro256ss rng(42);
    const std::vector<std::uint64_t> expected = {
        0x15780b2e0c2ec716ULL, 0x6104d9866d113a7eULL, 0xae17533239e499a1ULL,
        0xecb8ad4703b360a1ULL, 0xfde6dc7fe2ec5e64ULL};
    for (std::uint64_t want : expected) {
        const std::uint64_t got = rng.next_u64();
        CHECK(got == want);
    }
}

TEST_CASE("uniform01 stays in [0,1) and uses the top 53 bits") {
    Xoshiro256ss a(7), b(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = a.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(u == static_cast<double>(b.next_u64() >> 11) * 0x1.0p-53);
    }
}

TEST_CASE("bounded draws cover the range without exceeding it") {
    Xoshiro256ss rng(17);
    std::vector<int> seen(10, 0);
    for (int i = 0; i < 20000; ++i) {
        const std::uint64_t v = rng.bounded(10);
        REQUIRE(v < 10);
        ++seen[static_cast<std::size_t>(v)];
    }
    for (int count : seen) CHECK(count > 1500);  // roughly uniform
}

TEST_CASE("geometric inversion has the right mean and support") {
    Xoshiro256ss rng(23);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const int k = rng.geometric(1.0 / 12.0);
        REQUIRE(k >= 1);
        sum += k;
    }
    CHECK(sum / n == doctest::Approx(12.0).epsilon(0.02));
}

TEST_CASE("derived seeds decorrelate neighbouring streams") {
    Xoshiro256ss a(derive_seed(5, 0));
    Xoshiro256ss b(derive_seed(5, 1));
    int same = 0;
    for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64() ? 1 : 0;
    CHECK(same == 0);
}
