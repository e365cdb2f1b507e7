#include <doctest.h>

#include <cmath>
#include <vector>

#include "shadowcast/rng.hpp"

using namespace shadowcast;

TEST_CASE("rng: deterministic per (seed, stream, tag)") {
    Rng a = Rng::stream(42, 7, 1);
    Rng b = Rng::stream(42, 7, 1);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng c = Rng::stream(42, 8, 1);
    Rng d = Rng::stream(42, 7, 2);
    Rng e = Rng::stream(43, 7, 1);
    Rng f = Rng::stream(42, 7, 1);
    bool all_equal = true;
    for (int i = 0; i < 16; ++i) {
        const std::uint64_t x = f.next_u64();
        all_equal = all_equal && (c.next_u64() == x) && (d.next_u64() == x) && (e.next_u64() == x);
    }
    CHECK_FALSE(all_equal);
}

TEST_CASE("rng: uniform stays in [0,1), uniform_int in range") {
    Rng r(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    for (std::size_t n : {1ul, 2ul, 7ul, 1000ul}) {
        for (int i = 0; i < 1000; ++i) CHECK(r.uniform_int(n) < n);
    }
}

TEST_CASE("rng: gaussian moments are roughly standard") {
    Rng r(2);
    const int n = 200000;
    double sum = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = r.gaussian();
        sum += x;
        ss += x * x;
    }
    const double mean = sum / n;
    const double var = ss / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("rng: categorical respects the weights") {
    Rng r(3);
    std::vector<double> w = {1.0, 3.0, 0.0, 6.0};
    std::vector<int> counts(4, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[r.categorical(w)];
    CHECK(counts[2] == 0);
    CHECK(std::abs(counts[0] / static_cast<double>(n) - 0.1) < 0.01);
    CHECK(std::abs(counts[1] / static_cast<double>(n) - 0.3) < 0.01);
    CHECK(std::abs(counts[3] / static_cast<double>(n) - 0.6) < 0.01);
}
