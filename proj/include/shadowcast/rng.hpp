#ifndef SHADOWCAST_RNG_HPP
#define SHADOWCAST_RNG_HPP

#include <cmath>
#include <cstdint>
#include <span>

namespace shadowcast {

// Counter-based splitmix64 generator. Streams derived from (seed, stream, tag)
// are independent, so per-walk / per-row streams give identical results under
// serial and sharded sampling.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(mix(seed)) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static Rng stream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t tag = 0) {
        Rng r(0);
        r.state_ = mix(mix(seed) ^ mix(stream_id + 0x632be59bd9b4e019ULL) ^ mix(tag + 0x9e6c63d0876a9a47ULL));
        return r;
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform double in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n), n >= 1; rejection sampling keeps it unbiased
    std::size_t uniform_int(std::size_t n) {
        const std::uint64_t bound = n;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return static_cast<std::size_t>(x % bound);
    }

    // standard normal via Box-Muller (pairs cached)
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // index ~ weights / sum(weights); weights nonnegative, sum > 0
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double x = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (x < acc) return i;
        }
        return weights.size() - 1;
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace shadowcast

#endif
