#pragma once

#include <cstdint>

namespace recomb {

// SplitMix64 finalizer (Steele/Lea/Flood; Vigna's fixed-increment variant).
// All randomness in the project is derived from one master seed through
// this mixer, either as a sequential stream (Rng) or as keyed counter
// access (keyed_u64). Streams derived from distinct keys are independent
// for Monte Carlo purposes, which is what makes runs reproducible under
// any parallelism degree.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Keyed access: hash of (seed, k1, k2, k3) -> uniform 64 bits.
inline std::uint64_t keyed_u64(std::uint64_t seed, std::uint64_t k1,
                               std::uint64_t k2 = 0, std::uint64_t k3 = 0) {
    std::uint64_t h = mix64(seed ^ 0x8f6e151534be0f01ULL);
    h = mix64(h ^ k1);
    h = mix64(h ^ k2);
    h = mix64(h ^ k3);
    return h;
}

inline double u64_to_unit(std::uint64_t x) {
    // 53-bit mantissa, value in [0,1)
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

inline double keyed_uniform(std::uint64_t seed, std::uint64_t k1,
                            std::uint64_t k2 = 0, std::uint64_t k3 = 0) {
    return u64_to_unit(keyed_u64(seed, k1, k2, k3));
}

// Sequential stream.  Cheap to construct; derive per-task streams with
// Rng(seed, task_index) so aggregation order never depends on thread count.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(mix64(seed ^ 0x6a09e667f3bcc909ULL)) {}
    Rng(std::uint64_t seed, std::uint64_t stream)
        : state_(keyed_u64(seed, 0x5bf0362f7ba595f3ULL, stream)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double next_unit() { return u64_to_unit(next_u64()); }

    // uniform integer in {0, ..., bound-1}, Lemire rejection
    std::uint64_t next_below(std::uint64_t bound) {
        while (true) {
            std::uint64_t x = next_u64();
            __uint128_t m = static_cast<__uint128_t>(x) * bound;
            auto lo = static_cast<std::uint64_t>(m);
            if (lo >= bound || lo >= (0 - bound) % bound)
                return static_cast<std::uint64_t>(m >> 64);
        }
    }

  private:
    std::uint64_t state_;
};

}  // namespace recomb
