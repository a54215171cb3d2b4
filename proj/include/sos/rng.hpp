#pragma once

#include <cstdint>

namespace sos {

// Counter-based splitmix64, used both as a standalone generator and as the
// stream-splitting rule: replica k of master seed s draws from
// Rng(mix(s, k)).  Keeping the generator self-contained (instead of
// std::mt19937_64 + std::uniform_real_distribution) makes trajectories
// bit-reproducible across standard library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound), bound >= 1.  Unbiased rejection sampling.
    std::uint64_t next_below(std::uint64_t bound) {
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t x = next_u64();
            if (x >= threshold) return x % bound;
        }
    }

    bool next_bit() { return (next_u64() >> 63) != 0; }

  private:
    std::uint64_t state_;
};

// Documented stream-splitting rule: stream(seed, k) = Rng(mix(seed, k)).
inline std::uint64_t mix_stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Rng make_stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(mix_stream(seed, index));
}

} // namespace sos
