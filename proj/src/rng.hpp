#pragma once

#include <cstdint>

namespace pursuit {

// Deterministic xoshiro256++ generator seeded through a splitmix64 expansion.
// Streams are split by hashing (parent seed, child index) with the splitmix64
// finalizer, so disjoint child indices give statistically independent streams
// that are reproducible across runs on one platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform double in [0, 1) with 53 random bits.
    double uniform();

    // Uniform integer in [0, bound) without modulo bias.
    std::uint64_t uniform_below(std::uint64_t bound);

    // Standard normal via Marsaglia's polar rejection method. One spare
    // deviate is cached between calls.
    double normal();

    // 64-bit mixer used for stream splitting: child = mix(parent ^ mix(index)).
    static std::uint64_t child_seed(std::uint64_t parent, std::uint64_t index);

    Rng child(std::uint64_t index) const { return Rng(child_seed(seed_, index)); }

  private:
    std::uint64_t state_[4];
    std::uint64_t seed_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace pursuit
