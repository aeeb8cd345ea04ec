#pragma once

#include <cstdint>
#include <span>

namespace ramdp {

/// Bit-reproducible pseudo-random generator: xoshiro256++ seeded through
/// splitmix64. All sampling transforms are implemented here (no
/// implementation-defined standard-library distributions), so a (seed,
/// repetition) pair produces the same stream on every platform with 64-bit
/// words.
///
/// Stream derivation: repetition r of base seed b uses the splitmix64 state
/// b + (r+1) * 0x9E3779B97F4A7C15 and draws four outputs to fill the
/// xoshiro256++ state.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    /// Independent per-repetition stream from one experiment base seed.
    static Rng for_repetition(std::uint64_t base_seed, std::uint64_t repetition);

    std::uint64_t next_u64();

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit();

    /// Index drawn according to `weights` (nonnegative, summing to ~1).
    /// Any rounding residue goes to the last positive-weight entry.
    int sample(std::span<const double> weights);

  private:
    std::uint64_t state_[4];
};

/// Advances a splitmix64 state and returns the next output.
std::uint64_t splitmix64_next(std::uint64_t& state);

} // namespace ramdp
