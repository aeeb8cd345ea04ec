#include "ramdp/rng.hpp"

#include <stdexcept>

namespace ramdp {

std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}
} // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_)
        word = splitmix64_next(s);
}

Rng Rng::for_repetition(std::uint64_t base_seed, std::uint64_t repetition) {
    return Rng(base_seed + (repetition + 1) * 0x9E3779B97F4A7C15ULL);
}

std::uint64_t Rng::next_u64() {
    std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int Rng::sample(std::span<const double> weights) {
    if (weights.empty())
        throw std::invalid_argument("Rng::sample: empty weight vector");
    double u = next_unit();
    double cum = 0.0;
    int last_positive = -1;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0)
            last_positive = static_cast<int>(i);
        cum += weights[i];
        if (u < cum)
            return static_cast<int>(i);
    }
    if (last_positive < 0)
        throw std::invalid_argument("Rng::sample: all weights zero");
    return last_positive;
}

} // namespace ramdp
