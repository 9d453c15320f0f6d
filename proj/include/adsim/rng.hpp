#pragma once

#include <cstdint>
#include <random>

namespace adsim {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Per-run seed: mix64(master ^ mix64(key)).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t key) {
    return mix64(master ^ mix64(key));
}

// mt19937_64 with distributions written out by hand. The std:: distributions
// are implementation-defined, so they would break cross-platform replay.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // [0, 1) from the top 53 bits
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal(double mean, double sd);

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace adsim
