#pragma once

#include <cmath>
#include <cstdint>

namespace paracalc {

// splitmix64 finalizer applied to seed + (j+1)*golden; the generators' phase source.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t j) {
    std::uint64_t z = seed + (j + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline double unit_from(std::uint64_t z) { return double(z >> 11) * 0x1.0p-53; }

inline double phase(std::uint64_t seed, std::uint64_t j) {
    return 2.0 * 3.14159265358979323846 * (double(mix(seed, j)) / 18446744073709551616.0);
}

// Deterministic stream: identical output on every platform (no std::*_distribution).
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return mix(state_, counter_++); }
    double uniform() { return unit_from(next()); }
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * 3.14159265358979323846 * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::uint64_t state_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return mix(mix(seed, a), b);
}

}  // namespace paracalc
