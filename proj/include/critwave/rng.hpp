#ifndef CRITWAVE_RNG_HPP
#define CRITWAVE_RNG_HPP

#include <cstdint>

namespace critwave {

// SplitMix64: 64-bit counter-based generator. Cheap, splittable (split()
// derives an independent stream), and fully determined by the seed, which
// is what the reproducibility contract of the CLI needs.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform(double a, double b) {
        const double u = double(next() >> 11) * 0x1.0p-53;  // [0,1)
        return a + (b - a) * u;
    }

    SplitMix64 split() { return SplitMix64(next()); }
};

}  // namespace critwave

#endif
