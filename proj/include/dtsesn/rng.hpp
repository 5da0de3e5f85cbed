#pragma once

#include <cstdint>
#include <random>

namespace dtsesn {

/// Seeded uniform generator with an explicit output mapping.
/// std::mt19937_64 itself is fully specified by the standard, but the
/// standard distributions are not; mapping raw 64-bit words by hand keeps
/// streams bit-reproducible across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform on [-1, 1).
    double symmetric() { return 2.0 * uniform01() - 1.0; }

private:
    std::mt19937_64 engine_;
};

}  // namespace dtsesn
