#pragma once

#include <cstdint>

namespace beamplan {

/// Counter-based deterministic generator (splitmix64 mixing). The same
/// (seed, stream) pair yields the same sequence on every platform, and
/// distinct streams are independent, so parallel consumers cannot perturb
/// each other.
class Prng {
public:
    explicit Prng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();
    double next_unit();  // [0, 1), 53-bit resolution
    double uniform(double lo, double hi);
    int next_below(int n);  // [0, n)

private:
    std::uint64_t counter_;
};

}  // namespace beamplan
