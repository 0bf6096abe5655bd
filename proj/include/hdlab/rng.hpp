#pragma once

#include <cmath>
#include <cstdint>

#include "hdlab/constants.hpp"

namespace hdlab::rng {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Counter-based stream: every value is a pure function of (seed, stream, counter),
// so draws can be generated in any order and from any thread with identical results.
class CounterStream {
  public:
    CounterStream() = default;
    CounterStream(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(mix64(seed ^ mix64(stream * 0xD1B54A32D192ED03ull))) {}

    std::uint64_t bits(std::uint64_t counter) const noexcept {
        return mix64(key_ + counter * 0x9E3779B97F4A7C15ull);
    }

    // uniform in [0,1)
    double uniform(std::uint64_t counter) const noexcept {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    // Box-Muller; one pair of independent standard normals per pair index.
    void normal_pair(std::uint64_t pair_index, double& z0, double& z1) const noexcept {
        // u1 in (0,1] keeps the log finite
        const double u1 = (static_cast<double>(bits(2 * pair_index) >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(bits(2 * pair_index + 1) >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * constants::pi * u2;
        z0 = r * std::cos(a);
        z1 = r * std::sin(a);
    }

    double normal(std::uint64_t index) const noexcept {
        double z0, z1;
        normal_pair(index / 2, z0, z1);
        return (index % 2 == 0) ? z0 : z1;
    }

  private:
    std::uint64_t key_ = 0;
};

}  // namespace hdlab::rng
