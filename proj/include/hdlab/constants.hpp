#pragma once

namespace hdlab::constants {

// 2019 SI exact values.
inline constexpr double planck = 6.62607015e-34;          // J s
inline constexpr double light_speed = 299792458.0;        // m/s
inline constexpr double elementary_charge = 1.602176634e-19;  // C

inline constexpr double pi = 3.14159265358979323846;

}  // namespace hdlab::constants
