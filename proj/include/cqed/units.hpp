#pragma once

#include <numbers>

namespace cqed {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// The CLI and all reporting use ordinary frequencies in MHz (i.e. omega/2pi);
// everything internal is an angular frequency in rad/s.
inline constexpr double mhz_to_angular(double mhz) { return two_pi * mhz * 1e6; }
inline constexpr double angular_to_mhz(double rad_per_s) { return rad_per_s / (two_pi * 1e6); }

} // namespace cqed
