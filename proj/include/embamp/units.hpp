#pragma once

#include <numbers>

namespace embamp::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// user-facing MHz/GHz -> angular rad/s
constexpr double mhz(double f) { return two_pi * 1e6 * f; }
constexpr double ghz(double f) { return two_pi * 1e9 * f; }
constexpr double to_mhz(double w) { return w / (two_pi * 1e6); }

constexpr double ns(double t) { return t * 1e-9; }
constexpr double us(double t) { return t * 1e-6; }
constexpr double to_us(double t) { return t * 1e6; }

}  // namespace embamp::units
