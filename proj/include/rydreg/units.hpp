#pragma once

#include <numbers>

namespace rydreg::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Atomic unit of time in seconds (CODATA 2018).
inline constexpr double au_time_s = 2.4188843265857e-17;
inline constexpr double ps_per_au = au_time_s * 1e12;
inline constexpr double au_per_ps = 1.0 / ps_per_au;
inline constexpr double au_per_fs = au_per_ps * 1e-3;

constexpr double ps_to_au(double t_ps) { return t_ps * au_per_ps; }
constexpr double au_to_ps(double t_au) { return t_au * ps_per_au; }

constexpr double deg_to_rad(double deg) { return deg * pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / pi; }

}  // namespace rydreg::units
