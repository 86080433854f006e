#pragma once

namespace qsweep {

// CODATA / exact SI values.
inline constexpr double k_pi = 3.14159265358979323846;
inline constexpr double k_planck = 6.62607015e-34;       // J s (exact)
inline constexpr double k_hbar = k_planck / (2.0 * k_pi); // J s

// Reduced Planck constant over particle mass, in internal units
// (lengths in sigma0, times in tau = 2 m sigma0^2 / hbar).  By construction
// hbar/m = 2 sigma0^2/tau, so the internal value is exactly 2.
inline constexpr double k_hbar_over_mass_internal = 2.0;
inline constexpr double k_mass_over_hbar_internal = 0.5;

} // namespace qsweep
