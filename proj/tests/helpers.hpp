#pragma once

#include <cmath>
#include <vector>

#include "qsweep/setup.hpp"

namespace qsweep::testing {

inline constexpr double k_neutron_mass = 1.675e-27; // kg
inline constexpr double k_lambda = 1.8e-9;          // m
inline constexpr double k_screen_distance = 5.0;    // m

// Near-field geometry: the reference slit layout (sigma0 = 22 um, d = 200 um).
inline ExperimentSetup reference_setup() {
    return build_setup(k_neutron_mass, k_lambda, 200e-6, 22e-6, k_screen_distance);
}

// Far-field geometry: narrow slits (sigma0 = 1 um) so the screen sits deep in
// the dispersion regime; the swept channel crosses a 3 mm sideways screen well
// before the forward screen while the strong fan stays short of it.
inline ExperimentSetup farfield_setup(std::optional<double> sideways_x = std::nullopt) {
    return build_setup(k_neutron_mass, k_lambda, 200e-6, 1e-6, k_screen_distance, sideways_x);
}

// Fringe geometry: even narrower slits (sigma0 = 0.35 um) flatten the Gaussian
// envelopes across many fringes, so extremum contrast tracks the closed-form
// visibility even at the weakest deterministic modulation (a = 0.0025).
inline ExperimentSetup fringe_setup() {
    return build_setup(k_neutron_mass, k_lambda, 200e-6, 0.35e-6, k_screen_distance);
}

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * i / (n - 1);
    return xs;
}

inline double trapezoid(const std::vector<double>& xs, const std::vector<double>& ys) {
    double area = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        area += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
    }
    return area;
}

template <typename Fn>
double central_diff(Fn&& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double rel_err(double got, double expect) {
    return std::fabs(got - expect) / std::max(std::fabs(expect), 1e-300);
}

} // namespace qsweep::testing
