#pragma once

#include <optional>
#include <string>

#include "qsweep/constants.hpp"

namespace qsweep {

// Physical geometry and particle constants for one run, plus the derived
// nondimensionalization.  All core math runs in internal units: lengths in
// sigma0, times in tau = 2 m sigma0^2 / hbar, velocities in sigma0/tau.
// In these units hbar/m == 2 exactly.
struct ExperimentSetup {
    // SI inputs
    double particle_mass = 0.0;           // kg
    double wavelength = 0.0;              // m (de Broglie)
    double slit_separation = 0.0;         // m, center to center
    double slit_width_sigma = 0.0;        // m, sigma0 of each Gaussian slit
    double forward_screen_distance = 0.0; // m
    std::optional<double> sideways_screen_x; // m, signed; empty = no sideways screen

    // derived, SI
    double forward_speed = 0.0;  // m/s, h/(m lambda)
    double time_to_screen = 0.0; // s, L / forward_speed
    double tau = 0.0;            // s, 2 m sigma0^2 / hbar

    // internal scale factors
    double length_unit = 0.0;   // m per internal length (= sigma0)
    double time_unit = 0.0;     // s per internal time (= tau)
    double velocity_unit = 0.0; // m/s per internal velocity (= sigma0/tau)

    double to_internal_length(double x_m) const { return x_m / length_unit; }
    double to_si_length(double x) const { return x * length_unit; }
    double to_internal_time(double t_s) const { return t_s / time_unit; }
    double to_si_time(double t) const { return t * time_unit; }
    double to_internal_velocity(double v_si) const { return v_si / velocity_unit; }
    double to_si_velocity(double v) const { return v * velocity_unit; }

    // geometry in internal units
    double separation_internal() const { return slit_separation / length_unit; }
    double slit1_center() const { return -0.5 * separation_internal(); }
    double slit2_center() const { return +0.5 * separation_internal(); }
    double screen_time_internal() const { return time_to_screen / time_unit; }
    double forward_speed_internal() const { return forward_speed / velocity_unit; }
    bool has_sideways_screen() const { return sideways_screen_x.has_value(); }
    double sideways_x_internal() const { return *sideways_screen_x / length_unit; }
};

// Validates SI parameters and fills in the derived quantities.
// Throws std::invalid_argument naming the offending parameter.
ExperimentSetup build_setup(double particle_mass_kg, double wavelength_m,
                            double slit_separation_m, double slit_width_sigma_m,
                            double forward_screen_distance_m,
                            std::optional<double> sideways_screen_x_m = std::nullopt);

} // namespace qsweep
