#include "qsweep/setup.hpp"

#include <cmath>
#include <stdexcept>

namespace qsweep {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw std::invalid_argument(std::string(name) + " must be positive and finite");
    }
}

} // namespace

ExperimentSetup build_setup(double particle_mass_kg, double wavelength_m,
                            double slit_separation_m, double slit_width_sigma_m,
                            double forward_screen_distance_m,
                            std::optional<double> sideways_screen_x_m) {
    require_positive(particle_mass_kg, "particle_mass_kg");
    require_positive(wavelength_m, "wavelength_m");
    require_positive(slit_width_sigma_m, "slit_width_sigma_m");
    require_positive(forward_screen_distance_m, "forward_screen_distance_m");
    if (!(slit_separation_m >= 0.0) || !std::isfinite(slit_separation_m)) {
        throw std::invalid_argument("slit_separation_m must be nonnegative and finite");
    }
    if (sideways_screen_x_m && !std::isfinite(*sideways_screen_x_m)) {
        throw std::invalid_argument("sideways_screen_x_m must be finite");
    }

    ExperimentSetup s;
    s.particle_mass = particle_mass_kg;
    s.wavelength = wavelength_m;
    s.slit_separation = slit_separation_m;
    s.slit_width_sigma = slit_width_sigma_m;
    s.forward_screen_distance = forward_screen_distance_m;
    s.sideways_screen_x = sideways_screen_x_m;

    s.forward_speed = k_planck / (particle_mass_kg * wavelength_m);
    s.time_to_screen = forward_screen_distance_m / s.forward_speed;
    s.tau = 2.0 * particle_mass_kg * slit_width_sigma_m * slit_width_sigma_m / k_hbar;

    s.length_unit = slit_width_sigma_m;
    s.time_unit = s.tau;
    s.velocity_unit = s.length_unit / s.time_unit;
    return s;
}

} // namespace qsweep
