#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsweep/attenuation.hpp"
#include "qsweep/fields.hpp"
#include "qsweep/setup.hpp"
#include "qsweep/trajectories.hpp"

namespace qsweep {

inline constexpr int k_config_schema_version = 1;

// Thrown for anything wrong with a config document: unknown keys, missing
// keys, bad types, out-of-range physics values.  The message carries the
// JSON path of the offending field.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrajectorySettings {
    int n_per_slit = 200;
    LaunchSampler sampler = LaunchSampler::Quantile;
    std::uint64_t seed = 0;
    double rel_tol = 1e-8;
    double abs_tol_sigma = 1e-10;     // internal length units
    double max_step_tau = 1.0;        // internal time units
    double max_time_over_screen = 1.0; // multiple of the forward-screen time
    double density_floor = k_default_density_floor;
    int node_stall_limit = 64;
};

struct ScreenSettings {
    int forward_bins = 64;
    int sideways_bins = 14;
};

struct ProfileSettings {
    int grid_points = 8193;
    double halfwidth_sigma_t = 8.0;   // grid half-width in units of sigma_t
    std::optional<double> time_tau;   // profile time in tau; empty = screen time
};

// One experiment description.  Parsing is strict: schema_version must match,
// unknown keys are rejected, and the physics block has no silent defaults.
struct RunConfig {
    int schema_version = k_config_schema_version;

    // setup (required)
    double particle_mass_kg = 0.0;
    double wavelength_m = 0.0;
    double slit_separation_m = 0.0;
    double slit_width_sigma_m = 0.0;
    double forward_screen_distance_m = 0.0;
    std::optional<double> sideways_screen_x_m;

    // attenuation (required): single a or a sweep list
    AttenuationKind attenuation_kind = AttenuationKind::None;
    bool both_attenuation_modes = false; // profile/duality-table only
    std::vector<double> a_values;

    // coherence (required)
    CoherenceMode coherence = CoherenceMode::Coherent;

    TrajectorySettings trajectories;
    ScreenSettings screens;
    ProfileSettings profile;

    ExperimentSetup make_setup() const;
    IntegratorConfig make_integrator_config(const ExperimentSetup& setup) const;

    // unattenuated channels in internal units
    PacketParams slit1_packet() const;
    PacketParams slit2_packet() const;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

} // namespace qsweep
