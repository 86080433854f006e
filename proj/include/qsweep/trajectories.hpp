#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qsweep/fields.hpp"
#include "qsweep/setup.hpp"

namespace qsweep {

enum class SlitLabel : int { Slit1 = 1, Slit2 = 2 };

enum class Termination {
    ReachedForwardScreen,
    ReachedSidewaysScreen,
    MaxTime,
    NodeStall,
};

const char* to_string(Termination t);

struct TrajectoryPoint {
    double t = 0.0; // internal time
    double x = 0.0; // internal transverse position
    double y = 0.0; // internal forward position, y = v_forward * t
};

// Time-ordered averaged path for one launch.  Points are the accepted
// integrator steps; t and y are strictly increasing.
struct Trajectory {
    SlitLabel source_slit = SlitLabel::Slit1;
    std::vector<TrajectoryPoint> points;
    Termination termination = Termination::MaxTime;

    const TrajectoryPoint& back() const { return points.back(); }
};

// Explicit 4th-order one-step method (Fehlberg 4(5) pair) with embedded-error
// adaptive step control.  Tolerances and the density floor are in internal
// units.
struct IntegratorConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;         // internal length
    double max_step = 1.0;          // internal time
    double initial_step = 1e-3;     // internal time
    double max_time = 0.0;          // internal; 0 = stop at the forward screen
    double density_floor = k_default_density_floor;
    int node_stall_limit = 64;      // consecutive flagged attempts before NodeStall
};

struct LaunchPoint {
    double x0 = 0.0;
    SlitLabel slit = SlitLabel::Slit1;
};

// Launch positions at t = 0, n per slit.  The default sampler places
// equal-probability-mass quantiles of each slit's initial Gaussian R^2
// at p_k = k/(n+1) (deterministic and reproducible); the pseudo-random
// sampler draws from the same Gaussian keyed by (seed, slit, index).
enum class LaunchSampler { Quantile, Random };

std::vector<LaunchPoint> launch_positions(const PacketParams& slit1,
                                          const PacketParams& slit2,
                                          int n_per_slit,
                                          LaunchSampler sampler = LaunchSampler::Quantile,
                                          std::uint64_t seed = 0);

// Everything the integrator needs besides the field: forward motion and the
// absorbing screens.
struct ScreenGeometry {
    double forward_speed = 0.0; // internal velocity
    double screen_time = 0.0;   // internal time of the forward screen
    bool has_sideways = false;
    double sideways_x = 0.0;    // internal position of the sideways screen
};

ScreenGeometry screen_geometry(const ExperimentSetup& setup);

// Integrates dx/dt = v_tot(x, t) from (x0, t=0) until a screen is reached,
// max_time elapses, or the density floor stalls the step control.  Records
// every accepted step; never emits non-finite coordinates.
Trajectory integrate(double x0, SlitLabel slit, const TwoChannelField& field,
                     const ScreenGeometry& geom, const IntegratorConfig& config);

// Locus where the diffusive velocities balance, u1 + u2 = 0.  For equal
// widths this is the midpoint of the packet centers at time t, independent of
// the weights; for unequal widths the closed-form linear equation is solved.
double no_crossing_locus(const PacketParams& slit1, const PacketParams& slit2, double t);

// Number of sign changes of x(t) - locus(t) summed over all trajectories.
long count_midline_crossings(const std::vector<Trajectory>& trajectories,
                             const std::function<double(double)>& locus);

long count_midline_crossings(const std::vector<Trajectory>& trajectories,
                             const PacketParams& slit1, const PacketParams& slit2);

// Linear interpolation of a trajectory's x at time t (clamped to its span).
double position_at(const Trajectory& traj, double t);

} // namespace qsweep
