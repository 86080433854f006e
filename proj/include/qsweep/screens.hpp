#pragma once

#include <optional>
#include <vector>

#include "qsweep/attenuation.hpp"
#include "qsweep/fields.hpp"
#include "qsweep/setup.hpp"
#include "qsweep/trajectories.hpp"

namespace qsweep {

enum class ScreenOrientation { Forward, Sideways };

struct Arrival {
    double coordinate = 0.0; // x on the forward screen, y on the sideways screen
    SlitLabel slit = SlitLabel::Slit1;
};

struct ScreenSpec {
    ScreenOrientation orientation = ScreenOrientation::Forward;
    int nbins = 64;
    bool auto_range = true;
    double lo = 0.0; // used when auto_range is false
    double hi = 0.0;
};

// Binned arrivals with per-slit provenance.  counts_total == counts_slit1 +
// counts_slit2 per bin; the shortfall against the launched count is whatever
// terminated off-screen (max-time or node stalls), reported per slit.
struct ScreenRecord {
    ScreenOrientation orientation = ScreenOrientation::Forward;
    double bin_lo = 0.0;
    double bin_hi = 0.0;
    int nbins = 0;
    std::vector<long> counts_total;
    std::vector<long> counts_slit1;
    std::vector<long> counts_slit2;
    std::vector<Arrival> arrivals;
    long launched_slit1 = 0;
    long launched_slit2 = 0;
    long missed_slit1 = 0; // launched but not registered on this screen
    long missed_slit2 = 0;

    double bin_center(int i) const {
        return bin_lo + (i + 0.5) * (bin_hi - bin_lo) / nbins;
    }
};

ScreenRecord record(const std::vector<Trajectory>& trajectories, const ScreenSpec& spec);

// Analytic screen-plane intensity at time t on the given grid, normalized to
// unit area over the grid.  Stochastic mode evaluates Ptot with the weighted
// packets; deterministic mode evaluates the (1-a) single-slit / a double-slit
// mixture.  mass_fraction compares the raw area against the closed-form total
// so a too-narrow grid is flagged instead of silently renormalized away.
struct ProfileResult {
    std::vector<double> intensity; // normalized, per internal length
    double raw_area = 0.0;
    double mass_fraction = 1.0;
    bool narrow_grid_warning = false;
};

ProfileResult analytic_profile(const PacketParams& slit1, const PacketParams& slit2,
                               const AttenuationMode& attenuation, CoherenceMode coherence,
                               double t, const std::vector<double>& grid);

// Fringe contrast measured on a profile: extrema are located on the grid,
// refined parabolically, restricted to the window where the unweighted
// Gaussian envelopes agree within the given ratio, and averaged in symmetric
// pairs around the central fringe (at most max_fringes maxima).
struct MeasuredVisibility {
    double value = 0.0;
    int n_maxima = 0;
    int n_minima = 0;
    bool ok = false;
};

MeasuredVisibility extract_visibility(const std::vector<double>& xs,
                                      const std::vector<double>& intensity,
                                      double window_center, double window_halfwidth,
                                      int max_fringes = 5);

// Half-width of the region around the midpoint where the two unweighted
// envelopes R1^2 and R2^2 agree within envelope_ratio (default 1.1).
double equal_envelope_halfwidth(const PacketParams& slit1, const PacketParams& slit2,
                                double t, double envelope_ratio = 1.1);

struct DualityMetrics {
    double visibility = 0.0;        // V = 2 sqrt(a)/(1+a)
    double distinguishability = 0.0; // D = (1-a)/(1+a)
    double residual = 0.0;          // |D^2 + V^2 - 1|
};

DualityMetrics duality_metrics(double a);

// Bunching summary for the attenuated channel on the sideways screen.
// bunching_ratio compares the interquartile spread of the arrival deflection
// angles against the spread the same launch quantiles would have under free
// single-channel dispersion observed at the forward screen time.
struct SweeperMetrics {
    double median_angle_rad = 0.0;
    double iqr_arrival_y = 0.0;      // internal length
    double iqr_angle = 0.0;
    double launch_fan_angle_iqr = 0.0;
    double bunching_ratio = 0.0;
    long n_sideways = 0;             // n(a) registered sideways
    long n_forward = 0;              // slit-2 arrivals on the forward screen
    double sideways_fraction = 0.0;  // of slit-2 launches
    bool ok = false;
};

SweeperMetrics sweeper_metrics(const std::vector<Trajectory>& trajectories,
                               const PacketParams& attenuated_slit,
                               const ScreenGeometry& geom);

// Local maxima of a histogram with at least the given prominence.
int count_histogram_modes(const std::vector<long>& counts, long min_prominence);

// Type-7 linear-interpolation quantile of an unsorted sample.
double quantile(std::vector<double> values, double p);

} // namespace qsweep
