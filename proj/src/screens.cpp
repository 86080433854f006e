#include "qsweep/screens.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qsweep {

namespace {

double trapezoid(const std::vector<double>& xs, const std::vector<double>& ys) {
    double area = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        area += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
    }
    return area;
}

// Re<psi1|psi2> for equal-width, equal-drift Gaussians: time invariant.
double channel_overlap(const PacketParams& p1, const PacketParams& p2) {
    if (p1.sigma0 != p2.sigma0 || p1.group_velocity != p2.group_velocity) return 0.0;
    const double d = p2.center - p1.center;
    return std::exp(-d * d / (8.0 * p1.sigma0 * p1.sigma0));
}

} // namespace

ScreenRecord record(const std::vector<Trajectory>& trajectories, const ScreenSpec& spec) {
    if (spec.nbins < 1) {
        throw std::invalid_argument("record: nbins must be >= 1");
    }
    if (!spec.auto_range && !(spec.hi > spec.lo)) {
        throw std::invalid_argument("record: bin range must have positive width");
    }

    ScreenRecord rec;
    rec.orientation = spec.orientation;
    rec.nbins = spec.nbins;

    const Termination want = (spec.orientation == ScreenOrientation::Forward)
                                 ? Termination::ReachedForwardScreen
                                 : Termination::ReachedSidewaysScreen;
    for (const Trajectory& traj : trajectories) {
        const bool is_slit1 = traj.source_slit == SlitLabel::Slit1;
        (is_slit1 ? rec.launched_slit1 : rec.launched_slit2) += 1;
        if (traj.termination == want && !traj.points.empty()) {
            const TrajectoryPoint& p = traj.back();
            const double coord = (spec.orientation == ScreenOrientation::Forward) ? p.x : p.y;
            rec.arrivals.push_back({coord, traj.source_slit});
        } else {
            (is_slit1 ? rec.missed_slit1 : rec.missed_slit2) += 1;
        }
    }

    if (spec.auto_range) {
        if (rec.arrivals.empty()) {
            rec.bin_lo = 0.0;
            rec.bin_hi = 1.0;
        } else {
            auto [mn, mx] = std::minmax_element(
                rec.arrivals.begin(), rec.arrivals.end(),
                [](const Arrival& a, const Arrival& b) { return a.coordinate < b.coordinate; });
            rec.bin_lo = mn->coordinate;
            rec.bin_hi = mx->coordinate;
            if (!(rec.bin_hi > rec.bin_lo)) {
                rec.bin_lo -= 0.5;
                rec.bin_hi += 0.5;
            }
        }
    } else {
        rec.bin_lo = spec.lo;
        rec.bin_hi = spec.hi;
    }

    rec.counts_total.assign(rec.nbins, 0);
    rec.counts_slit1.assign(rec.nbins, 0);
    rec.counts_slit2.assign(rec.nbins, 0);
    const double width = (rec.bin_hi - rec.bin_lo) / rec.nbins;
    for (const Arrival& a : rec.arrivals) {
        int idx = static_cast<int>(std::floor((a.coordinate - rec.bin_lo) / width));
        idx = std::clamp(idx, 0, rec.nbins - 1);
        rec.counts_total[idx] += 1;
        (a.slit == SlitLabel::Slit1 ? rec.counts_slit1 : rec.counts_slit2)[idx] += 1;
    }
    return rec;
}

ProfileResult analytic_profile(const PacketParams& slit1, const PacketParams& slit2,
                               const AttenuationMode& attenuation, CoherenceMode coherence,
                               double t, const std::vector<double>& grid) {
    if (grid.size() < 2) {
        throw std::invalid_argument("analytic_profile: grid needs at least 2 points");
    }
    const double a = attenuation.a;
    ProfileResult out;
    out.intensity.resize(grid.size());

    double expected_area = 0.0;
    const double s12 = (coherence == CoherenceMode::Coherent) ? channel_overlap(slit1, slit2) : 0.0;
    const double w1 = slit1.weight, w2 = slit2.weight;

    if (attenuation.kind == AttenuationKind::Deterministic) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const PacketSample s1 = packet_eval(slit1, grid[i], t);
            const PacketSample s2 = packet_eval(slit2, grid[i], t);
            const double p1_single = s1.amplitude * s1.amplitude;
            const FieldSample both = evaluate_fields(s1, s2, coherence);
            out.intensity[i] = deterministic_intensity(p1_single, both.P1, both.P2, a);
        }
        expected_area = (1.0 - a) * w1 * w1
                      + a * (w1 * w1 + w2 * w2 + 2.0 * w1 * w2 * s12);
    } else {
        PacketParams att = slit2;
        if (attenuation.kind == AttenuationKind::Stochastic) att = apply_stochastic(slit2, a);
        const double w2a = att.weight;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const PacketSample s1 = packet_eval(slit1, grid[i], t);
            const PacketSample s2 = packet_eval(att, grid[i], t);
            out.intensity[i] = evaluate_fields(s1, s2, coherence).Ptot;
        }
        expected_area = w1 * w1 + w2a * w2a + 2.0 * w1 * w2a * s12;
    }

    std::vector<double> xs(grid.begin(), grid.end());
    out.raw_area = trapezoid(xs, out.intensity);
    out.mass_fraction = (expected_area > 0.0) ? out.raw_area / expected_area : 1.0;
    out.narrow_grid_warning = out.mass_fraction < 0.999;
    if (out.raw_area > 0.0) {
        for (double& v : out.intensity) v /= out.raw_area;
    }
    return out;
}

double equal_envelope_halfwidth(const PacketParams& slit1, const PacketParams& slit2,
                                double t, double envelope_ratio) {
    const double d = std::fabs(slit2.center - slit1.center);
    if (d == 0.0) return std::numeric_limits<double>::infinity();
    const double sig = dispersed_sigma(slit1, t);
    // log(R1^2/R2^2) = -2 x d / (2 sigma_t^2) around the midpoint
    return std::log(envelope_ratio) * sig * sig / d;
}

namespace {

struct Extremum {
    double x = 0.0;
    double value = 0.0;
    bool is_max = false;
};

std::vector<Extremum> find_extrema(const std::vector<double>& xs,
                                   const std::vector<double>& ys,
                                   std::size_t lo, std::size_t hi) {
    std::vector<Extremum> out;
    for (std::size_t i = lo + 1; i + 1 < hi; ++i) {
        const double ym = ys[i - 1], y0 = ys[i], yp = ys[i + 1];
        const bool is_max = y0 > ym && y0 >= yp;
        const bool is_min = y0 < ym && y0 <= yp;
        if (!is_max && !is_min) continue;
        // parabolic refinement
        const double denom = ym - 2.0 * y0 + yp;
        double x_star = xs[i];
        double y_star = y0;
        if (denom != 0.0) {
            const double delta = 0.5 * (ym - yp) / denom;
            x_star = xs[i] + delta * (xs[i + 1] - xs[i]);
            y_star = y0 - 0.25 * (ym - yp) * delta;
        }
        if (is_min) y_star = std::max(y_star, 0.0); // intensity cannot undershoot a node
        out.push_back({x_star, y_star, is_max});
    }
    return out;
}

} // namespace

MeasuredVisibility extract_visibility(const std::vector<double>& xs,
                                      const std::vector<double>& intensity,
                                      double window_center, double window_halfwidth,
                                      int max_fringes) {
    MeasuredVisibility out;
    if (xs.size() != intensity.size() || xs.size() < 5) return out;

    const double wlo = window_center - window_halfwidth;
    const double whi = window_center + window_halfwidth;
    const std::size_t lo = std::lower_bound(xs.begin(), xs.end(), wlo) - xs.begin();
    const std::size_t hi = std::upper_bound(xs.begin(), xs.end(), whi) - xs.begin();
    if (hi <= lo + 4) return out;

    const std::vector<Extremum> ext = find_extrema(xs, intensity, lo, hi);

    std::vector<Extremum> maxima, minima;
    for (const Extremum& e : ext) (e.is_max ? maxima : minima).push_back(e);
    if (maxima.empty() || minima.empty()) return out;

    // central maximum plus symmetric companions, at most max_fringes maxima
    std::sort(maxima.begin(), maxima.end(), [&](const Extremum& a, const Extremum& b) {
        return std::fabs(a.x - window_center) < std::fabs(b.x - window_center);
    });
    if (static_cast<int>(maxima.size()) > max_fringes) maxima.resize(max_fringes);
    double outer = 0.0;
    for (const Extremum& e : maxima) outer = std::max(outer, std::fabs(e.x - window_center));

    double sum_max = 0.0;
    for (const Extremum& e : maxima) sum_max += e.value;
    const double mean_max = sum_max / maxima.size();

    double sum_min = 0.0;
    int n_min = 0;
    for (const Extremum& e : minima) {
        if (std::fabs(e.x - window_center) <= outer + 1e-12) {
            sum_min += e.value;
            ++n_min;
        }
    }
    if (n_min == 0) return out;
    const double mean_min = sum_min / n_min;

    out.value = (mean_max - mean_min) / (mean_max + mean_min);
    out.n_maxima = static_cast<int>(maxima.size());
    out.n_minima = n_min;
    out.ok = true;
    return out;
}

DualityMetrics duality_metrics(double a) {
    validate_transmission(a);
    DualityMetrics m;
    m.distinguishability = (1.0 - a) / (1.0 + a);
    m.visibility = 2.0 * std::sqrt(a) / (1.0 + a);
    m.residual = std::fabs(m.distinguishability * m.distinguishability
                         + m.visibility * m.visibility - 1.0);
    return m;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile: empty sample");
    std::sort(values.begin(), values.end());
    const double pos = p * (values.size() - 1);
    const std::size_t i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= values.size()) return values.back();
    const double w = pos - i;
    return values[i] * (1.0 - w) + values[i + 1] * w;
}

SweeperMetrics sweeper_metrics(const std::vector<Trajectory>& trajectories,
                               const PacketParams& attenuated_slit,
                               const ScreenGeometry& geom) {
    SweeperMetrics m;
    std::vector<double> arrival_y;
    std::vector<double> arrival_angle;
    std::vector<double> launch_x;
    for (const Trajectory& traj : trajectories) {
        if (traj.source_slit != SlitLabel::Slit2 || traj.points.empty()) continue;
        launch_x.push_back(traj.points.front().x);
        if (traj.termination == Termination::ReachedSidewaysScreen) {
            const TrajectoryPoint& p = traj.back();
            arrival_y.push_back(p.y);
            arrival_angle.push_back(std::atan2(p.x, p.y));
        } else if (traj.termination == Termination::ReachedForwardScreen) {
            m.n_forward += 1;
        }
    }
    m.n_sideways = static_cast<long>(arrival_y.size());
    if (!launch_x.empty()) {
        m.sideways_fraction = static_cast<double>(m.n_sideways) / launch_x.size();
    }
    if (arrival_y.empty()) return m;

    m.median_angle_rad = quantile(arrival_angle, 0.5);
    m.iqr_arrival_y = quantile(arrival_y, 0.75) - quantile(arrival_y, 0.25);
    m.iqr_angle = quantile(arrival_angle, 0.75) - quantile(arrival_angle, 0.25);

    // the same launch quantiles pushed through free single-channel dispersion
    // to the forward screen define the un-swept comparison fan
    const double sig_ratio = dispersed_sigma(attenuated_slit, geom.screen_time)
                           / attenuated_slit.sigma0;
    const double y_screen = geom.forward_speed * geom.screen_time;
    std::vector<double> free_angle;
    free_angle.reserve(launch_x.size());
    for (double x0 : launch_x) {
        const double x_free = attenuated_slit.center
                            + (x0 - attenuated_slit.center) * sig_ratio
                            + attenuated_slit.group_velocity * geom.screen_time;
        free_angle.push_back(std::atan2(x_free, y_screen));
    }
    m.launch_fan_angle_iqr = quantile(free_angle, 0.75) - quantile(free_angle, 0.25);
    m.bunching_ratio = (m.launch_fan_angle_iqr > 0.0)
                           ? m.iqr_angle / m.launch_fan_angle_iqr
                           : 0.0;
    m.ok = true;
    return m;
}

int count_histogram_modes(const std::vector<long>& counts, long min_prominence) {
    // collapse plateaus, then classify peaks by prominence against the
    // deepest valley separating them from a higher neighbor
    std::vector<long> vals;
    std::vector<std::size_t> first_idx;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (vals.empty() || counts[i] != vals.back()) {
            vals.push_back(counts[i]);
            first_idx.push_back(i);
        }
    }
    const std::size_t n = vals.size();
    int modes = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool left_ok = (i == 0) || vals[i - 1] < vals[i];
        const bool right_ok = (i + 1 == n) || vals[i + 1] < vals[i];
        if (!(left_ok && right_ok)) continue;
        // valley floor toward the nearest dominating value on each side; an
        // equal-height peak to the left dominates (persistence tie-break), so
        // twin peaks over a shallow dip merge into one mode.  An empty side
        // does not constrain the prominence.
        const long unbounded = std::numeric_limits<long>::min();
        long left_floor = (i == 0) ? unbounded : vals[i];
        for (std::size_t j = i; j-- > 0;) {
            left_floor = std::min(left_floor, vals[j]);
            if (vals[j] >= vals[i]) break;
        }
        long right_floor = (i + 1 == n) ? unbounded : vals[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            right_floor = std::min(right_floor, vals[j]);
            if (vals[j] > vals[i]) break;
        }
        const long floor_val = std::max(left_floor, right_floor);
        const long prominence = (floor_val == unbounded) ? vals[i] : vals[i] - floor_val;
        if (prominence >= min_prominence) ++modes;
    }
    return modes;
}

} // namespace qsweep
