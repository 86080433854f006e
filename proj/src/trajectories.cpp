#include "qsweep/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "qsweep/probit.hpp"

namespace qsweep {

const char* to_string(Termination t) {
    switch (t) {
        case Termination::ReachedForwardScreen: return "forward_screen";
        case Termination::ReachedSidewaysScreen: return "sideways_screen";
        case Termination::MaxTime: return "max_time";
        case Termination::NodeStall: return "node_stall";
    }
    return "unknown";
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t bits) {
    // 53 random bits into (0, 1)
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace

std::vector<LaunchPoint> launch_positions(const PacketParams& slit1,
                                          const PacketParams& slit2,
                                          int n_per_slit,
                                          LaunchSampler sampler,
                                          std::uint64_t seed) {
    if (n_per_slit < 1) {
        throw std::invalid_argument("launch_positions: n_per_slit must be >= 1");
    }
    std::vector<LaunchPoint> out;
    out.reserve(2 * static_cast<std::size_t>(n_per_slit));
    const PacketParams* slits[2] = {&slit1, &slit2};
    for (int s = 0; s < 2; ++s) {
        const PacketParams& p = *slits[s];
        const SlitLabel label = (s == 0) ? SlitLabel::Slit1 : SlitLabel::Slit2;
        for (int k = 1; k <= n_per_slit; ++k) {
            double z;
            if (sampler == LaunchSampler::Quantile) {
                z = probit(static_cast<double>(k) / (n_per_slit + 1.0));
            } else {
                const std::uint64_t key = splitmix64(seed ^ splitmix64(
                    (static_cast<std::uint64_t>(s) << 32) | static_cast<std::uint64_t>(k)));
                z = probit(uniform01(key));
            }
            out.push_back({p.center + p.sigma0 * z, label});
        }
    }
    return out;
}

ScreenGeometry screen_geometry(const ExperimentSetup& setup) {
    ScreenGeometry g;
    g.forward_speed = setup.forward_speed_internal();
    g.screen_time = setup.screen_time_internal();
    g.has_sideways = setup.has_sideways_screen();
    g.sideways_x = g.has_sideways ? setup.sideways_x_internal() : 0.0;
    return g;
}

namespace {

// Fehlberg 4(5) tableau
constexpr double c2 = 1.0 / 4.0, c3 = 3.0 / 8.0, c4 = 12.0 / 13.0, c5 = 1.0, c6 = 1.0 / 2.0;
constexpr double a21 = 1.0 / 4.0;
constexpr double a31 = 3.0 / 32.0, a32 = 9.0 / 32.0;
constexpr double a41 = 1932.0 / 2197.0, a42 = -7200.0 / 2197.0, a43 = 7296.0 / 2197.0;
constexpr double a51 = 439.0 / 216.0, a52 = -8.0, a53 = 3680.0 / 513.0, a54 = -845.0 / 4104.0;
constexpr double a61 = -8.0 / 27.0, a62 = 2.0, a63 = -3544.0 / 2565.0, a64 = 1859.0 / 4104.0,
                 a65 = -11.0 / 40.0;
// 4th-order solution weights
constexpr double b41 = 25.0 / 216.0, b43 = 1408.0 / 2565.0, b44 = 2197.0 / 4104.0,
                 b45 = -1.0 / 5.0;
// 5th-order weights (error estimate)
constexpr double b51 = 16.0 / 135.0, b53 = 6656.0 / 12825.0, b54 = 28561.0 / 56430.0,
                 b55 = -9.0 / 50.0, b56 = 2.0 / 55.0;

struct StageResult {
    double x4 = 0.0;
    double err = 0.0;
    bool node = false;
    bool finite = true;
};

StageResult try_step(const TwoChannelField& field, double t, double x, double h, double k1) {
    StageResult r;
    auto eval = [&](double ts, double xs, double& k, bool& node_any) {
        const VelocityResult v = field.velocity(xs, ts);
        node_any = node_any || v.node;
        k = v.v;
    };
    bool node_any = false;
    double k2, k3, k4, k5, k6;
    eval(t + c2 * h, x + h * (a21 * k1), k2, node_any);
    eval(t + c3 * h, x + h * (a31 * k1 + a32 * k2), k3, node_any);
    eval(t + c4 * h, x + h * (a41 * k1 + a42 * k2 + a43 * k3), k4, node_any);
    eval(t + c5 * h, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5, node_any);
    eval(t + c6 * h, x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6, node_any);

    r.x4 = x + h * (b41 * k1 + b43 * k3 + b44 * k4 + b45 * k5);
    const double x5 = x + h * (b51 * k1 + b53 * k3 + b54 * k4 + b55 * k5 + b56 * k6);
    r.err = std::fabs(x5 - r.x4);
    r.node = node_any;
    r.finite = std::isfinite(r.x4) && std::isfinite(x5);
    return r;
}

// Cubic Hermite interpolant on [t0, t1] with endpoint values/slopes.
double hermite(double t0, double x0, double f0, double t1, double x1, double f1, double t) {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2.0 * s3 - 3.0 * s2 + 1.0) * x0 + (s3 - 2.0 * s2 + s) * h * f0
         + (-2.0 * s3 + 3.0 * s2) * x1 + (s3 - s2) * h * f1;
}

} // namespace

Trajectory integrate(double x0, SlitLabel slit, const TwoChannelField& field,
                     const ScreenGeometry& geom, const IntegratorConfig& config) {
    if (!(config.rel_tol > 0.0) || !(config.abs_tol > 0.0)) {
        throw std::invalid_argument("integrate: tolerances must be positive");
    }
    if (!std::isfinite(x0)) {
        throw std::invalid_argument("integrate: x0 must be finite");
    }
    const double t_stop = (config.max_time > 0.0)
                              ? std::min(config.max_time, geom.screen_time)
                              : geom.screen_time;
    const bool stop_is_screen = t_stop >= geom.screen_time;

    Trajectory traj;
    traj.source_slit = slit;
    traj.points.push_back({0.0, x0, 0.0});

    double t = 0.0;
    double x = x0;
    double h = std::min(config.initial_step, config.max_step);
    int stall_count = 0;

    VelocityResult vr = field.velocity(x, t);
    if (vr.node) stall_count = 1;
    double f_cur = vr.v;

    const int max_accepted = 4'000'000;
    while (t < t_stop) {
        h = std::min(h, t_stop - t);
        if (h <= 0.0) break;

        const StageResult st = try_step(field, t, x, h, f_cur);
        const double tol = config.abs_tol + config.rel_tol * std::max(std::fabs(x), std::fabs(st.x4));

        if (st.node || !st.finite) {
            if (++stall_count > config.node_stall_limit) {
                traj.termination = Termination::NodeStall;
                return traj;
            }
            h = std::max(h * 0.5, 1e-14);
            continue;
        }
        if (st.err > tol) {
            const double shrink = 0.9 * std::pow(tol / st.err, 0.2);
            h *= std::clamp(shrink, 0.2, 1.0);
            continue;
        }

        // accepted
        stall_count = 0;
        const double t_new = t + h;
        const double x_new = st.x4;
        const VelocityResult v_new = field.velocity(x_new, t_new);

        // sideways screen crossing inside this step
        if (geom.has_sideways) {
            const double s0 = x - geom.sideways_x;
            const double s1 = x_new - geom.sideways_x;
            if ((s0 < 0.0 && s1 >= 0.0) || (s0 > 0.0 && s1 <= 0.0) || s1 == 0.0) {
                double lo = t, hi = t_new;
                for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, t_new); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double xm = hermite(t, x, f_cur, t_new, x_new, v_new.v, mid);
                    if ((xm - geom.sideways_x) * s0 > 0.0) lo = mid; else hi = mid;
                }
                const double t_hit = 0.5 * (lo + hi);
                traj.points.push_back({t_hit, geom.sideways_x, geom.forward_speed * t_hit});
                traj.termination = Termination::ReachedSidewaysScreen;
                return traj;
            }
        }

        t = t_new;
        x = x_new;
        f_cur = v_new.v;
        if (v_new.node) stall_count = 1;
        traj.points.push_back({t, x, geom.forward_speed * t});
        if (static_cast<int>(traj.points.size()) > max_accepted) {
            traj.termination = Termination::MaxTime;
            return traj;
        }

        const double grow = (st.err > 0.0) ? 0.9 * std::pow(tol / st.err, 0.2) : 5.0;
        h = std::min(config.max_step, h * std::clamp(grow, 0.2, 5.0));
    }

    traj.termination = stop_is_screen ? Termination::ReachedForwardScreen : Termination::MaxTime;
    return traj;
}

double no_crossing_locus(const PacketParams& slit1, const PacketParams& slit2, double t) {
    const double s1 = dispersed_sigma(slit1, t);
    const double s2 = dispersed_sigma(slit2, t);
    const double xi1 = slit1.center + slit1.group_velocity * t;
    const double xi2 = slit2.center + slit2.group_velocity * t;
    // (x - xi1)/s1^2 + (x - xi2)/s2^2 = 0
    return (xi1 * s2 * s2 + xi2 * s1 * s1) / (s1 * s1 + s2 * s2);
}

long count_midline_crossings(const std::vector<Trajectory>& trajectories,
                             const std::function<double(double)>& locus) {
    long crossings = 0;
    for (const Trajectory& traj : trajectories) {
        double prev_sign = 0.0;
        for (const TrajectoryPoint& p : traj.points) {
            const double s = p.x - locus(p.t);
            const double sign = (s > 0.0) ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
            if (sign != 0.0) {
                if (prev_sign != 0.0 && sign != prev_sign) ++crossings;
                prev_sign = sign;
            }
        }
    }
    return crossings;
}

long count_midline_crossings(const std::vector<Trajectory>& trajectories,
                             const PacketParams& slit1, const PacketParams& slit2) {
    return count_midline_crossings(trajectories, [&](double t) {
        return no_crossing_locus(slit1, slit2, t);
    });
}

double position_at(const Trajectory& traj, double t) {
    const auto& pts = traj.points;
    if (pts.empty()) throw std::invalid_argument("position_at: empty trajectory");
    if (t <= pts.front().t) return pts.front().x;
    if (t >= pts.back().t) return pts.back().x;
    auto it = std::lower_bound(pts.begin(), pts.end(), t,
                               [](const TrajectoryPoint& p, double tv) { return p.t < tv; });
    const TrajectoryPoint& hi = *it;
    const TrajectoryPoint& lo = *(it - 1);
    const double w = (t - lo.t) / (hi.t - lo.t);
    return lo.x + w * (hi.x - lo.x);
}

} // namespace qsweep
