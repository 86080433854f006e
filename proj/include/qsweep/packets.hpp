#pragma once

#include <cmath>
#include <stdexcept>

#include "qsweep/constants.hpp"

namespace qsweep {

// One Gaussian channel, in internal units (lengths in sigma0 of the setup,
// times in tau).  weight is the dimensionless amplitude multiplier; stochastic
// attenuation sets weight = sqrt(a).
struct PacketParams {
    double center = 0.0;         // slit center xi(0)
    double sigma0 = 1.0;         // initial width (internal, usually 1)
    double group_velocity = 0.0; // transverse drift of the packet center
    double weight = 1.0;         // in [0, 1]
};

// Local single-channel field data at (x, t).
//
// amplitude     R, with R = exp(log_amplitude) wherever representable
// log_amplitude always finite for weight > 0; -inf sentinel for weight == 0
// phase         S/hbar of the standard dispersing Gaussian (radians)
// convective_v  grad(S)/m
// diffusive_u   -(hbar/m) grad(R)/R, pointing away from the packet center
struct PacketSample {
    double amplitude = 0.0;
    double log_amplitude = 0.0;
    double phase = 0.0;
    double convective_v = 0.0;
    double diffusive_u = 0.0;
    double center_now = 0.0;
    double sigma_now = 0.0;
};

// sigma_t = sigma0 sqrt(1 + (t/tau_p)^2) with tau_p = sigma0^2 in internal
// units.  Rejects t < 0: only forward evolution is simulated.
inline double dispersed_sigma(const PacketParams& p, double t) {
    if (t < 0.0) throw std::domain_error("dispersed_sigma: t must be >= 0");
    const double s2 = p.sigma0 * p.sigma0;
    const double big_t = t / s2;
    return p.sigma0 * std::sqrt(1.0 + big_t * big_t);
}

// Closed-form evaluation of the dispersing Gaussian channel.
//
//   log R = log w - (1/4) log(2 pi sigma_t^2) - D^2/(4 sigma_t^2)
//   u     = (hbar/m) D / (2 sigma_t^2)
//   v     = v_g + D sigma_t'/sigma_t
//   S/hb  = T D^2/(4 sigma_t^2) - (1/2) atan T + (m v_g/hbar)(x - v_g t/2)
//
// with D = x - xi(t) and T = t/tau_p.  u and v contain no weight; they are
// identical for any weight at the same (x, t).
inline PacketSample packet_eval(const PacketParams& p, double x, double t) {
    if (t < 0.0) throw std::domain_error("packet_eval: t must be >= 0");
    const double s2 = p.sigma0 * p.sigma0;
    const double big_t = t / s2;
    const double one_plus_t2 = 1.0 + big_t * big_t;
    const double sig_t2 = s2 * one_plus_t2;

    PacketSample out;
    out.center_now = p.center + p.group_velocity * t;
    out.sigma_now = p.sigma0 * std::sqrt(one_plus_t2);

    const double delta = x - out.center_now;
    const double quarter_dd = delta * delta / (4.0 * sig_t2);

    out.log_amplitude = std::log(p.weight)
                      - 0.25 * std::log(2.0 * k_pi * sig_t2)
                      - quarter_dd;
    out.amplitude = std::exp(out.log_amplitude);

    out.diffusive_u = k_hbar_over_mass_internal * delta / (2.0 * sig_t2);
    out.convective_v = p.group_velocity + big_t * delta / sig_t2;
    out.phase = big_t * quarter_dd - 0.5 * std::atan(big_t)
              + k_mass_over_hbar_internal * p.group_velocity * (x - 0.5 * p.group_velocity * t);
    return out;
}

} // namespace qsweep
