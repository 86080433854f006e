#pragma once

#include <cmath>
#include <limits>

#include "qsweep/packets.hpp"

namespace qsweep {

// Incoherent mode pins cos(phi) = 0 and sin(phi) = 1 exactly, so the cosine
// interference contribution vanishes by construction rather than to rounding.
enum class CoherenceMode { Coherent, Incoherent };

inline constexpr double k_default_density_floor = 1e-300;

struct PhaseFactors {
    double phi = 0.0;
    double cos_phi = 1.0;
    double sin_phi = 0.0;
};

inline PhaseFactors phase_factors(const PacketSample& s1, const PacketSample& s2,
                                  CoherenceMode mode) {
    PhaseFactors f;
    if (mode == CoherenceMode::Incoherent) {
        f.phi = 0.5 * k_pi;
        f.cos_phi = 0.0;
        f.sin_phi = 1.0;
    } else {
        f.phi = s2.phase - s1.phase;
        f.cos_phi = std::cos(f.phi);
        f.sin_phi = std::sin(f.phi);
    }
    return f;
}

// Relative phase between the channels; pi/2 in incoherent mode regardless of
// the inputs.  Coherent orientation is (S2 - S1)/hbar: with this sign the
// total-current formula below reproduces the quantum-mechanical probability
// current exactly, and the pinned incoherent sin(phi) = +1 pushes the
// diffusive cross current from the strong channel toward the weak one.
inline double phase_difference(const PacketSample& s1, const PacketSample& s2,
                               CoherenceMode mode) {
    return phase_factors(s1, s2, mode).phi;
}

// The six projection scalars, with the amplitude factor R1 R2 restored on the
// sine terms so that the current reassembled from projections matches the
// total current identity.
struct Projections {
    double v1 = 0.0;
    double u1R = 0.0;
    double u1L = 0.0;
    double v2 = 0.0;
    double u2R = 0.0;
    double u2L = 0.0;
};

// Assembled two-channel quantities at one (x, t).
//
// Ptot is exactly P1 + P2 as assembled.  All amplitude products are built in
// the log domain, so weights down to 1e-10 and positions deep in the tails do
// not underflow intermediate terms.  `underflow` marks points where even the
// rescaled densities fall below the representable range (returned as exact 0).
// `node` marks Ptot below the density floor; vtot is then 0 and must not be
// trusted by callers that need a velocity.
struct FieldSample {
    double P1 = 0.0;
    double P2 = 0.0;
    double Ptot = 0.0;
    double Jtot = 0.0;
    double vtot = 0.0;
    double phi = 0.0;
    Projections proj;
    bool node = false;
    bool underflow = false;
};

// One-shot evaluation of projections, densities, current and velocity from
// two same-point samples.  Shared-scale assembly: every product is expressed
// relative to exp(M) with M = max(2 l1, 2 l2, l1 + l2); the velocity is the
// ratio of the two rescaled brackets and never touches exp(M) at all.
inline FieldSample evaluate_fields(const PacketSample& s1, const PacketSample& s2,
                                   CoherenceMode mode,
                                   double density_floor = k_default_density_floor) {
    const PhaseFactors f = phase_factors(s1, s2, mode);
    FieldSample out;
    out.phi = f.phi;

    const double l1 = s1.log_amplitude;
    const double l2 = s2.log_amplitude;
    const double m = std::max(std::max(2.0 * l1, 2.0 * l2), l1 + l2);

    if (!(m > -std::numeric_limits<double>::infinity())) {
        // both channels identically zero (weight 0)
        out.underflow = true;
        out.node = true;
        return out;
    }

    const double e11 = std::exp(2.0 * l1 - m);
    const double e22 = std::exp(2.0 * l2 - m);
    const double e12 = std::exp(l1 + l2 - m);

    const double p1_hat = e11 + e12 * f.cos_phi;
    const double p2_hat = e22 + e12 * f.cos_phi;
    const double ptot_hat = p1_hat + p2_hat;
    const double j_hat = e11 * s1.convective_v + e22 * s2.convective_v
                       + e12 * ((s1.convective_v + s2.convective_v) * f.cos_phi
                              + (s1.diffusive_u - s2.diffusive_u) * f.sin_phi);

    const double scale = std::exp(m);
    out.proj.v1 = scale * p1_hat;
    out.proj.u1R = scale * (e12 * f.sin_phi);
    out.proj.u1L = -out.proj.u1R;
    out.proj.v2 = scale * p2_hat;
    out.proj.u2R = -out.proj.u1R;
    out.proj.u2L = out.proj.u1R;

    out.P1 = out.proj.v1;
    out.P2 = out.proj.v2;
    out.Ptot = out.P1 + out.P2;
    out.Jtot = scale * j_hat;
    out.underflow = (out.Ptot == 0.0);

    out.node = !(out.Ptot >= density_floor);
    out.vtot = (!out.node && ptot_hat > 0.0) ? j_hat / ptot_hat : 0.0;
    if (out.node) out.vtot = 0.0;
    return out;
}

inline Projections channel_projections(const PacketSample& s1, const PacketSample& s2,
                                       CoherenceMode mode) {
    return evaluate_fields(s1, s2, mode).proj;
}

struct ChannelDensities {
    double P1 = 0.0;
    double P2 = 0.0;
    double Ptot = 0.0;
    bool underflow = false;
};

inline ChannelDensities channel_densities(const PacketSample& s1, const PacketSample& s2,
                                          CoherenceMode mode) {
    const FieldSample f = evaluate_fields(s1, s2, mode);
    return {f.P1, f.P2, f.Ptot, f.underflow};
}

inline double total_current(const PacketSample& s1, const PacketSample& s2,
                            CoherenceMode mode) {
    return evaluate_fields(s1, s2, mode).Jtot;
}

struct VelocityResult {
    double v = 0.0;
    bool node = false;
};

inline VelocityResult total_velocity(const PacketSample& s1, const PacketSample& s2,
                                     CoherenceMode mode,
                                     double density_floor = k_default_density_floor) {
    const FieldSample f = evaluate_fields(s1, s2, mode, density_floor);
    return {f.vtot, f.node};
}

// Two-channel field context: everything the trajectory integrator and the
// grid scans need to evaluate the guidance velocity at arbitrary (x, t).
struct TwoChannelField {
    PacketParams slit1;
    PacketParams slit2;
    CoherenceMode mode = CoherenceMode::Coherent;
    double density_floor = k_default_density_floor;

    FieldSample sample(double x, double t) const {
        return evaluate_fields(packet_eval(slit1, x, t), packet_eval(slit2, x, t),
                               mode, density_floor);
    }

    VelocityResult velocity(double x, double t) const {
        const FieldSample f = sample(x, t);
        return {f.vtot, f.node};
    }
};

} // namespace qsweep
