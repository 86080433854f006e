#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "qsweep/packets.hpp"

namespace qsweep {

// Transmission factor semantics: chopper duty cycle for Deterministic,
// intensity ratio I/I0 for Stochastic.  None behaves as Stochastic(1).
enum class AttenuationKind { None, Stochastic, Deterministic };

struct AttenuationMode {
    AttenuationKind kind = AttenuationKind::None;
    double a = 1.0;
};

inline void validate_transmission(double a) {
    if (!(a >= 0.0 && a <= 1.0)) {
        throw std::invalid_argument("transmission factor a must be in [0, 1], got " +
                                    std::to_string(a));
    }
}

inline AttenuationMode make_attenuation(AttenuationKind kind, double a) {
    if (kind == AttenuationKind::None) return {kind, 1.0};
    validate_transmission(a);
    return {kind, a};
}

// Stochastic (semitransparent absorber) rule: amplitude scaling R -> sqrt(a) R.
inline PacketParams apply_stochastic(PacketParams packet, double a) {
    validate_transmission(a);
    packet.weight *= std::sqrt(a);
    return packet;
}

// Deterministic (chopper) rule: convex mixture of the one-slit density and
// the unattenuated two-slit density, I = (1-a) P1' + a (P1 + P2).
inline double deterministic_intensity(double p1_single, double p1, double p2, double a) {
    validate_transmission(a);
    return (1.0 - a) * p1_single + a * (p1 + p2);
}

struct Visibility {
    double value = 0.0;
    bool degenerate = false; // a == 0: no second beam, contrast undefined
};

// Fringe contrast (Imax - Imin)/(Imax + Imin) of the two attenuation laws:
// 1 + a + 2a cos(phi) gives 2a/(1+a); 1 + a + 2 sqrt(a) cos(phi) gives
// 2 sqrt(a)/(1+a).
inline Visibility theoretical_visibility(double a, AttenuationKind kind) {
    validate_transmission(a);
    if (a == 0.0) return {0.0, true};
    switch (kind) {
        case AttenuationKind::Deterministic:
            return {2.0 * a / (1.0 + a), false};
        case AttenuationKind::Stochastic:
        case AttenuationKind::None:
            return {2.0 * std::sqrt(a) / (1.0 + a), false};
    }
    return {0.0, true};
}

} // namespace qsweep
