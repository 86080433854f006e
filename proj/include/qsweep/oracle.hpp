#pragma once

#include <cmath>
#include <complex>
#include <limits>

#include "qsweep/constants.hpp"
#include "qsweep/packets.hpp"

namespace qsweep {
namespace oracle {

// Standard-quantum-mechanics reference implementation.  It shares only the
// parameter struct with the packets module; every formula here is derived
// from the complex Gaussian itself, so the two routes are independent.

// Complex amplitude carried as (log-modulus, phase) for extreme dynamic
// range; re/im are derived views and may underflow to 0 where exp(log_modulus)
// is not representable.
struct ComplexAmplitude {
    double log_modulus = -std::numeric_limits<double>::infinity();
    double phase = 0.0;

    double modulus() const { return std::exp(log_modulus); }
    double re() const { return modulus() * std::cos(phase); }
    double im() const { return modulus() * std::sin(phase); }
};

// Freely dispersing Gaussian packet
//   psi = w (2 pi s_t^2)^(-1/4) exp(-(x - xi0 - v t)^2/(4 sigma0 s_t)
//                                   + i (m v/hbar)(x - v t/2))
// with s_t = sigma0 (1 + i hbar t/(2 m sigma0^2)).  Internal units.
inline ComplexAmplitude psi(const PacketParams& p, double x, double t) {
    if (t < 0.0) throw std::domain_error("oracle::psi: t must be >= 0");
    const std::complex<double> i_unit(0.0, 1.0);
    const double big_t = k_hbar_over_mass_internal * t / (2.0 * p.sigma0 * p.sigma0);
    const std::complex<double> s_t = p.sigma0 * (1.0 + i_unit * big_t);
    const double delta = x - p.center - p.group_velocity * t;

    const std::complex<double> gauss_exp = -delta * delta / (4.0 * p.sigma0 * s_t);
    const double plane = k_mass_over_hbar_internal * p.group_velocity
                       * (x - 0.5 * p.group_velocity * t);

    // (2 pi s_t^2)^(-1/4): modulus uses |s_t|^2, phase uses arg(s_t)
    const double abs_st2 = std::norm(s_t);
    const double arg_st = std::arg(s_t);

    ComplexAmplitude a;
    a.log_modulus = std::log(p.weight) - 0.25 * std::log(2.0 * k_pi * abs_st2)
                  + gauss_exp.real();
    a.phase = -0.5 * arg_st + gauss_exp.imag() + plane;
    return a;
}

// (d/dx psi)/psi, closed form.
inline std::complex<double> psi_log_derivative(const PacketParams& p, double x, double t) {
    const std::complex<double> i_unit(0.0, 1.0);
    const double big_t = k_hbar_over_mass_internal * t / (2.0 * p.sigma0 * p.sigma0);
    const std::complex<double> s_t = p.sigma0 * (1.0 + i_unit * big_t);
    const double delta = x - p.center - p.group_velocity * t;
    return -delta / (2.0 * p.sigma0 * s_t)
         + i_unit * (k_mass_over_hbar_internal * p.group_velocity);
}

// |psi1 + psi2|^2 assembled from log-moduli and phases.
inline double born_density(const ComplexAmplitude& a1, const ComplexAmplitude& a2) {
    const double l1 = a1.log_modulus;
    const double l2 = a2.log_modulus;
    const double m = std::max(std::max(2.0 * l1, 2.0 * l2), l1 + l2);
    if (!(m > -std::numeric_limits<double>::infinity())) return 0.0;
    const double cross = 2.0 * std::exp(l1 + l2 - m) * std::cos(a1.phase - a2.phase);
    return std::exp(m) * (std::exp(2.0 * l1 - m) + std::exp(2.0 * l2 - m) + cross);
}

struct OracleVelocity {
    double v = 0.0;
    bool node = false;
};

namespace detail {

// (w1 c1 + w2 c2)/(w1 + w2) with w_i = psi_i rescaled by exp(-max log-modulus).
inline std::complex<double> weak_log_derivative(const PacketParams& p1, const PacketParams& p2,
                                                double x, double t, double density_floor,
                                                bool& node) {
    const ComplexAmplitude a1 = psi(p1, x, t);
    const ComplexAmplitude a2 = psi(p2, x, t);
    const double lm = std::max(a1.log_modulus, a2.log_modulus);
    node = true;
    if (!(lm > -std::numeric_limits<double>::infinity())) return {0.0, 0.0};

    const std::complex<double> w1 = std::polar(std::exp(a1.log_modulus - lm), a1.phase);
    const std::complex<double> w2 = std::polar(std::exp(a2.log_modulus - lm), a2.phase);
    const std::complex<double> sum = w1 + w2;
    const double scaled_density = std::norm(sum); // |psi|^2 / exp(2 lm)
    const double density = std::exp(2.0 * lm) * scaled_density;
    if (!(density >= density_floor) || scaled_density == 0.0) return {0.0, 0.0};

    node = false;
    const std::complex<double> c1 = psi_log_derivative(p1, x, t);
    const std::complex<double> c2 = psi_log_derivative(p2, x, t);
    return (w1 * c1 + w2 * c2) / sum;
}

} // namespace detail

// Bohmian guidance velocity (hbar/m) Im[(d/dx psi)/psi] for psi = psi1 + psi2,
// from closed-form derivatives rather than numeric phase unwrapping.
inline OracleVelocity bohm_velocity(const PacketParams& p1, const PacketParams& p2,
                                    double x, double t,
                                    double density_floor = 1e-300) {
    bool node = false;
    const std::complex<double> c = detail::weak_log_derivative(p1, p2, x, t, density_floor, node);
    if (node) return {0.0, true};
    return {k_hbar_over_mass_internal * c.imag(), false};
}

// Osmotic velocity -(hbar/m) d/dx log|psi1 + psi2|; the imaginary-part
// counterpart of the weak momentum value.
inline OracleVelocity osmotic_velocity(const PacketParams& p1, const PacketParams& p2,
                                       double x, double t,
                                       double density_floor = 1e-300) {
    bool node = false;
    const std::complex<double> c = detail::weak_log_derivative(p1, p2, x, t, density_floor, node);
    if (node) return {0.0, true};
    return {-k_hbar_over_mass_internal * c.real(), false};
}

} // namespace oracle
} // namespace qsweep
