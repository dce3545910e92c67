#pragma once

// Complex log-gamma and the GL(3) archimedean ratios gamma_0, gamma_1, gamma_+-.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "core_arith.hpp"

namespace momentlab {

namespace gamma_detail {

// log(sin(pi z)) with the imaginary part continuous away from the real axis.
inline cplx log_sin_pi(cplx z) {
    const cplx I(0.0, 1.0);
    const double pi = std::numbers::pi;
    if (z.imag() >= 0.0) return -I * pi * z + std::log((std::exp(2.0 * pi * I * z) - 1.0) / (2.0 * I));
    return I * pi * z + std::log((1.0 - std::exp(-2.0 * pi * I * z)) / (2.0 * I));
}

}  // namespace gamma_detail

/// log Gamma(z) for complex z off the nonpositive integers.
/// Reflection below Re z = 1/2, upward shift, then Stirling with 8 Bernoulli terms.
inline cplx lgamma_c(cplx z) {
    const double pi = std::numbers::pi;
    if (z.real() < 0.5) {
        return std::log(pi) - gamma_detail::log_sin_pi(z) - lgamma_c(1.0 - z);
    }
    cplx shift(0.0, 0.0);
    while (std::abs(z) < 15.0 && z.real() < 15.0) {
        shift += std::log(z);
        z += 1.0;
    }
    static constexpr std::array<double, 8> b = {1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680,
                                                1.0 / 1188, -691.0 / 360360, 1.0 / 156, -3617.0 / 122400};
    const cplx iz = 1.0 / z, iz2 = iz * iz;
    cplx series(0.0, 0.0), p = iz;
    for (double c : b) {
        series += c * p;
        p *= iz2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * pi) + series - shift;
}

inline cplx gamma_c(cplx z) { return std::exp(lgamma_c(z)); }

/// Langlands parameters alpha_1..alpha_3 of a GL(3) form.
struct SpectralParams {
    std::array<cplx, 3> alpha{};

    /// alpha from (nu_1, nu_2): (-nu1 - 2nu2 + 1, -nu1 + nu2, 2nu1 + nu2 - 1).
    static SpectralParams from_nu(cplx nu1, cplx nu2) {
        return {{-nu1 - 2.0 * nu2 + 1.0, -nu1 + nu2, 2.0 * nu1 + nu2 - 1.0}};
    }
    static SpectralParams direct(cplx a1, cplx a2, cplx a3) { return {{a1, a2, a3}}; }
};

namespace gamma_detail {

inline void check_pole(cplx w, const char* what) {
    const double r = std::round(w.real());
    if (r <= 0.0 && std::abs(w - cplx(r, 0.0)) < 1e-8)
        throw Error(Errc::NearPole, std::string(what) + " argument within 1e-8 of a gamma pole");
}

}  // namespace gamma_detail

/// gamma_l(s) = pi^{-3s-3/2}/2 * prod_i Gamma((1+s+a_i+l)/2) / Gamma((-s-a_i+l)/2), l in {0,1}.
inline cplx gamma_ell(int ell, cplx s, const SpectralParams& sp) {
    if (ell != 0 && ell != 1) throw Error(Errc::DomainError, "ell must be 0 or 1");
    const double pi = std::numbers::pi;
    cplx lg = std::log(0.5) + (-3.0 * s - 1.5) * std::log(pi);
    for (const cplx& a : sp.alpha) {
        const cplx num = 0.5 * (1.0 + s + a + static_cast<double>(ell));
        const cplx den = 0.5 * (-s - a + static_cast<double>(ell));
        gamma_detail::check_pole(num, "numerator");
        gamma_detail::check_pole(den, "denominator");
        lg += lgamma_c(num) - lgamma_c(den);
    }
    return std::exp(lg);
}

/// gamma_+ = gamma_0 - gamma_1, gamma_- = gamma_0 + gamma_1.
inline cplx gamma_pm(int sign, cplx s, const SpectralParams& sp) {
    const cplx g0 = gamma_ell(0, s, sp), g1 = gamma_ell(1, s, sp);
    return sign >= 0 ? g0 - g1 : g0 + g1;
}

}  // namespace momentlab
