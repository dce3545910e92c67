#pragma once

// Integer-order Bessel J and Y, and the oscillatory split
// J_nu(2 pi x) = W(x) e(x) + conj(W(x)) e(-x).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "core_arith.hpp"

namespace momentlab {

namespace bessel_detail {

constexpr double kEulerGamma = 0.57721566490153286061;

/// Hankel asymptotics are used for z at or above this point.
inline double crossover(int n) { return std::max(30.0, static_cast<double>(n) * n + 10.0); }

inline std::pair<double, double> hankel(int n, double z) {
    const double mu = 4.0 * static_cast<double>(n) * n;
    double P = 1.0, Q = 0.0, term = 1.0, prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 200; ++k) {
        term *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * 8.0 * z);
        const double a = std::abs(term);
        if (a > prev) break;
        prev = a;
        switch (k % 4) {
            case 1: Q += term; break;
            case 2: P -= term; break;
            case 3: Q -= term; break;
            case 0: P += term; break;
        }
        if (a < 1e-17 * std::max(std::abs(P), 1e-300)) break;
    }
    const double w = z - (0.5 * n + 0.25) * std::numbers::pi;
    const double amp = std::sqrt(2.0 / (std::numbers::pi * z));
    const double cw = std::cos(w), sw = std::sin(w);
    return {amp * (P * cw - Q * sw), amp * (P * sw + Q * cw)};
}

inline double series_j(int n, double x) {
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    const double h = 0.5 * x;
    double term = std::exp(n * std::log(h) - std::lgamma(n + 1.0));
    double s = term;
    const double h2 = h * h;
    for (int j = 1; j < 500; ++j) {
        term *= -h2 / (static_cast<double>(j) * (j + n));
        s += term;
        if (std::abs(term) < 1e-17 * std::abs(s)) break;
    }
    return s;
}

/// J_0..J_nmax at z > 0 by Miller's backward recurrence, normalized by
/// J_0 + 2 sum J_{2k} = 1. Returns at least nmax + 1 values; the tail beyond
/// nmax (up to the start order) is kept for the Neumann series.
inline std::vector<double> miller_all(int nmax, double z) {
    const int top = std::max(nmax, static_cast<int>(z));
    int start = top + 20 + static_cast<int>(std::sqrt(40.0 * top));
    start += start % 2;
    std::vector<double> j(static_cast<std::size_t>(start + 2), 0.0);
    double jp = 0.0, jc = 1e-300;
    j[static_cast<std::size_t>(start)] = jc;
    for (int k = start; k > 0; --k) {
        const double jm = 2.0 * k / z * jc - jp;
        jp = jc;
        jc = jm;
        j[static_cast<std::size_t>(k - 1)] = jc;
        if (std::abs(jc) > 1e250) {
            for (int i = k - 1; i <= start; ++i) j[static_cast<std::size_t>(i)] *= 1e-250;
            jc *= 1e-250;
            jp *= 1e-250;
        }
    }
    double norm = j[0];
    for (int k = 2; k <= start; k += 2) norm += 2.0 * j[static_cast<std::size_t>(k)];
    for (auto& v : j) v /= norm;
    return j;
}

/// Y_0..Y_nmax at 0 < z < crossover through Neumann series and upward recurrence.
inline std::vector<double> neumann_y(int nmax, double z) {
    const auto J = miller_all(std::max(nmax, 2), z);
    const int top = static_cast<int>(J.size()) - 2;
    const double L = std::log(0.5 * z) + kEulerGamma;
    double s0 = 0.0, s1 = 0.0;
    for (int k = 1; 2 * k + 1 <= top; ++k) {
        const double sg = (k % 2) ? -1.0 : 1.0;
        s0 += sg * J[static_cast<std::size_t>(2 * k)] / k;
        s1 += sg * (J[static_cast<std::size_t>(2 * k - 1)] - J[static_cast<std::size_t>(2 * k + 1)]) / k;
    }
    std::vector<double> y(static_cast<std::size_t>(nmax + 1));
    const double y0 = 2.0 / std::numbers::pi * (L * J[0] - 2.0 * s0);
    const double y1 = 2.0 / std::numbers::pi * (-J[0] / z + L * J[1] + s1);
    y[0] = y0;
    if (nmax >= 1) y[1] = y1;
    for (int k = 1; k < nmax; ++k)
        y[static_cast<std::size_t>(k + 1)] = 2.0 * k / z * y[static_cast<std::size_t>(k)] - y[static_cast<std::size_t>(k - 1)];
    return y;
}

}  // namespace bessel_detail

/// J_n(x) for integer n >= 0, x >= 0.
inline double bessel_j(int n, double x) {
    if (n < 0) return (n % 2 ? -1.0 : 1.0) * bessel_j(-n, x);
    if (x < 0.0) throw Error(Errc::DomainError, "bessel_j needs x >= 0");
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    if (x < 8.0 || 0.25 * x * x < n + 1.0) return bessel_detail::series_j(n, x);
    if (x >= bessel_detail::crossover(n)) return bessel_detail::hankel(n, x).first;
    return bessel_detail::miller_all(n, x)[static_cast<std::size_t>(n)];
}

/// Y_n(x) for integer n >= 0, x > 0.
inline double bessel_y(int n, double x) {
    if (x <= 0.0) throw Error(Errc::DomainError, "bessel_y needs x > 0");
    if (x >= bessel_detail::crossover(n)) return bessel_detail::hankel(n, x).second;
    return bessel_detail::neumann_y(n, x)[static_cast<std::size_t>(n)];
}

/// C-infinity step: 0 for t <= 0, 1 for t >= 1.
inline double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

struct BesselSplit {
    int order = 0;
    double x = 0.0;
    cplx W{0.0, 0.0};

    double reconstruct() const {
        const cplx we = W * e_real(x);
        return 2.0 * we.real();
    }
};

/// W with J_nu(2 pi x) = W e(x) + conj(W e(x)): W = e(-x) (J + i rho Y)/2 where
/// rho is a smooth step from 0 (2 pi x <= a) to 1 (2 pi x >= 2a), a = max(nu, 2);
/// beyond the step W is the Hankel form e(-x) H^(1)/2.
inline BesselSplit w_split(int order, double x) {
    if (!(x > 0.0)) throw Error(Errc::DomainError, "w_split needs x > 0");
    const double z = 2.0 * std::numbers::pi * x;
    const double a = std::max(static_cast<double>(order), 2.0);
    const double rho = smooth_step((z - a) / a);
    double J, Y = 0.0;
    if (z >= bessel_detail::crossover(order)) {
        std::tie(J, Y) = bessel_detail::hankel(order, z);
    } else {
        J = bessel_j(order, z);
        if (rho > 0.0) Y = bessel_y(order, z);
    }
    return {order, x, 0.5 * e_real(-x) * cplx(J, rho * Y)};
}

/// min{x^p, x/(1+x)^{3/2}}.
inline double w_envelope(int p, double x) {
    return std::min(std::pow(x, p), x / std::pow(1.0 + x, 1.5));
}

}  // namespace momentlab
