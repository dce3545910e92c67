#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

namespace momentlab::quad {

struct Rule {
    std::vector<double> x, w;  // on [-1, 1]
};

/// Gauss-Legendre nodes by Newton iteration on P_n.
inline Rule gauss_legendre(int n) {
    Rule r;
    r.x.resize(static_cast<std::size_t>(n));
    r.w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * pp * pp);
        r.x[static_cast<std::size_t>(i)] = -z;
        r.x[static_cast<std::size_t>(n - 1 - i)] = z;
        r.w[static_cast<std::size_t>(i)] = w;
        r.w[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return r;
}

/// Composite Gauss-Legendre over `panels` equal panels of [a, b].
template <class F>
auto gauss_panels(F&& f, double a, double b, std::size_t panels, const Rule& rule) {
    using R = decltype(f(a));
    R s{};
    const double h = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + h * static_cast<double>(p);
        const double mid = lo + 0.5 * h;
        R ps{};
        for (std::size_t i = 0; i < rule.x.size(); ++i) ps += rule.w[i] * f(mid + 0.5 * h * rule.x[i]);
        s += ps * (0.5 * h);
    }
    return s;
}

struct SimpsonStats {
    std::size_t evaluations = 0;
    bool converged = true;
};

namespace detail {

template <class F>
double simpson_rec(F& f, double a, double b, double fa, double fm, double fb, double whole, double tol, int depth,
                   SimpsonStats& st) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    st.evaluations += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0) {
        st.converged = false;
        return left + right + delta / 15.0;
    }
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, st) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, st);
}

}  // namespace detail

/// Adaptive Simpson for a real integrand over [a, b], pre-split into `panels`.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double abs_tol, std::size_t panels = 1, int max_depth = 40,
                        SimpsonStats* stats = nullptr) {
    SimpsonStats st;
    double total = 0.0;
    const double h = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + h * static_cast<double>(p), hi = lo + h;
        const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
        st.evaluations += 3;
        const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        total += detail::simpson_rec(f, lo, hi, fa, fm, fb, whole, abs_tol / static_cast<double>(panels), max_depth, st);
    }
    if (stats) *stats = st;
    return total;
}

}  // namespace momentlab::quad
