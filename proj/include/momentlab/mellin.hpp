#pragma once

// Mellin transform of the Bessel weight against a smooth window,
// F(iy) = int w1(x) W^beta(2 N x / (M C)) x^{iy} dx / x.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "bessel.hpp"
#include "bump.hpp"
#include "quadrature.hpp"

namespace momentlab {

struct MellinWeightSpec {
    double C = 1.0, M = 1.0, N = 1.0;
    int beta = 1;  // +1 or -1
    int order = 3;  // Bessel order, k - 1
    double eps = 0.1;

    double ratio() const { return N / (C * M); }
    double K() const { return (1.0 + ratio()) * std::pow(M, eps); }
    /// min{CM/N, N^2/(M^2 C^2)}
    double envelope() const { return std::min(1.0 / ratio(), ratio() * ratio()); }
};

/// W^beta(t) = e(beta t) W(t) for beta = +1 and its conjugate for beta = -1.
inline cplx w_beta(int beta, int order, double t) {
    const cplx v = e_real(t) * w_split(order, t).W;
    return beta >= 0 ? v : std::conj(v);
}

/// Fixed-resolution rule in u = log x resolving all frequencies |y| <= y_max.
/// Sampled values are reused for every y, so sweeps in y cost one sum per point.
class MellinTable {
public:
    MellinTable(const MellinWeightSpec& spec, const Bump& w1, double y_max, double points_per_radian = 5.0) {
        const double lo = std::log(w1.support_lo()), hi = std::log(w1.support_hi());
        const double s = 2.0 * spec.ratio();
        const double radians = std::abs(y_max) * (hi - lo) + 2.0 * std::numbers::pi * s * (w1.support_hi() - w1.support_lo());
        static const quad::Rule rule = quad::gauss_legendre(16);
        const std::size_t panels = std::max<std::size_t>(
            static_cast<std::size_t>(std::ceil(8.0 * points_per_radian)),
            static_cast<std::size_t>(std::ceil(points_per_radian * radians / static_cast<double>(rule.x.size()))));
        const double h = (hi - lo) / static_cast<double>(panels);
        u_.reserve(panels * rule.x.size());
        g_.reserve(panels * rule.x.size());
        for (std::size_t p = 0; p < panels; ++p) {
            const double mid = lo + h * (static_cast<double>(p) + 0.5);
            for (std::size_t i = 0; i < rule.x.size(); ++i) {
                const double u = mid + 0.5 * h * rule.x[i];
                const double x = std::exp(u);
                const double wv = w1(x);
                u_.push_back(u);
                g_.push_back(wv == 0.0 ? cplx(0.0) : 0.5 * h * rule.w[i] * wv * w_beta(spec.beta, spec.order, s * x));
            }
        }
    }

    cplx operator()(double y) const {
        cplx acc(0.0, 0.0);
        for (std::size_t i = 0; i < u_.size(); ++i) acc += g_[i] * std::polar(1.0, y * u_[i]);
        return acc;
    }

    std::size_t nodes() const { return u_.size(); }

private:
    std::vector<double> u_;
    std::vector<cplx> g_;
};

/// F(iy) with panel doubling until successive values agree to abs_tol (at most 2^20 panels).
inline cplx mellin_weight_F(double y, const MellinWeightSpec& spec, const Bump& w1, double abs_tol = 1e-10) {
    double ppr = 2.0;
    cplx prev = MellinTable(spec, w1, y, ppr)(y);
    for (int it = 0; it < 12; ++it) {
        ppr *= 2.0;
        const MellinTable t(spec, w1, y, ppr);
        const cplx cur = t(y);
        if (std::abs(cur - prev) < abs_tol || t.nodes() >= (std::size_t{1} << 24)) return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace momentlab
