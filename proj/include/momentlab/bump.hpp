#pragma once

// Smooth compactly supported test functions.

#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "bessel.hpp"
#include "error.hpp"

namespace momentlab {

/// Immutable smooth function of x > 0 with known support.
class Bump {
public:
    enum class Shape { Plateau, Dyadic, Sharp };

    /// Plateau bump: 0 outside (a, d), 1 on [b, c], smooth steps in log x between.
    static Bump plateau(double a, double b, double c, double d) {
        if (!(0.0 < a && a < b && b <= c && c < d))
            throw Error(Errc::DomainError, "plateau bump needs 0 < a < b <= c < d");
        Bump w(Shape::Plateau, a, d);
        w.p_ = {a, b, c, d};
        return w;
    }

    /// Member j of the dyadic partition sum_j U_j = 1 on (0, inf):
    /// U_j(x) = h(x / 2^{j-1}) - h(x / 2^j), h(x) = step(log2 x). Supported in (2^{j-1}, 2^{j+1}).
    static Bump dyadic(int j) {
        Bump w(Shape::Dyadic, std::ldexp(1.0, j - 1), std::ldexp(1.0, j + 1));
        w.j_ = j;
        return w;
    }

    /// exp(p - p/(1 - t^2)) with t the position in (lo, hi) rescaled to (-1, 1); peak 1 at the centre.
    static Bump sharp(double lo, double hi, double p = 20.0) {
        if (!(0.0 < lo && lo < hi)) throw Error(Errc::DomainError, "sharp bump needs 0 < lo < hi");
        Bump w(Shape::Sharp, lo, hi);
        w.sharpness_ = p;
        return w;
    }

    Shape shape() const { return shape_; }
    double support_lo() const { return lo_; }
    double support_hi() const { return hi_; }

    double operator()(double x) const {
        if (!(x > lo_ && x < hi_)) return 0.0;
        switch (shape_) {
            case Shape::Plateau: {
                if (x >= p_[1] && x <= p_[2]) return 1.0;
                if (x < p_[1]) return smooth_step(std::log(x / p_[0]) / std::log(p_[1] / p_[0]));
                return smooth_step(std::log(p_[3] / x) / std::log(p_[3] / p_[2]));
            }
            case Shape::Dyadic: {
                const double l = std::log2(x);
                return smooth_step(l - (j_ - 1)) - smooth_step(l - j_);
            }
            case Shape::Sharp: {
                const double t = (2.0 * x - lo_ - hi_) / (hi_ - lo_);
                return std::exp(sharpness_ - sharpness_ / (1.0 - t * t));
            }
        }
        return 0.0;
    }

    /// sup |x^j w^(j)(x)| for j = 0..4 from central differences on a dense grid.
    std::array<double, 5> derivative_bounds(int grid = 4000) const {
        std::array<double, 5> out{};
        const double span = hi_ - lo_;
        const double h = span * 2e-3;
        static constexpr double stencil[5][5] = {{0, 0, 1, 0, 0},
                                                 {1.0 / 12, -2.0 / 3, 0, 2.0 / 3, -1.0 / 12},
                                                 {-1.0 / 12, 4.0 / 3, -2.5, 4.0 / 3, -1.0 / 12},
                                                 {-0.5, 1, 0, -1, 0.5},
                                                 {1, -4, 6, -4, 1}};
        for (int i = 0; i <= grid; ++i) {
            const double x = lo_ + span * i / grid;
            std::array<double, 5> f;
            for (int k = 0; k < 5; ++k) {
                const double xx = x + (k - 2) * h;
                f[static_cast<std::size_t>(k)] = xx > 0.0 ? (*this)(xx) : 0.0;
            }
            double hp = 1.0, xp = 1.0;
            for (int j = 0; j < 5; ++j) {
                double d = 0.0;
                for (int k = 0; k < 5; ++k) d += stencil[j][k] * f[static_cast<std::size_t>(k)];
                out[static_cast<std::size_t>(j)] = std::max(out[static_cast<std::size_t>(j)], std::abs(xp * d / hp));
                hp *= h;
                xp *= x;
            }
        }
        return out;
    }

private:
    Bump(Shape s, double lo, double hi) : shape_(s), lo_(lo), hi_(hi) {}

    Shape shape_;
    double lo_, hi_;
    std::array<double, 4> p_{};
    int j_ = 0;
    double sharpness_ = 20.0;
};

/// Plateau [1, 2] with support (1/4, 4): the default weight in the moment and Mellin code.
inline Bump default_window() { return Bump::plateau(0.25, 1.0, 2.0, 4.0); }

}  // namespace momentlab
