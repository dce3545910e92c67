#pragma once

// GL(3) Voronoi transform
//   G_pm(x) = (1/2 pi i) int_(sigma) x^{-s} gamma_pm(s) gt(-s) ds,  gt(w) = int g(z) z^{w-1} dz,
// its oscillatory expansion, and both sides of the Voronoi summation formula.

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "bump.hpp"
#include "characters.hpp"
#include "gamma.hpp"
#include "gl3.hpp"
#include "quadrature.hpp"

namespace momentlab {

/// Smooth test function on a compact support [lo, hi] with derivative scale K: x^j g^(j) << K^j.
struct TestFunction {
    std::function<cplx(double)> f;
    double lo_ = 1.0, hi_ = 2.0, K_ = 1.0;
    double theta = 0.0;  // modulation frequency, for the phase budget of the quadratures

    /// Sharp bump on [X, 2X] modulated by e(theta z).
    static TestFunction dyadic(double X, double theta = 0.0) { return modulated(Bump::sharp(X, 2.0 * X), theta); }
    /// Plateau bump equal to 1 on [1.25 X, 1.75 X], supported in [X, 2X].
    static TestFunction plateau(double X) { return modulated(Bump::plateau(X, 1.25 * X, 1.75 * X, 2.0 * X), 0.0); }
    /// sup |x w'| / sup |w|, at least 1.
    static double derivative_scale(const Bump& w) {
        const auto c = w.derivative_bounds();
        return std::max(1.0, c[1] / c[0]);
    }
    /// w(z) e(theta z) for any bump w; K = derivative_scale(w) + |theta| lo.
    static TestFunction modulated(const Bump& w, double theta) {
        const double lo = w.support_lo(), hi = w.support_hi();
        const double K = derivative_scale(w) + std::abs(theta) * lo;
        return {[w, theta](double z) {
                    const double v = w(z);
                    if (v == 0.0) return cplx(0.0, 0.0);
                    return theta == 0.0 ? cplx(v, 0.0) : v * e_real(theta * z);
                },
                lo, hi, K, theta};
    }
    static TestFunction zero(double lo, double hi) { return {[](double) { return cplx(0.0, 0.0); }, lo, hi, 1.0, 0.0}; }

    /// a g1 + b g2 on the union of supports.
    static TestFunction combine(cplx a, const TestFunction& g1, cplx b, const TestFunction& g2) {
        return {[a, b, f1 = g1.f, f2 = g2.f](double z) { return a * f1(z) + b * f2(z); },
                std::min(g1.lo_, g2.lo_), std::max(g1.hi_, g2.hi_), std::max(g1.K_, g2.K_),
                std::max(std::abs(g1.theta), std::abs(g2.theta))};
    }
    /// z -> g(z / mu).
    TestFunction dilated(double mu) const {
        return {[f = f, mu](double z) { return f(z / mu); }, lo_ * mu, hi_ * mu, K_, theta / mu};
    }

    cplx operator()(double z) const { return (z > lo_ && z < hi_) ? f(z) : cplx(0.0, 0.0); }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double X() const { return lo_; }
    double K() const { return K_; }
};

/// G_0 and G_1; G_+ = G_0 - G_1, G_- = G_0 + G_1.
struct GPair {
    cplx g0{0.0, 0.0}, g1{0.0, 0.0};
    cplx plus() const { return g0 - g1; }
    cplx minus() const { return g0 + g1; }
    cplx sign(int s) const { return s >= 0 ? plus() : minus(); }
    /// G_0 + i G_1, the combination carrying a single oscillation e(-3 (x y)^{1/3}).
    cplx analytic() const { return g0 + cplx(0.0, 1.0) * g1; }
};

struct ContourOptions {
    double sigma = -0.5;
    double x_lo = 1e-3, x_hi = 1e6;  // evaluation range; sets the tau step
    double tau_max = 0.0;            // 0: start at 10 K and extend until the tail is negligible
    double tail_rel = 1e-10;
    double tau_cap = 2e5;
};

namespace voronoi_detail {

inline void check_contour(double sigma, const SpectralParams& sp) {
    for (const auto& a : sp.alpha) {
        const double first = -1.0 - a.real();
        for (int ell = 0; ell <= 1; ++ell)
            for (int j = 0; j < 3; ++j)
                if (std::abs(sigma - (first - ell - 2 * j)) < 1e-6)
                    throw Error(Errc::ContourTooClose, "sigma within 1e-6 of a gamma pole");
        if (sigma <= first)
            throw Error(Errc::PreconditionViolated, "sigma must lie right of every pole -1 - alpha_i");
    }
}

}  // namespace voronoi_detail

/// Samples h_l(tau) = gamma_l(sigma + i tau) gt(-sigma - i tau) on a uniform tau grid; G is the
/// trapezoid sum (dtau / 2 pi) sum_j x^{-s_j} h(tau_j).
class GTransform {
public:
    GTransform(const TestFunction& g, const SpectralParams& sp, const ContourOptions& opt = {}) : g_(g), sp_(sp), opt_(opt) {
        voronoi_detail::check_contour(opt.sigma, sp);
        double tmax = opt.tau_max > 0.0 ? opt.tau_max : std::max(50.0, 10.0 * g.K());
        for (;;) {
            sample(tmax);
            if (opt.tau_max > 0.0 || tail_ratio_ < opt.tail_rel) break;
            if (tmax >= opt.tau_cap)
                throw Error(Errc::CutoffUnreached, "contour tail still above tolerance at tau = " + std::to_string(tmax));
            tmax = std::min(opt.tau_cap, 1.5 * tmax);
        }
    }

    GPair operator()(double x) const {
        if (!(x > 0.0)) throw Error(Errc::DomainError, "G needs x > 0");
        const double lx = std::log(x);
        const cplx step = std::polar(1.0, -dtau_ * lx);
        cplx a0(0.0), a1(0.0), ph;
        for (std::size_t j = 0; j < h0_.size(); ++j) {
            if (j % 512 == 0) ph = std::polar(1.0, -tau_[j] * lx);
            a0 += h0_[j] * ph;
            a1 += h1_[j] * ph;
            ph *= step;
        }
        const double scale = std::exp(-opt_.sigma * lx) * dtau_ / (2.0 * std::numbers::pi);
        return {a0 * scale, a1 * scale};
    }

    double tau_max() const { return tau_max_; }
    double dtau() const { return dtau_; }
    double tail_ratio() const { return tail_ratio_; }
    std::size_t nodes() const { return h0_.size(); }
    const ContourOptions& options() const { return opt_; }
    const TestFunction& test_function() const { return g_; }
    const SpectralParams& spectral() const { return sp_; }

    /// gt(-s) = int g(z) z^{-s-1} dz by the trapezoid rule in t = log z.
    cplx mellin_g(cplx s) const {
        cplx acc(0.0);
        for (std::size_t k = 0; k < gt_.size(); ++k) acc += gt_[k] * std::exp(-s * t_[k]);
        return acc * ht_;
    }

private:
    void sample(double tmax) {
        tau_max_ = tmax;
        const double lo = std::log(g_.lo()), hi = std::log(g_.hi());
        const double band = 2.0 * std::numbers::pi * std::abs(g_.theta) * g_.hi();
        // trapezoid in t resolves frequencies up to pi / ht with a factor 2 margin
        const std::size_t nt = static_cast<std::size_t>(std::ceil((hi - lo) * (2.0 * (tmax + band) + 200.0) / (2.0 * std::numbers::pi))) + 16;
        ht_ = (hi - lo) / static_cast<double>(nt);
        t_.resize(nt + 1);
        gt_.resize(nt + 1);
        for (std::size_t k = 0; k <= nt; ++k) {
            t_[k] = lo + ht_ * static_cast<double>(k);
            gt_[k] = g_(std::exp(t_[k]));
        }
        // phase speed in tau: |log x| + 3 log(tau / 2 pi) + |log z| + slack
        const double lx = std::max(std::abs(std::log(opt_.x_lo)), std::abs(std::log(opt_.x_hi)));
        const double lz = std::max(std::abs(lo), std::abs(hi));
        const double speed = lx + 3.0 * std::max(1.0, std::log(tmax / (2.0 * std::numbers::pi))) + lz + 3.0;
        const double target = (std::numbers::pi / 8.0) / speed;
        const std::size_t n = 2 * static_cast<std::size_t>(std::ceil(tmax / target)) + 1;
        dtau_ = 2.0 * tmax / static_cast<double>(n - 1);
        tau_.resize(n);
        h0_.resize(n);
        h1_.resize(n);
        std::vector<cplx> wexp(nt + 1);
        for (std::size_t k = 0; k <= nt; ++k) wexp[k] = gt_[k] * std::exp(-opt_.sigma * t_[k]);
        double peak = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double tau = -tmax + dtau_ * static_cast<double>(j);
            tau_[j] = tau;
            // gt(-s) with s = sigma + i tau: sum_k wexp_k e^{-i tau t_k}
            const cplx step = std::polar(1.0, -tau * ht_);
            cplx ph = std::polar(1.0, -tau * lo), acc(0.0);
            for (std::size_t k = 0; k <= nt; ++k) {
                acc += wexp[k] * ph;
                ph *= step;
            }
            const cplx gm = acc * ht_;
            const cplx s(opt_.sigma, tau);
            const cplx v0 = gamma_on_contour(0, s) * gm, v1 = gamma_on_contour(1, s) * gm;
            h0_[j] = v0;
            h1_[j] = v1;
            peak = std::max({peak, std::abs(v0), std::abs(v1)});
        }
        double tail = 0.0;
        const std::size_t edge = std::max<std::size_t>(1, n / 20);
        for (std::size_t j = 0; j < edge; ++j)
            tail = std::max({tail, std::abs(h0_[j]), std::abs(h1_[j]), std::abs(h0_[n - 1 - j]), std::abs(h1_[n - 1 - j])});
        tail_ratio_ = peak > 0.0 ? tail / peak : 0.0;
    }

    // numerator poles are kept off the line by check_contour, so a NearPole here is a zero of 1/Gamma
    cplx gamma_on_contour(int ell, cplx s) const {
        try {
            return gamma_ell(ell, s, sp_);
        } catch (const Error& e) {
            if (e.code() != Errc::NearPole) throw;
            return cplx(0.0);
        }
    }

    friend class GTable;

    TestFunction g_;
    SpectralParams sp_;
    ContourOptions opt_;
    double tau_max_ = 0.0, dtau_ = 0.0, ht_ = 0.0, tail_ratio_ = 1.0;
    std::vector<double> t_, tau_;
    std::vector<cplx> gt_, h0_, h1_;
};

/// G on a uniform grid in u = log x from one FFT per component, with degree-8 Lagrange
/// interpolation between grid points. Checked against direct evaluation at construction.
class GTable {
public:
    static constexpr int kHalf = 4;  // 9-point stencil

    GTable(const GTransform& G, double x_lo, double x_hi, std::size_t max_fft = std::size_t{1} << 22) : sigma_(G.opt_.sigma) {
        const std::size_t n = G.nodes();
        const double dtau = G.dtau();
        // Lagrange error ~ (du tau_max)^9 / 9!; du tau_max <= 0.3 keeps it near 1e-10
        const double want = 2.0 * std::numbers::pi * G.tau_max() / (0.3 * dtau);
        std::size_t N = 1;
        while (N < std::max<double>(static_cast<double>(n), want) && N < max_fft) N <<= 1;
        if (N < n) throw Error(Errc::PreconditionViolated, "FFT length below the tau grid size");
        du_ = 2.0 * std::numbers::pi / (static_cast<double>(N) * dtau);
        step_phase_ = du_ * G.tau_max();
        u0_ = std::log(x_lo) - (kHalf + 1) * du_;
        const double u1 = std::log(x_hi) + (kHalf + 1) * du_;
        const std::size_t count = static_cast<std::size_t>(std::ceil((u1 - u0_) / du_)) + 1;
        if (count > N) throw Error(Errc::PreconditionViolated, "x range exceeds the FFT period");
        v0_.resize(count);
        v1_.resize(count);

        fftw_complex* buf = fftw_alloc_complex(N);
        fftw_plan plan;
        {
            std::lock_guard<std::mutex> lk(planner_mutex());
            plan = fftw_plan_dft_1d(static_cast<int>(N), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        }
        const double tau0 = G.tau_[0];
        for (int comp = 0; comp < 2; ++comp) {
            const auto& h = comp == 0 ? G.h0_ : G.h1_;
            for (std::size_t j = 0; j < N; ++j) {
                cplx v(0.0);
                if (j < n) v = h[j] * std::polar(1.0, -static_cast<double>(j) * dtau * u0_);
                buf[j][0] = v.real();
                buf[j][1] = v.imag();
            }
            fftw_execute(plan);
            auto& out = comp == 0 ? v0_ : v1_;
            for (std::size_t k = 0; k < count; ++k) {
                const double u = u0_ + du_ * static_cast<double>(k);
                // F(u) = e^{sigma u} G(e^u) = (dtau / 2 pi) e^{-i tau0 u} sum_j h_j e^{-i j dtau u}
                out[k] = cplx(buf[k][0], buf[k][1]) * std::polar(dtau / (2.0 * std::numbers::pi), -tau0 * u);
            }
        }
        {
            std::lock_guard<std::mutex> lk(planner_mutex());
            fftw_destroy_plan(plan);
        }
        fftw_free(buf);
        n_fft_ = N;

        // spot check against the direct sum
        for (int i = 0; i <= 8; ++i) {
            const double x = x_lo * std::pow(x_hi / x_lo, (i + 0.37) / 9.0);
            const GPair a = (*this)(x), b = G(x);
            const double scale = std::max({std::abs(b.g0), std::abs(b.g1), 1e-300});
            max_check_ = std::max(max_check_, std::max(std::abs(a.g0 - b.g0), std::abs(a.g1 - b.g1)) / scale);
            max_abs_check_ = std::max(max_abs_check_, std::max(std::abs(a.g0 - b.g0), std::abs(a.g1 - b.g1)));
        }
    }

    GPair operator()(double x) const {
        const double u = std::log(x);
        const double pos = (u - u0_) / du_;
        const long k0 = static_cast<long>(std::floor(pos)) - kHalf + 1;
        if (k0 < 0 || k0 + 2 * kHalf >= static_cast<long>(v0_.size()))
            throw Error(Errc::DomainError, "x outside the tabulated range");
        cplx a0(0.0), a1(0.0);
        for (int i = 0; i <= 2 * kHalf; ++i) {
            double l = 1.0;
            const double xi = static_cast<double>(k0 + i);
            for (int m = 0; m <= 2 * kHalf; ++m)
                if (m != i) l *= (pos - static_cast<double>(k0 + m)) / (xi - static_cast<double>(k0 + m));
            a0 += l * v0_[static_cast<std::size_t>(k0 + i)];
            a1 += l * v1_[static_cast<std::size_t>(k0 + i)];
        }
        const double sc = std::exp(-sigma_ * u);
        return {a0 * sc, a1 * sc};
    }

    std::size_t fft_length() const { return n_fft_; }
    double grid_step() const { return du_; }
    double step_phase() const { return step_phase_; }
    double max_rel_check() const { return max_check_; }
    double max_abs_check() const { return max_abs_check_; }

private:
    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }

    double sigma_, u0_ = 0.0, du_ = 0.0, step_phase_ = 0.0, max_check_ = 0.0, max_abs_check_ = 0.0;
    std::size_t n_fft_ = 0;
    std::vector<cplx> v0_, v1_;
};

// ---------------------------------------------------------------------------
// Oscillatory expansion
// ---------------------------------------------------------------------------

/// x int g(y) e(eps 3 (x y)^{1/3}) (x y)^{-j/3} dy.
inline cplx oscillatory_basis(double x, int j, int eps, const TestFunction& g) {
    const double lo = g.lo(), hi = g.hi();
    const double cycles = 3.0 * std::cbrt(x) * (std::cbrt(hi) - std::cbrt(lo)) + std::abs(g.theta) * (hi - lo);
    const std::size_t panels = static_cast<std::size_t>(std::ceil(cycles)) + 8;
    static const quad::Rule rule = quad::gauss_legendre(16);
    return x * quad::gauss_panels(
                   [&](double y) {
                       const double z = x * y;
                       return g(y) * e_real(eps * 3.0 * std::cbrt(z)) * std::pow(z, -j / 3.0);
                   },
                   lo, hi, panels, rule);
}

/// x int |g(y)| (x y)^{-1/3} dy, the size of the leading term.
inline double oscillatory_envelope(double x, const TestFunction& g) {
    static const quad::Rule rule = quad::gauss_legendre(16);
    return x * quad::gauss_panels([&](double y) { return std::abs(g(y)) * std::pow(x * y, -1.0 / 3.0); }, g.lo(), g.hi(), 16, rule);
}

/// Least-squares constants c_j, d_j (j = 1..J) for G_+ and G_- on a training grid, weighted by the envelope.
class GAsymptotic {
public:
    GAsymptotic(const GTransform& G, const std::vector<double>& train, int J = 4) : g_(G.test_function()), J_(J) {
        for (int sgn : {+1, -1}) {
            Eigen::MatrixXcd A(static_cast<Eigen::Index>(train.size()), 2 * J);
            Eigen::VectorXcd b(static_cast<Eigen::Index>(train.size()));
            for (std::size_t r = 0; r < train.size(); ++r) {
                const double x = train[r];
                const double env = oscillatory_envelope(x, g_);
                for (int j = 1; j <= J; ++j) {
                    A(static_cast<Eigen::Index>(r), 2 * (j - 1)) = oscillatory_basis(x, j, +1, g_) / env;
                    A(static_cast<Eigen::Index>(r), 2 * (j - 1) + 1) = oscillatory_basis(x, j, -1, g_) / env;
                }
                b(static_cast<Eigen::Index>(r)) = G(x).sign(sgn) / env;
            }
            const Eigen::VectorXcd sol = A.colPivHouseholderQr().solve(b);
            auto& c = sgn > 0 ? plus_ : minus_;
            c.assign(sol.data(), sol.data() + sol.size());
        }
    }

    /// (c_j, d_j) for sign s.
    std::pair<cplx, cplx> coefficients(int sign, int j) const {
        const auto& c = sign > 0 ? plus_ : minus_;
        return {c[static_cast<std::size_t>(2 * (j - 1))], c[static_cast<std::size_t>(2 * (j - 1) + 1)]};
    }

    /// j = 1 model of G_sign at x. Requires x X >= 10.
    cplx leading(int sign, double x) const {
        if (x * g_.X() < 10.0) throw Error(Errc::BelowTransition, "x X < 10");
        const auto [c, d] = coefficients(sign, 1);
        return c * oscillatory_basis(x, 1, +1, g_) + d * oscillatory_basis(x, 1, -1, g_);
    }

    /// Joint relative residual of (G_+, G_-) after removing the j = 1 model, measured against
    /// the size of the two j = 1 components |c B^+| + |d B^-|.
    double residual(const GPair& G, double x) const {
        const cplx bp = oscillatory_basis(x, 1, +1, g_), bm = oscillatory_basis(x, 1, -1, g_);
        double num = 0.0, den = 0.0;
        for (int s : {+1, -1}) {
            const auto [c, d] = coefficients(s, 1);
            num += std::norm(G.sign(s) - (c * bp + d * bm));
            den += std::norm(std::abs(c * bp) + std::abs(d * bm));
        }
        return std::sqrt(num / den);
    }

    /// G_0 + i G_1 of the j = 1 model.
    cplx leading_analytic(double x) const {
        const cplx p = leading(+1, x), m = leading(-1, x);
        return 0.5 * (p + m) + cplx(0.0, 0.5) * (m - p);
    }

    int terms() const { return J_; }

private:
    TestFunction g_;
    int J_;
    std::vector<cplx> plus_, minus_;
};

inline cplx g_transform_asymptotic(double x, const GAsymptotic& model, int sign) { return model.leading(sign, x); }

// ---------------------------------------------------------------------------
// Voronoi formula
// ---------------------------------------------------------------------------

struct VoronoiInstance {
    i64 a = 1, q = 1, r = 1;
    TestFunction g;
    SpectralParams alpha{};
};

struct CutoffReport {
    double N2 = 0.0;        // bound on n1^2 n2
    double tail_max = 0.0;  // max |G| beyond the cutoff relative to the peak inside
    double peak = 0.0;
    std::size_t terms = 0;
};

/// sum_n lambda(r, n) e(a n / q) g(n).
inline cplx voronoi_lhs(const VoronoiInstance& in, const CoeffTable& coeffs) {
    if (in.q < 1) throw Error(Errc::DomainError, "q must be positive");
    if (gcd(in.a, in.q) != 1) throw Error(Errc::NotInvertible, "gcd(a, q) must be 1");
    const i64 lo = static_cast<i64>(std::floor(in.g.lo())) + 1;
    const i64 hi = static_cast<i64>(std::ceil(in.g.hi())) - 1;
    cplx s(0.0);
    for (i64 n = std::max<i64>(1, lo); n <= hi; ++n) {
        const cplx gv = in.g(static_cast<double>(n));
        if (gv == cplx(0.0)) continue;
        s += coeffs(in.r, n) * e_frac(in.a * n, in.q) * gv;
    }
    return s;
}

struct VoronoiRhs {
    cplx value{0.0, 0.0};
    CutoffReport report;
    std::vector<i64> n1_values;
};

/// n1^2 n2 <= cutoff_factor * q^3 r K^3 / X: beyond it x X exceeds cutoff_factor K^3.
inline double voronoi_cutoff(const VoronoiInstance& in, double cutoff_factor) {
    const double K = in.g.K();
    const double qr3 = static_cast<double>(in.q) * in.q * in.q * in.r;
    return cutoff_factor * qr3 * K * K * K / in.g.X();
}

/// q sum_pm sum_{n1 | q r} sum_{n2} lambda(n1, n2) / (n1 n2) S(r abar, pm n2; q r / n1) G_pm(n1^2 n2 / (q^3 r)).
inline VoronoiRhs voronoi_rhs(const VoronoiInstance& in, const CoeffTable& coeffs, double cutoff_factor = 100.0,
                              double tail_tol = 1e-6) {
    if (gcd(in.a, in.q) != 1) throw Error(Errc::NotInvertible, "gcd(a, q) must be 1");
    const double N2 = voronoi_cutoff(in, cutoff_factor);
    const double qr3 = static_cast<double>(in.q) * in.q * in.q * in.r;
    const double x_lo = 1.0 / qr3, x_hi = 4.0 * N2 / qr3;
    ContourOptions opt;
    opt.x_lo = x_lo;
    opt.x_hi = x_hi;
    const GTransform G(in.g, in.alpha, opt);
    std::unique_ptr<GTable> table;
    try {
        auto t = std::make_unique<GTable>(G, x_lo, x_hi);
        if (t->max_rel_check() < 1e-7) table = std::move(t);
    } catch (const Error&) {
    }
    auto eval = [&](double x) { return table ? (*table)(x) : G(x); };

    VoronoiRhs out;
    out.report.N2 = N2;
    const i64 qr = in.q * in.r;
    const i64 abar = inverse_mod(in.a, in.q);
    double peak = 0.0;
    cplx total(0.0);
    for (i64 n1 : divisors(qr)) {
        out.n1_values.push_back(n1);
        const i64 c = qr / n1;
        const i64 n2max = static_cast<i64>(std::floor(N2 / (static_cast<double>(n1) * n1)));
        // S(r abar, pm n2; c) depends on n2 mod c only
        std::vector<double> Sp(static_cast<std::size_t>(c)), Sm(static_cast<std::size_t>(c));
        for (i64 t = 0; t < c; ++t) {
            Sp[static_cast<std::size_t>(t)] = detail::kloosterman_real(in.r * abar, t, c);
            Sm[static_cast<std::size_t>(t)] = detail::kloosterman_real(in.r * abar, -t, c);
        }
        for (i64 n2 = 1; n2 <= n2max; ++n2) {
            const double x = static_cast<double>(n1) * n1 * n2 / qr3;
            const GPair gv = eval(x);
            peak = std::max({peak, std::abs(gv.plus()), std::abs(gv.minus())});
            const cplx lam = coeffs(n1, n2) / (static_cast<double>(n1) * n2);
            const double sp = Sp[static_cast<std::size_t>(n2 % c)];
            const double sm = Sm[static_cast<std::size_t>(n2 % c)];
            total += lam * (sp * gv.plus() + sm * gv.minus());
            ++out.report.terms;
        }
    }
    double tail = 0.0;
    for (int i = 1; i <= 16; ++i) {
        const double x = N2 * (1.0 + 3.0 * i / 16.0) / qr3;
        const GPair gv = eval(x);
        tail = std::max({tail, std::abs(gv.plus()), std::abs(gv.minus())});
    }
    out.report.peak = peak;
    out.report.tail_max = peak > 0.0 ? tail / peak : 0.0;
    if (out.report.tail_max >= tail_tol)
        throw Error(Errc::CutoffUnreached, "|G| beyond the n2 cutoff is " + std::to_string(out.report.tail_max) + " of its peak");
    out.value = static_cast<double>(in.q) * total;
    return out;
}

}  // namespace momentlab
