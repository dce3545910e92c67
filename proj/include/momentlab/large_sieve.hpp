#pragma once

// Both sides of the large-sieve inequalities and the duality ratio.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "core_arith.hpp"
#include "quadrature.hpp"

namespace momentlab {

struct CoeffVector {
    i64 start = 1;
    std::vector<cplx> a;

    i64 length() const { return static_cast<i64>(a.size()); }
    double norm2() const {
        double s = 0.0;
        for (const auto& v : a) s += std::norm(v);
        return s;
    }
};

struct SieveResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio() const { return rhs > 0.0 ? lhs / rhs : 0.0; }
};

namespace detail {

/// sum over gamma in `residues` of |sum_m a_m e(gamma m / q)|^2.
inline double additive_form(const CoeffVector& a, i64 q, const std::vector<i64>& residues) {
    const RootTable w(q);
    double s = 0.0;
    const i64 n0 = reduce(a.start, q);
    for (i64 g : residues) {
        cplx acc{0.0, 0.0};
        i64 idx = mul_mod(g, n0, q);
        for (const auto& v : a.a) {
            acc += v * w(idx);
            idx += g;
            if (idx >= q) idx -= q;
        }
        s += std::norm(acc);
    }
    return s;
}

inline std::vector<i64> all_residues(i64 q) {
    std::vector<i64> r(static_cast<std::size_t>(q));
    for (i64 i = 0; i < q; ++i) r[static_cast<std::size_t>(i)] = i;
    return r;
}

}  // namespace detail

/// sum over gamma mod D of |sum a_m e(gamma m/D)|^2 against (N + D) ||a||^2, N the length.
inline SieveResult sieve_single(const CoeffVector& a, i64 D) {
    SieveResult r;
    r.lhs = detail::additive_form(a, D, detail::all_residues(D));
    r.rhs = static_cast<double>(a.length() + D) * a.norm2();
    return r;
}

/// c in [C, 2C) coprime to D, primitive gamma mod cD, against (M + D C^2) ||a||^2.
inline SieveResult sieve_level(const CoeffVector& a, i64 C, i64 D, i64 M) {
    SieveResult r;
    for (i64 c = C; c < 2 * C; ++c) {
        if (gcd(c, D) != 1) continue;
        r.lhs += detail::additive_form(a, c * D, unit_iter(c * D));
    }
    r.rhs = static_cast<double>(M + D * C * C) * a.norm2();
    return r;
}

struct PhaseFunction {
    std::function<double(double)> f;
    std::function<double(double)> df;
};

struct HybridResult : SieveResult {
    double X = 0.0;
    std::size_t evaluations = 0;
};

/// Integrated form over t in [-T, T] of the level sieve twisted by e(t f(m)).
/// X = sup 1/|f'| on [N, 2N] is taken from a dense grid.
inline HybridResult sieve_hybrid(const CoeffVector& a, const PhaseFunction& ph, double T, i64 C, i64 D,
                                 double rel_tol = 1e-9) {
    HybridResult r;
    const i64 N = a.start, L = a.length();
    double minabs = std::numeric_limits<double>::infinity();
    const int grid = 4096;
    for (int i = 0; i <= grid; ++i) {
        const double x = static_cast<double>(N) + static_cast<double>(N) * i / grid;
        minabs = std::min(minabs, std::abs(ph.df(x)));
    }
    for (i64 m = N; m < N + L; ++m) minabs = std::min(minabs, std::abs(ph.df(static_cast<double>(m))));
    if (minabs < 1e-12) throw Error(Errc::PhaseDerivativeVanishes, "|f'| < 1e-12 on [N, 2N]");
    r.X = 1.0 / minabs;
    r.rhs = (static_cast<double>(C * C * D) * T + r.X) * a.norm2();
    if (T <= 0.0) return r;

    // Frequencies gamma/(cD) enter as twisted coefficient vectors b_{gamma}(m).
    std::vector<std::vector<cplx>> b;
    for (i64 c = C; c < 2 * C; ++c) {
        if (gcd(c, D) != 1) continue;
        const i64 q = c * D;
        const RootTable w(q);
        for (i64 g : unit_iter(q)) {
            std::vector<cplx> row(static_cast<std::size_t>(L));
            for (i64 j = 0; j < L; ++j) row[static_cast<std::size_t>(j)] = a.a[static_cast<std::size_t>(j)] * w(mul_mod(g, N + j, q));
            b.push_back(std::move(row));
        }
    }
    if (b.empty()) return r;
    std::vector<double> fm(static_cast<std::size_t>(L));
    double fmin = std::numeric_limits<double>::infinity(), fmax = -fmin;
    for (i64 j = 0; j < L; ++j) {
        fm[static_cast<std::size_t>(j)] = ph.f(static_cast<double>(N + j));
        fmin = std::min(fmin, fm[static_cast<std::size_t>(j)]);
        fmax = std::max(fmax, fm[static_cast<std::size_t>(j)]);
    }
    std::vector<cplx> ph_t(static_cast<std::size_t>(L));
    auto integrand = [&](double t) {
        for (i64 j = 0; j < L; ++j) ph_t[static_cast<std::size_t>(j)] = e_real(t * fm[static_cast<std::size_t>(j)]);
        double s = 0.0;
        for (const auto& row : b) {
            cplx acc{0.0, 0.0};
            for (i64 j = 0; j < L; ++j) acc += row[static_cast<std::size_t>(j)] * ph_t[static_cast<std::size_t>(j)];
            s += std::norm(acc);
        }
        return s;
    };
    // Panels sized so that the widest frequency gap turns at most twice per panel.
    const double cycles = 2.0 * T * (fmax - fmin);
    const std::size_t panels = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(cycles / 2.0)));
    quad::SimpsonStats st;
    const double coarse = quad::gauss_panels(integrand, -T, T, panels, quad::gauss_legendre(8));
    r.lhs = quad::adaptive_simpson(integrand, -T, T, rel_tol * std::abs(coarse) + 1e-300, panels, 30, &st);
    r.evaluations = st.evaluations;
    return r;
}

/// Closed-form t-integral: sum b b' * sin(2 pi T (f1 - f2)) / (pi (f1 - f2)).
inline double hybrid_kernel_lhs(const CoeffVector& a, const PhaseFunction& ph, double T, i64 C, i64 D) {
    const i64 N = a.start, L = a.length();
    double s = 0.0;
    for (i64 c = C; c < 2 * C; ++c) {
        if (gcd(c, D) != 1) continue;
        const i64 q = c * D;
        for (i64 g : unit_iter(q)) {
            for (i64 i = 0; i < L; ++i)
                for (i64 j = 0; j < L; ++j) {
                    const double df = ph.f(static_cast<double>(N + i)) - ph.f(static_cast<double>(N + j));
                    const double k = (df == 0.0) ? 2.0 * T : std::sin(2.0 * std::numbers::pi * T * df) / (std::numbers::pi * df);
                    const cplx bb = a.a[static_cast<std::size_t>(i)] * std::conj(a.a[static_cast<std::size_t>(j)]) *
                                    e_frac(mul_mod(g, i - j + q * L, q), q);
                    s += k * bb.real();
                }
        }
    }
    return s;
}

/// Ratio of the operator norms of phi and its adjoint via Hermitian eigen-solves.
inline double duality_ratio(const Eigen::MatrixXcd& phi) {
    const Eigen::MatrixXcd g1 = phi.adjoint() * phi;
    const Eigen::MatrixXcd g2 = phi * phi.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> e1(g1, Eigen::EigenvaluesOnly), e2(g2, Eigen::EigenvaluesOnly);
    const double l1 = e1.eigenvalues().maxCoeff(), l2 = e2.eigenvalues().maxCoeff();
    if (l1 == 0.0 && l2 == 0.0) return 1.0;
    return l1 / l2;
}

// ---------------------------------------------------------------------------
// Randomized sweeps
// ---------------------------------------------------------------------------

enum class SieveLemma { Single, Level, Hybrid };

struct SweepRow {
    i64 C = 1, D = 1, N = 1, M = 1;
    double T = 0.0, X = 0.0;
    std::string phase;
    double lhs = 0.0, rhs = 0.0;
    double ratio() const { return rhs > 0 ? lhs / rhs : 0.0; }
};

namespace detail {

inline double unit_uniform(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }
inline i64 uniform_int(std::mt19937_64& g, i64 lo, i64 hi) { return lo + static_cast<i64>(g() % static_cast<std::uint64_t>(hi - lo + 1)); }

inline CoeffVector random_coeffs(std::mt19937_64& g, i64 start, i64 len) {
    CoeffVector a;
    a.start = start;
    a.a.resize(static_cast<std::size_t>(len));
    for (auto& v : a.a) v = {2.0 * unit_uniform(g) - 1.0, 2.0 * unit_uniform(g) - 1.0};
    return a;
}

}  // namespace detail

inline PhaseFunction linear_phase() { return {[](double x) { return x; }, [](double) { return 1.0; }}; }

/// 3 kappa x^{1/3}, the dual-sum phase shape.
inline PhaseFunction cube_root_phase(double kappa) {
    return {[kappa](double x) { return 3.0 * kappa * std::cbrt(x); },
            [kappa](double x) { return kappa * std::pow(x, -2.0 / 3.0); }};
}

inline SweepRow sweep_instance(SieveLemma lemma, std::mt19937_64& g, int trial) {
    SweepRow row;
    switch (lemma) {
        case SieveLemma::Single: {
            row.N = detail::uniform_int(g, 1, 64);
            row.D = detail::uniform_int(g, 1, 64);
            const auto a = detail::random_coeffs(g, row.N, row.N);
            const auto r = sieve_single(a, row.D);
            row.M = row.N;
            row.lhs = r.lhs;
            row.rhs = r.rhs;
            break;
        }
        case SieveLemma::Level: {
            row.C = detail::uniform_int(g, 1, 8);
            row.D = detail::uniform_int(g, 1, 6);
            row.N = detail::uniform_int(g, 1, 256);
            row.M = detail::uniform_int(g, 1, row.N);
            const auto a = detail::random_coeffs(g, row.N, row.M);
            const auto r = sieve_level(a, row.C, row.D, row.M);
            row.lhs = r.lhs;
            row.rhs = r.rhs;
            break;
        }
        case SieveLemma::Hybrid: {
            row.C = detail::uniform_int(g, 1, 4);
            row.D = detail::uniform_int(g, 1, 4);
            row.N = detail::uniform_int(g, 4, 32);
            row.M = row.N;
            row.T = 0.05 + 1.95 * detail::unit_uniform(g);
            const bool cube = trial % 2 == 1;
            const double kappa = 0.5 + 4.0 * detail::unit_uniform(g);
            const PhaseFunction ph = cube ? cube_root_phase(kappa) : linear_phase();
            row.phase = cube ? "cube_root" : "linear";
            const auto a = detail::random_coeffs(g, row.N, row.N);
            const auto r = sieve_hybrid(a, ph, row.T, row.C, row.D);
            row.X = r.X;
            row.lhs = r.lhs;
            row.rhs = r.rhs;
            break;
        }
    }
    return row;
}

inline std::vector<SweepRow> sieve_sweep(SieveLemma lemma, int trials, std::uint64_t seed) {
    std::vector<SweepRow> rows;
    rows.reserve(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        std::mt19937_64 g(seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(t));
        rows.push_back(sweep_instance(lemma, g, t));
    }
    return rows;
}

inline double max_ratio(const std::vector<SweepRow>& rows) {
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, r.ratio());
    return m;
}

}  // namespace momentlab
