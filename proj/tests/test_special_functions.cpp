#include <gtest/gtest.h>

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <random>

#include "momentlab/bessel.hpp"
#include "momentlab/bump.hpp"
#include "momentlab/gamma.hpp"
#include "momentlab/mellin.hpp"

using namespace momentlab;

namespace {

using mpc = boost::multiprecision::cpp_complex_50;
using mpf = boost::multiprecision::cpp_bin_float_50;

// log Gamma by upward shift to Re z > 80 and a long Stirling series, in 50 digits.
mpc lgamma_oracle(mpc z) {
    mpc shift = 0;
    while (z.real() < 80) {
        shift += log(z);
        z += 1;
    }
    const mpf pi = boost::math::constants::pi<mpf>();
    mpc s = (z - mpf(0.5)) * log(z) - z + log(2 * pi) / 2;
    mpc p = 1 / z;
    const mpc iz2 = p * p;
    for (int k = 1; k <= 20; ++k) {
        const mpf b = boost::math::bernoulli_b2n<mpf>(k);
        s += b / (2 * k * (2 * k - 1)) * p;
        p *= iz2;
    }
    return s - shift;
}

cplx gamma_ell_oracle(int ell, cplx s, const SpectralParams& sp) {
    const mpf pi = boost::math::constants::pi<mpf>();
    const mpc ss(s.real(), s.imag());
    mpc lg = log(mpf(0.5)) + (-3 * ss - mpf(1.5)) * log(pi);
    for (const auto& a : sp.alpha) {
        const mpc aa(a.real(), a.imag());
        lg += lgamma_oracle((1 + ss + aa + ell) / 2) - lgamma_oracle((-ss - aa + ell) / 2);
    }
    const mpc v = exp(lg);
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

// =============================================================================
// bessel_j / bessel_y
// =============================================================================

TEST(BesselJ, ZeroArgument) {
    for (int k = 1; k < 12; ++k) EXPECT_EQ(bessel_j(k, 0.0), 0.0);
    EXPECT_EQ(bessel_j(0, 0.0), 1.0);
}

TEST(BesselJ, SmallArgumentHomogeneity) {
    for (int k = 2; k <= 10; ++k) {
        const double x = 1e-4;
        EXPECT_NEAR(bessel_j(k, x / 2) / bessel_j(k, x), std::ldexp(1.0, -k), 1e-8 * std::ldexp(1.0, -k));
    }
}

TEST(BesselJ, FrozenValues) {
    EXPECT_NEAR(bessel_j(4, 2.0 * std::numbers::pi), 0.315680466939417489080, 1e-14);
    EXPECT_NEAR(bessel_j(11, 37.5), -0.0792186887263167088773, 1e-14);
    EXPECT_NEAR(bessel_y(3, 20.0), 0.149673262713394103714, 1e-14);
    EXPECT_NEAR(bessel_y(11, 37.5), 0.107141553526358691788, 1e-14);
}

TEST(BesselJ, AgreesWithBoostOnGrid) {
    double worst = 0.0;
    for (int k = 0; k <= 40; ++k)
        for (int i = 0; i <= 400; ++i) {
            const double x = std::pow(10.0, -3.0 + 6.0 * i / 400.0);
            worst = std::max(worst, std::abs(bessel_j(k, x) - boost::math::cyl_bessel_j(k, x)));
        }
    EXPECT_LT(worst, 1e-12);
}

TEST(BesselY, AgreesWithBoostRelative) {
    double worst = 0.0;
    for (int k = 0; k <= 20; ++k)
        for (int i = 0; i <= 300; ++i) {
            const double x = std::pow(10.0, -2.0 + 5.0 * i / 300.0);
            const double ref = boost::math::cyl_neumann(k, x);
            worst = std::max(worst, std::abs(bessel_y(k, x) - ref) / std::max(1.0, std::abs(ref)));
        }
    EXPECT_LT(worst, 1e-11);
}

TEST(BesselJ, ThreeTermRecurrence) {
    for (int k = 1; k <= 12; ++k)
        for (int i = 0; i <= 500; ++i) {
            const double z = 0.1 + (100.0 - 0.1) * i / 500.0;
            EXPECT_NEAR(bessel_j(k - 1, z) + bessel_j(k + 1, z), 2.0 * k / z * bessel_j(k, z), 1e-9);
        }
}

TEST(BesselY, CrossoverOverlap) {
    for (int n = 0; n <= 12; ++n) {
        const double zc = bessel_detail::crossover(n);
        for (double z : {zc, zc * 1.05, zc * 1.3}) {
            const auto h = bessel_detail::hankel(n, z);
            EXPECT_NEAR(h.first, bessel_detail::miller_all(n, z)[static_cast<std::size_t>(n)], 1e-9) << n << " " << z;
            EXPECT_NEAR(h.second, bessel_detail::neumann_y(n, z)[static_cast<std::size_t>(n)], 1e-9) << n << " " << z;
        }
    }
}

TEST(BesselY, WronskianIdentity) {
    // J_{n+1} Y_n - J_n Y_{n+1} = 2 / (pi z)
    for (int n = 0; n <= 10; ++n)
        for (double z : {0.3, 2.0, 9.5, 40.0, 300.0}) {
            const double w = bessel_j(n + 1, z) * bessel_y(n, z) - bessel_j(n, z) * bessel_y(n + 1, z);
            EXPECT_NEAR(w * std::numbers::pi * z / 2.0, 1.0, 1e-9);
        }
}

// =============================================================================
// w_split
// =============================================================================

TEST(WSplit, RejectsNonPositive) {
    EXPECT_THROW(w_split(3, 0.0), Error);
    EXPECT_THROW(w_split(3, -1.0), Error);
}

TEST(WSplit, ReconstructionGrid) {
    for (int k = 3; k <= 12; ++k)
        for (int i = 0; i <= 200; ++i) {
            const double x = std::pow(10.0, -3.0 + std::log10(50.0 / 1e-3) * i / 200.0);
            const auto s = w_split(k, x);
            EXPECT_NEAR(s.reconstruct(), bessel_j(k, 2.0 * std::numbers::pi * x), 1e-10) << k << " " << x;
        }
}

TEST(WSplit, LargeArgumentEnvelope) {
    for (int k = 3; k <= 12; ++k) {
        double A = 0.0;
        for (int i = 0; i <= 500; ++i) {
            const double x = 10.0 + 90.0 * i / 500.0;
            A = std::max(A, std::abs(w_split(k, x).W) * std::pow(1.0 + x, 1.5) / x);
        }
        EXPECT_LT(A, 2.0) << k;
    }
}

TEST(WSplit, SmallArgumentEnvelope) {
    for (int k = 3; k <= 12; ++k) {
        double A = 0.0;
        for (int i = 0; i <= 300; ++i) {
            const double x = std::pow(10.0, -6.0 + 5.0 * i / 300.0);
            A = std::max(A, std::abs(w_split(k, x).W) / std::pow(x, k));
        }
        EXPECT_TRUE(std::isfinite(A));
        // leading coefficient pi^k / (2 k!)
        EXPECT_LT(A, std::pow(std::numbers::pi, k) / (2.0 * std::tgamma(k + 1.0)) * 1.01) << k;
    }
}

TEST(WSplit, CombinedEnvelopeConstant) {
    for (int k = 3; k <= 12; ++k) {
        double A = 0.0;
        for (int i = 0; i <= 800; ++i) {
            const double x = std::pow(10.0, -4.0 + 6.0 * i / 800.0);
            A = std::max(A, std::abs(w_split(k, x).W) / w_envelope(k, x));
        }
        EXPECT_LT(A, 8.0) << k;
    }
}

TEST(WSplit, SmoothAcrossTransition) {
    const int k = 6;
    const double a = 6.0 / (2.0 * std::numbers::pi);
    double prev = std::abs(w_split(k, a * 0.9).W), maxjump = 0.0;
    for (int i = 1; i <= 2000; ++i) {
        const double x = a * (0.9 + 1.3 * i / 2000.0);
        const double v = std::abs(w_split(k, x).W);
        maxjump = std::max(maxjump, std::abs(v - prev));
        prev = v;
    }
    EXPECT_LT(maxjump, 2e-3);
}

// =============================================================================
// gamma factors
// =============================================================================

TEST(LogGamma, RealAxisMatchesStd) {
    for (double x : {0.1, 0.5, 1.0, 2.5, 7.0, 20.0, 150.0})
        EXPECT_NEAR(lgamma_c(cplx(x, 0.0)).real(), std::lgamma(x), 1e-12 * std::max(1.0, std::abs(std::lgamma(x))));
    EXPECT_NEAR(std::abs(gamma_c(cplx(-2.5, 0.0))), std::abs(std::tgamma(-2.5)), 1e-12);
}

TEST(LogGamma, ImaginaryAxisModulus) {
    // |Gamma(iy)|^2 = pi / (y sinh(pi y))
    for (double y : {0.3, 1.0, 5.0, 20.0, 60.0}) {
        const double lhs = 2.0 * lgamma_c(cplx(0.0, y)).real();
        EXPECT_NEAR(lhs, std::log(std::numbers::pi / (y * std::sinh(std::numbers::pi * y))), 1e-11 * std::max(1.0, std::abs(lhs)));
    }
}

TEST(LogGamma, AgainstHighPrecisionOracle) {
    std::mt19937_64 g(11);
    std::uniform_real_distribution<double> re(-20.0, 20.0), im(-100.0, 100.0);
    for (int t = 0; t < 100; ++t) {
        const cplx z(re(g), im(g));
        const mpc o = exp(lgamma_oracle(mpc(z.real(), z.imag())));
        const cplx ref(static_cast<double>(o.real()), static_cast<double>(o.imag()));
        EXPECT_LT(rel_err(gamma_c(z), ref), 1e-11) << z;
    }
}

TEST(GammaEll, DegenerateSpectralParams) {
    const auto sp = SpectralParams::from_nu(1.0 / 3.0, 1.0 / 3.0);
    for (const auto& a : sp.alpha) EXPECT_NEAR(std::abs(a), 0.0, 1e-15);
}

TEST(GammaEll, FrozenSpotValue) {
    const SpectralParams zero{};
    const cplx s(-0.5, 10.0);
    EXPECT_LT(rel_err(gamma_pm(+1, s, zero), cplx(0.234669785057751778967, 0.667030802872713452414)), 1e-10);
    EXPECT_LT(rel_err(gamma_pm(-1, s, zero), cplx(0.667030802872622558752, -0.234669785057719801439)), 1e-10);
    const auto sp = SpectralParams::direct({0.1, 0.2}, {-0.3, 0.05}, {0.2, -0.25});
    EXPECT_LT(rel_err(gamma_ell(0, {0.3, -2.5}, sp), cplx(-0.00997880244119378840690, -0.0561880882153320232710)), 1e-10);
}

TEST(GammaEll, DefiningProductOracle) {
    std::mt19937_64 g(23);
    std::uniform_real_distribution<double> sr(-1.5, 1.5), st(-60.0, 60.0), ar(-0.3, 0.3);
    for (int t = 0; t < 100; ++t) {
        const cplx s(sr(g), st(g));
        const auto sp = SpectralParams::from_nu(cplx(1.0 / 3.0 + ar(g), ar(g)), cplx(1.0 / 3.0 + ar(g), ar(g)));
        for (int ell : {0, 1}) {
            cplx v;
            try {
                v = gamma_ell(ell, s, sp);
            } catch (const Error&) {
                continue;
            }
            EXPECT_LT(rel_err(v, gamma_ell_oracle(ell, s, sp)), 1e-10) << s;
        }
    }
}

TEST(GammaEll, SchwarzReflection) {
    const auto sp = SpectralParams::direct({0.0, 0.3}, {0.0, -0.3}, {0.0, 0.0});
    for (const cplx s : {cplx(0.2, 3.0), cplx(-0.4, -7.5), cplx(0.5, 22.0)})
        for (int ell : {0, 1}) EXPECT_LT(rel_err(gamma_ell(ell, std::conj(s), sp), std::conj(gamma_ell(ell, s, sp))), 1e-12);
}

TEST(GammaEll, LinearityOfSignedCombinations) {
    const auto sp = SpectralParams::from_nu({0.3, 0.1}, {0.35, -0.05});
    const cplx s(0.1, 4.0);
    const cplx gp = gamma_pm(+1, s, sp), gm = gamma_pm(-1, s, sp);
    EXPECT_LT(std::abs(gp + gm - 2.0 * gamma_ell(0, s, sp)), 1e-13 * std::abs(gp));
    EXPECT_LT(std::abs(gp - gm + 2.0 * gamma_ell(1, s, sp)), 1e-13 * std::abs(gp));
}

TEST(GammaEll, NearPoleThrows) {
    const SpectralParams zero{};
    // numerator (1 + s)/2 = 0 at s = -1
    try {
        gamma_ell(0, cplx(-1.0 + 1e-10, 0.0), zero);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NearPole);
    }
    // denominator -s/2 = -1 at s = 2
    EXPECT_THROW(gamma_ell(0, cplx(2.0, 0.0), zero), Error);
    EXPECT_NO_THROW(gamma_ell(0, cplx(-1.0 + 1e-6, 0.0), zero));
}

TEST(GammaEll, StirlingGrowth) {
    const SpectralParams zero{};
    for (double sigma : {-0.5, 0.0, 0.5})
        for (int sign : {+1, -1}) {
            double lo = 1e300, hi = 0.0;
            for (double tau = 5.0; tau <= 200.0; tau += 0.5) {
                const double r = std::abs(gamma_pm(sign, {sigma, tau}, zero)) / std::pow(1.0 + tau, 3.0 * (sigma + 0.5));
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
            EXPECT_LT(hi / lo, 4.0) << sigma;
        }
}

// =============================================================================
// bumps
// =============================================================================

TEST(Bump, PlateauIsExactlyOne) {
    const auto w = Bump::plateau(0.5, 1.0, 2.0, 3.0);
    for (int i = 0; i <= 100; ++i) EXPECT_EQ(w(1.0 + i / 100.0), 1.0);
    EXPECT_EQ(w(0.5), 0.0);
    EXPECT_EQ(w(3.0), 0.0);
    EXPECT_GT(w(0.75), 0.0);
    EXPECT_LT(w(0.75), 1.0);
}

TEST(Bump, DyadicPartitionOfUnity) {
    for (int i = 0; i <= 1000; ++i) {
        const double x = std::pow(2.0, -5.0 + 15.0 * i / 1000.0);
        double s = 0.0;
        for (int j = -10; j <= 15; ++j) s += Bump::dyadic(j)(x);
        EXPECT_NEAR(s, 1.0, 1e-14) << x;
    }
}

TEST(Bump, SharpPeakAndSupport) {
    const auto w = Bump::sharp(1.0, 2.0);
    EXPECT_NEAR(w(1.5), 1.0, 1e-15);
    EXPECT_EQ(w(1.0), 0.0);
    EXPECT_LT(w(1.05), 1e-30);
}

TEST(Bump, DerivativeBoundsFinite) {
    const auto b = default_window().derivative_bounds();
    EXPECT_NEAR(b[0], 1.0, 1e-12);
    for (double v : b) EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(b[2], 0.0);
    const auto d = Bump::dyadic(3).derivative_bounds();
    EXPECT_LT(d[1], 10.0);
}

TEST(Bump, RejectsBadPlateau) {
    EXPECT_THROW(Bump::plateau(1.0, 0.5, 2.0, 3.0), Error);
}

// =============================================================================
// Mellin weight F
// =============================================================================

TEST(MellinF, BetaConjugation) {
    const auto w1 = default_window();
    MellinWeightSpec sp{1.0, 1e6, 3e6, +1, 3, 0.1};
    for (double y : {-30.0, -4.0, 0.0, 7.5}) {
        const cplx fp = mellin_weight_F(y, sp, w1);
        sp.beta = -1;
        const cplx fm = mellin_weight_F(-y, sp, w1);
        sp.beta = +1;
        EXPECT_NEAR(std::abs(fp - std::conj(fm)), 0.0, 1e-12);
    }
}

TEST(MellinF, TableMatchesAdaptive) {
    const auto w1 = default_window();
    const MellinWeightSpec sp{2.0, 1e8, 5e8, +1, 5, 0.1};
    const MellinTable t(sp, w1, 200.0);
    for (double y : {-200.0, -60.0, 0.0, 13.0, 150.0}) EXPECT_NEAR(std::abs(t(y) - mellin_weight_F(y, sp, w1)), 0.0, 1e-10);
}

TEST(MellinF, ZeroFrequencyMatchesDirectIntegral) {
    const auto w1 = default_window();
    const MellinWeightSpec sp{1.0, 100.0, 50.0, -1, 3, 0.1};
    const auto rule = quad::gauss_legendre(40);
    const cplx direct = quad::gauss_panels(
        [&](double x) { return w1(x) * w_beta(-1, 3, 2.0 * sp.ratio() * x) / x; }, 0.25, 4.0, 400, rule);
    EXPECT_NEAR(std::abs(mellin_weight_F(0.0, sp, w1) - direct), 0.0, 1e-12);
}

TEST(MellinF, DecayAndEnvelopeOnSmallGrid) {
    const auto w1 = default_window();
    for (double r : {1e-2, 1.0, 10.0})
        for (int beta : {+1, -1}) {
            const MellinWeightSpec sp{1.0, 1e20, r * 1e20, beta, 3, 0.1};
            const double K = sp.K();
            const MellinTable t(sp, w1, 3.0 * K);
            double peak = 0.0;
            for (int i = -200; i <= 200; ++i) peak = std::max(peak, std::abs(t(2.0 * K * i / 200.0)));
            EXPECT_LE(peak, 8.0 * std::pow(sp.M, sp.eps) * sp.envelope()) << r;
            for (double y : {2.0 * K, -2.0 * K, 2.5 * K, -3.0 * K}) EXPECT_LT(std::abs(t(y)), 1e-8) << r << " " << y;
        }
}
