#include <gtest/gtest.h>

#include <random>

#include "momentlab/gl3.hpp"

using namespace momentlab;

namespace {

// Sum over semistandard tableaux of shape (l1, l2) in letters 0..2 of the monomial prod t[entry].
cplx ssyt_oracle(int l1, int l2, const SatakeTriple& t) {
    cplx total(0.0);
    // rows are weakly increasing, so a row is determined by its letter counts
    for (int a0 = 0; a0 <= l1; ++a0)
        for (int a1 = 0; a0 + a1 <= l1; ++a1) {
            const int a2 = l1 - a0 - a1;
            std::vector<int> top;
            top.insert(top.end(), a0, 0);
            top.insert(top.end(), a1, 1);
            top.insert(top.end(), a2, 2);
            for (int b1 = 0; b1 <= l2; ++b1) {
                const int b2 = l2 - b1;
                std::vector<int> bot;
                bot.insert(bot.end(), b1, 1);
                bot.insert(bot.end(), b2, 2);
                bool ok = true;
                for (int j = 0; j < l2 && ok; ++j) ok = bot[static_cast<std::size_t>(j)] > top[static_cast<std::size_t>(j)];
                if (!ok) continue;
                cplx m(1.0);
                for (int v : top) m *= t[static_cast<std::size_t>(v)];
                for (int v : bot) m *= t[static_cast<std::size_t>(v)];
                total += m;
            }
        }
    return total;
}

SatakeTriple random_triple(std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const cplx a(u(g), u(g)), b(u(g), u(g));
    return {a, b, 1.0 / (a * b)};
}

long long ssyt_count(int l1, int l2) {
    return static_cast<long long>(std::llround(ssyt_oracle(l1, l2, {cplx(1.0), cplx(1.0), cplx(1.0)}).real()));
}

std::shared_ptr<const SatakeProvider> sym2(i64 lim) { return std::make_shared<Sym2DeltaSatake>(lim); }

}  // namespace

// =============================================================================
// tau
// =============================================================================

TEST(Tau, SmallValues) {
    const auto t = ramanujan_tau(30);
    EXPECT_TRUE(t[1] == 1);
    EXPECT_TRUE(t[2] == -24);
    EXPECT_TRUE(t[3] == 252);
    EXPECT_TRUE(t[4] == -1472);
    EXPECT_TRUE(t[5] == 4830);
    EXPECT_TRUE(t[6] == -6048);
    EXPECT_TRUE(t[23] == 18643272);
    EXPECT_EQ(to_string(t[6]), "-6048");
}

TEST(Tau, DirectExpansionOfTwentyFourthPower) {
    const int n = 200;
    std::vector<i128> poly(n, 0);
    poly[0] = 1;
    for (int m = 1; m < n; ++m)
        for (int rep = 0; rep < 24; ++rep)
            for (int i = n - 1; i >= m; --i) poly[static_cast<std::size_t>(i)] -= poly[static_cast<std::size_t>(i - m)];
    const auto t = ramanujan_tau(n);
    for (int k = 1; k <= n; ++k) EXPECT_TRUE(t[static_cast<std::size_t>(k)] == poly[static_cast<std::size_t>(k - 1)]) << k;
}

TEST(Tau, HeckeRelations) {
    const auto t = ramanujan_tau(5000);
    const SpfSieve sv(5000);
    for (i64 m = 1; m <= 70; ++m)
        for (i64 n = 1; m * n <= 5000; ++n)
            if (gcd(m, n) == 1) {
                EXPECT_TRUE(t[static_cast<std::size_t>(m * n)] == t[static_cast<std::size_t>(m)] * t[static_cast<std::size_t>(n)]);
            }
    // tau(p^2) = tau(p)^2 - p^11
    for (i64 p : {2, 3, 5, 7}) {
        const i128 p11 = static_cast<i128>(ipow(p, 11));
        EXPECT_TRUE(t[static_cast<std::size_t>(p * p)] == t[static_cast<std::size_t>(p)] * t[static_cast<std::size_t>(p)] - p11);
    }
}

TEST(Tau, DeligneBoundUpTo1e5) {
    const auto t = ramanujan_tau(100000);
    for (i64 p : SpfSieve(100000).primes()) EXPECT_NO_THROW(sym_square_satake(p, t[static_cast<std::size_t>(p)])) << p;
}

// =============================================================================
// Satake and Schur values
// =============================================================================

TEST(Satake, SymSquareTriple) {
    const auto t = ramanujan_tau(1000);
    for (i64 p : SpfSieve(1000).primes()) {
        const auto s = sym_square_satake(p, t[static_cast<std::size_t>(p)]);
        EXPECT_NEAR(std::abs(s[0] * s[1] * s[2] - 1.0), 0.0, 1e-12);
        for (const auto& z : s) EXPECT_NEAR(std::abs(z), 1.0, 1e-10);
        const cplx l = lambda_prime_power(1, 0, s);
        EXPECT_LE(std::abs(l), 3.0 + 1e-12);
        EXPECT_NEAR(l.imag(), 0.0, 1e-12);
    }
}

TEST(Satake, ViolationIsReported) {
    try {
        sym_square_satake(2, 1000);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::RamanujanViolation);
    }
}

TEST(Schur, TrivialCases) {
    const SatakeTriple one{cplx(1.0), cplx(1.0), cplx(1.0)};
    EXPECT_EQ(lambda_prime_power(0, 0, one), cplx(1.0));
    EXPECT_EQ(lambda_prime_power(1, 0, one), cplx(3.0));
    std::mt19937_64 g(1);
    const auto t = random_triple(g);
    EXPECT_LT(std::abs(lambda_prime_power(0, 0, t) - 1.0), 1e-15);
}

TEST(Schur, TwoOneShapeIdentity) {
    std::mt19937_64 g(2);
    for (int i = 0; i < 20; ++i) {
        const auto t = random_triple(g);
        const cplx e1 = t[0] + t[1] + t[2], e2 = t[0] * t[1] + t[0] * t[2] + t[1] * t[2];
        const cplx v = lambda_prime_power(1, 1, t);
        EXPECT_LT(std::abs(v - (e1 * e2 - 1.0)), 1e-10 * std::abs(e1 * e2));
        EXPECT_LT(std::abs(v - ssyt_oracle(2, 1, t)), 1e-10 * std::abs(e1 * e2));
    }
}

TEST(Schur, MatchesTableauxEnumeration) {
    std::mt19937_64 g(3);
    for (int a = 0; a <= 6; ++a)
        for (int b = 0; b <= 6; ++b) {
            const auto t = random_triple(g);
            const cplx o = ssyt_oracle(a + b, b, t);
            EXPECT_LT(std::abs(lambda_prime_power(a, b, t) - o), 1e-10 * std::max(1.0, std::abs(o))) << a << " " << b;
        }
}

TEST(Schur, DimensionFormulaCountsTableaux) {
    for (int l1 = 0; l1 <= 9; ++l1)
        for (int l2 = 0; l2 <= l1; ++l2) EXPECT_EQ(static_cast<long long>(schur_dimension(l1, l2)), ssyt_count(l1, l2));
}

TEST(Schur, PieriRule) {
    const auto t = ramanujan_tau(100);
    for (i64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29}) {
        const auto s = sym_square_satake(p, t[static_cast<std::size_t>(p)]);
        for (int a = 1; a <= 4; ++a) {
            const cplx lhs = lambda_prime_power(1, 0, s) * lambda_prime_power(a, 0, s);
            const cplx rhs = lambda_prime_power(a + 1, 0, s) + lambda_prime_power(a - 1, 1, s);
            EXPECT_LT(std::abs(lhs - rhs), 1e-11);
        }
    }
}

// =============================================================================
// CoeffTable
// =============================================================================

TEST(CoeffTable, UnitAndSpecValue) {
    const CoeffTable tab(sym2(2000), 2000);
    EXPECT_EQ(tab(1, 1), cplx(1.0));
    EXPECT_NEAR(tab(2, 1).real(), 576.0 / 2048.0 - 1.0, 1e-14);
    EXPECT_NEAR(tab(6, 1).real(), (tab(2, 1) * tab(3, 1)).real(), 1e-14);
}

TEST(CoeffTable, SchurValueAtFourTwo) {
    const auto prov = sym2(500);
    const CoeffTable tab(prov, 500);
    // (4, 2) = (2^2, 2^1): shape (3, 1, 0)
    EXPECT_LT(std::abs(tab(4, 2) - ssyt_oracle(3, 1, prov->at(2))), 1e-12);
}

TEST(CoeffTable, HeckeMultiplicativityExhaustive) {
    const CoeffTable tab(std::make_shared<SyntheticSatake>(5), 200000);
    const SpfSieve sv(200);
    int checked = 0;
    for (i64 m1 = 1; m1 <= 14; ++m1)
        for (i64 m2 = 1; m2 <= 200; ++m2)
            for (i64 n1 = 1; n1 * m1 <= 14; ++n1)
                for (i64 n2 = 1; n2 * m2 <= 200; ++n2) {
                    if (gcd(m1 * m2, n1 * n2) != 1) continue;
                    const cplx lhs = tab(m1 * n1, m2 * n2);
                    const cplx rhs = tab(m1, m2) * tab(n1, n2);
                    ASSERT_LT(std::abs(lhs - rhs), 1e-10 * std::max(1.0, std::abs(lhs)));
                    ++checked;
                }
    EXPECT_GT(checked, 10000);
}

TEST(CoeffTable, SelfDualSymmetricAndReal) {
    const CoeffTable tab(sym2(20000), 20000);
    for (i64 a = 1; a <= 100; ++a)
        for (i64 b = 1; b <= 100; ++b) {
            if (!tab.contains(a, b) || !tab.contains(b, a)) continue;
            EXPECT_NEAR(std::abs(tab(a, b) - tab(b, a)), 0.0, 1e-10);
            EXPECT_NEAR(tab(a, b).imag(), 0.0, 1e-10);
        }
}

TEST(CoeffTable, TrivialGivesTableauxCounts) {
    const CoeffTable tab(std::make_shared<TrivialSatake>(), 5000);
    const SpfSieve sv(5000);
    for (i64 n1 = 1; n1 <= 20; ++n1)
        for (i64 n2 = 1; n1 * n1 * n2 <= 5000; ++n2) {
            long long expect = 1;
            i64 a = n1, b = n2;
            for (i64 p : {2, 3, 5, 7, 11, 13, 17, 19}) {
                const int ea = valuation(a, p), eb = valuation(b, p);
                expect *= ssyt_count(ea + eb, eb);
                a /= ipow(p, ea);
                b /= ipow(p, eb);
            }
            // remaining large primes
            for (const auto& pp : Modulus(a * b).factorization()) {
                const int ea = valuation(a, pp.p), eb = valuation(b, pp.p);
                expect *= ssyt_count(ea + eb, eb);
            }
            EXPECT_EQ(tab(n1, n2), cplx(static_cast<double>(expect))) << n1 << " " << n2;
        }
}

TEST(CoeffTable, SparseRegionAndTranspose) {
    const CoeffTable tab(sym2(10000), 10000);
    EXPECT_TRUE(tab.contains(70, 2));
    EXPECT_NEAR(std::abs(tab(70, 2) - tab.direct(70, 2)), 0.0, 1e-12);
    // (3, 5000) is outside n1^2 n2 <= cap, (5000, 3) too; neither is stored
    EXPECT_FALSE(tab.contains(3, 5000));
    try {
        tab(3, 5000);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::TableTooSmall);
    }
    // transposed lookup for self-dual data: (2000, 2) served from (2, 2000)
    EXPECT_NEAR(std::abs(tab(2000, 2) - tab(2, 2000)), 0.0, 0.0);
}

TEST(CoeffTable, RowExtension) {
    CoeffTable tab(sym2(5000), 1000);
    EXPECT_EQ(tab.row_length(3), 1000 / 9);
    tab.extend_row(3, 4000);
    EXPECT_EQ(tab.row_length(3), 4000);
    EXPECT_NEAR(std::abs(tab(3, 3999) - tab.direct(3, 3999)), 0.0, 1e-12);
    EXPECT_THROW(tab.extend_row(100, 10), Error);
}

TEST(CoeffTable, MissingPrime) {
    try {
        CoeffTable tab(sym2(100), 1000);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::MissingPrime);
    }
    CoeffTable tab(sym2(100), 100);
    EXPECT_THROW(tab.extend_row(1, 500), Error);
}

TEST(CoeffTable, RankinSelbergSanityBand) {
    const CoeffTable tab(sym2(10000), 10000);
    for (i64 X : {100, 1000, 10000}) {
        double s = 0.0;
        for (i64 n = 1; n <= X; ++n) s += std::norm(tab(n, 1)) / static_cast<double>(n);
        const double r = s / std::log(static_cast<double>(X));
        EXPECT_GT(r, 0.25) << X;
        EXPECT_LT(r, 4.0) << X;
    }
}
