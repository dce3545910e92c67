#include <gtest/gtest.h>

#include <numeric>

#include "momentlab/core_arith.hpp"

using namespace momentlab;

// =============================================================================
// mod_inverse
// =============================================================================

TEST(ModInverse, SpecValues) {
    EXPECT_EQ(mod_inverse(3, Modulus(7)).value, 5);
    EXPECT_EQ(mod_inverse(10, Modulus(27)).value, 19);
    for (i64 c : {1, 2, 9, 100, 997}) EXPECT_EQ(mod_inverse(1, Modulus(c)).value, c == 1 ? 0 : 1);
}

TEST(ModInverse, NegativeInputsAreReduced) {
    EXPECT_EQ(mod_inverse(-4, Modulus(7)).value, 5);  // -4 = 3 mod 7
}

TEST(ModInverse, NotInvertibleThrows) {
    try {
        mod_inverse(6, Modulus(9));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NotInvertible);
    }
}

TEST(ModInverse, InvolutionAndBruteForce) {
    for (i64 c = 2; c <= 200; ++c) {
        for (i64 a = 0; a < c; ++a) {
            if (std::gcd(a, c) != 1) continue;
            const i64 r = inverse_mod(a, c);
            EXPECT_EQ((a * r) % c, 1);
            EXPECT_EQ(inverse_mod(r, c), a);
        }
    }
}

// =============================================================================
// e_frac
// =============================================================================

TEST(EFrac, SpecValues) {
    const cplx q = e_frac(1, 4);
    EXPECT_NEAR(q.real(), 0.0, 1e-15);
    EXPECT_NEAR(q.imag(), 1.0, 1e-15);
    const cplx w = e_frac(2, 3);
    EXPECT_NEAR(w.real(), -0.5, 1e-15);
    EXPECT_NEAR(w.imag(), -0.8660254037844386, 1e-15);
    for (i64 c : {1, 5, 12}) EXPECT_EQ(e_frac(c, c), cplx(1.0, 0.0));
}

TEST(EFrac, PeriodicityIsExact) {
    for (i64 c = 1; c <= 50; ++c)
        for (i64 a = -3 * c; a <= 3 * c; ++a) {
            EXPECT_EQ(e_frac(a + c, c), e_frac(a, c));
            EXPECT_NEAR(std::abs(e_frac(a, c)), 1.0, 1e-15);
        }
}

// =============================================================================
// crt_combine
// =============================================================================

TEST(Crt, SpecValues) {
    EXPECT_EQ(crt_combine({1, 3}, {1, 5}), (Residue{1, 15}));
    EXPECT_EQ(crt_combine({2, 3}, {0, 5}), (Residue{5, 15}));
    EXPECT_EQ(crt_combine({0, 1}, {4, 9}), (Residue{4, 9}));
}

TEST(Crt, ExhaustiveSmall) {
    for (i64 c1 = 1; c1 <= 12; ++c1)
        for (i64 c2 = 1; c2 <= 12; ++c2) {
            if (std::gcd(c1, c2) != 1) continue;
            for (i64 r1 = 0; r1 < c1; ++r1)
                for (i64 r2 = 0; r2 < c2; ++r2) {
                    const Residue x = crt_combine({r1, c1}, {r2, c2});
                    EXPECT_EQ(x.value % c1, r1);
                    EXPECT_EQ(x.value % c2, r2);
                }
        }
}

TEST(Crt, NonCoprimeThrows) {
    EXPECT_THROW(crt_combine({1, 4}, {1, 6}), Error);
}

// =============================================================================
// unit_iter / Modulus
// =============================================================================

TEST(UnitIter, SpecValues) {
    EXPECT_EQ(unit_iter(Modulus(6)), (std::vector<i64>{1, 5}));
    EXPECT_EQ(unit_iter(Modulus(1)), (std::vector<i64>{0}));
    EXPECT_EQ(unit_iter(Modulus(12)), (std::vector<i64>{1, 5, 7, 11}));
}

TEST(UnitIter, LengthIsPhiFromFactorization) {
    for (i64 c = 2; c <= 2000; ++c) {
        const Modulus m(c);
        i64 prod = 1;
        for (const auto& pp : m.factorization()) prod *= pp.pe;
        EXPECT_EQ(prod, c);
        i64 count = 0;
        for (i64 x = 1; x < c; ++x) count += std::gcd(x, c) == 1;
        EXPECT_EQ(static_cast<i64>(unit_iter(m).size()), count);
        EXPECT_EQ(m.phi(), count);
    }
}

TEST(ModulusTest, FactorizationShape) {
    const Modulus m(2 * 2 * 3 * 7 * 7 * 7);
    ASSERT_EQ(m.factorization().size(), 3u);
    EXPECT_EQ(m.factorization()[0], (PrimePower{2, 2, 4}));
    EXPECT_EQ(m.factorization()[1], (PrimePower{3, 1, 3}));
    EXPECT_EQ(m.factorization()[2], (PrimePower{7, 3, 343}));
    EXPECT_THROW(Modulus(0), Error);
}

TEST(SpfSieveTest, AgreesWithTrialDivision) {
    const SpfSieve s(5000);
    for (i64 n = 2; n <= 5000; ++n) EXPECT_EQ(s.factor(n), Modulus(n).factorization());
}
