#pragma once

// Exact residue arithmetic and unit exponentials.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace momentlab {

using i64 = std::int64_t;
using i128 = __int128;
using cplx = std::complex<double>;

inline i64 reduce(i64 a, i64 c) {
    i64 r = a % c;
    return r < 0 ? r + c : r;
}

inline i64 mul_mod(i64 a, i64 b, i64 c) {
    return static_cast<i64>((static_cast<i128>(reduce(a, c)) * reduce(b, c)) % c);
}

inline i64 pow_mod(i64 a, i64 e, i64 c) {
    i64 r = 1 % c, b = reduce(a, c);
    while (e > 0) {
        if (e & 1) r = mul_mod(r, b, c);
        b = mul_mod(b, b, c);
        e >>= 1;
    }
    return r;
}

inline i64 gcd(i64 a, i64 b) { return std::gcd(a, b); }

inline bool is_prime(i64 n) {
    if (n < 2) return false;
    for (i64 p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

inline i64 next_prime(i64 n) {
    i64 p = n + 1;
    while (!is_prime(p)) ++p;
    return p;
}

struct PrimePower {
    i64 p;
    int e;
    i64 pe;
    bool operator==(const PrimePower&) const = default;
};

/// Positive modulus with its prime factorization (trial division).
class Modulus {
public:
    Modulus() : Modulus(1) {}

    explicit Modulus(i64 c) : c_(c) {
        if (c < 1) throw Error(Errc::DomainError, "modulus must be positive, got " + std::to_string(c));
        i64 n = c;
        for (i64 p = 2; p * p <= n; ++p) {
            if (n % p) continue;
            PrimePower pp{p, 0, 1};
            while (n % p == 0) { n /= p; ++pp.e; pp.pe *= p; }
            f_.push_back(pp);
        }
        if (n > 1) f_.push_back({n, 1, n});
    }

    i64 value() const { return c_; }
    const std::vector<PrimePower>& factorization() const& { return f_; }
    std::vector<PrimePower> factorization() && { return std::move(f_); }

    i64 phi() const {
        i64 r = 1;
        for (const auto& pp : f_) r *= (pp.pe / pp.p) * (pp.p - 1);
        return r;
    }

    bool operator==(const Modulus& o) const { return c_ == o.c_; }

private:
    i64 c_;
    std::vector<PrimePower> f_;
};

struct Residue {
    i64 value;
    i64 modulus;
    bool operator==(const Residue&) const = default;
};

inline Residue make_residue(i64 a, i64 c) { return {reduce(a, c), c}; }

inline i64 euler_phi(i64 c) { return Modulus(c).phi(); }

/// Inverse of a mod c, Euclid. Throws NotInvertible when gcd(a, c) > 1.
inline i64 inverse_mod(i64 a, i64 c) {
    if (c == 1) return 0;
    i64 r0 = c, r1 = reduce(a, c), s0 = 0, s1 = 1;
    while (r1 != 0) {
        i64 q = r0 / r1;
        i64 t = r0 - q * r1; r0 = r1; r1 = t;
        t = s0 - q * s1; s0 = s1; s1 = t;
    }
    if (r0 != 1)
        throw Error(Errc::NotInvertible, std::to_string(a) + " mod " + std::to_string(c));
    return reduce(s0, c);
}

inline Residue mod_inverse(i64 a, const Modulus& c) {
    return {inverse_mod(a, c.value()), c.value()};
}

/// exp(2*pi*i*a/c), with a reduced exactly first.
inline cplx e_frac(i64 a, i64 c) {
    const i64 r = reduce(a, c);
    if (r == 0) return {1.0, 0.0};
    if (4 * r == c) return {0.0, 1.0};
    if (2 * r == c) return {-1.0, 0.0};
    if (4 * r == 3 * c) return {0.0, -1.0};
    const double t = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(c);
    return {std::cos(t), std::sin(t)};
}

/// e(x) for real x.
inline cplx e_real(double x) {
    const double t = 2.0 * std::numbers::pi * (x - std::floor(x));
    return {std::cos(t), std::sin(t)};
}

inline Residue crt_combine(Residue r1, Residue r2) {
    const i64 c1 = r1.modulus, c2 = r2.modulus;
    if (gcd(c1, c2) != 1)
        throw Error(Errc::ModuliNotCoprime, std::to_string(c1) + ", " + std::to_string(c2));
    const i64 c = c1 * c2;
    if (c1 == 1) return {reduce(r2.value, c), c};
    if (c2 == 1) return {reduce(r1.value, c), c};
    // x = r1 + c1 * t, t = (r2 - r1) / c1 mod c2
    const i64 t = mul_mod(reduce(r2.value - r1.value, c2), inverse_mod(c1, c2), c2);
    return {reduce(r1.value + c1 * t, c), c};
}

/// Units mod c in ascending order; c = 1 yields the single class 0.
inline std::vector<i64> unit_iter(const Modulus& c) {
    const i64 n = c.value();
    if (n == 1) return {0};
    std::vector<char> ok(static_cast<std::size_t>(n), 1);
    ok[0] = 0;
    for (const auto& pp : c.factorization())
        for (i64 x = 0; x < n; x += pp.p) ok[static_cast<std::size_t>(x)] = 0;
    std::vector<i64> out;
    out.reserve(static_cast<std::size_t>(c.phi()));
    for (i64 x = 1; x < n; ++x)
        if (ok[static_cast<std::size_t>(x)]) out.push_back(x);
    return out;
}

inline std::vector<i64> unit_iter(i64 c) { return unit_iter(Modulus(c)); }

inline std::vector<i64> divisors(i64 n) {
    std::vector<i64> lo, hi;
    for (i64 d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        lo.push_back(d);
        if (d != n / d) hi.push_back(n / d);
    }
    lo.insert(lo.end(), hi.rbegin(), hi.rend());
    return lo;
}

/// Largest b with p^b | n.
inline int valuation(i64 n, i64 p) {
    int b = 0;
    while (n != 0 && n % p == 0) { n /= p; ++b; }
    return b;
}

inline i64 ipow(i64 b, int e) {
    i64 r = 1;
    while (e-- > 0) r *= b;
    return r;
}

/// Cached e(j/q) for j in [0, q).
class RootTable {
public:
    explicit RootTable(i64 q) : q_(q), w_(static_cast<std::size_t>(q)) {
        for (i64 j = 0; j < q; ++j) w_[static_cast<std::size_t>(j)] = e_frac(j, q);
    }
    i64 modulus() const { return q_; }
    const cplx& operator()(i64 j) const { return w_[static_cast<std::size_t>(reduce(j, q_))]; }

private:
    i64 q_;
    std::vector<cplx> w_;
};

/// Smallest-prime-factor sieve up to n.
class SpfSieve {
public:
    explicit SpfSieve(i64 n) : spf_(static_cast<std::size_t>(n + 1), 0) {
        for (i64 i = 2; i <= n; ++i) {
            if (spf_[static_cast<std::size_t>(i)]) continue;
            for (i64 j = i; j <= n; j += i)
                if (!spf_[static_cast<std::size_t>(j)]) spf_[static_cast<std::size_t>(j)] = static_cast<std::int32_t>(i);
        }
    }
    i64 limit() const { return static_cast<i64>(spf_.size()) - 1; }
    i64 spf(i64 n) const { return spf_[static_cast<std::size_t>(n)]; }

    std::vector<PrimePower> factor(i64 n) const {
        std::vector<PrimePower> out;
        while (n > 1) {
            const i64 p = spf(n);
            PrimePower pp{p, 0, 1};
            while (n % p == 0) { n /= p; ++pp.e; pp.pe *= p; }
            out.push_back(pp);
        }
        return out;
    }

    std::vector<i64> primes() const {
        std::vector<i64> out;
        for (i64 i = 2; i <= limit(); ++i)
            if (spf(i) == i) out.push_back(i);
        return out;
    }

private:
    std::vector<std::int32_t> spf_;
};

}  // namespace momentlab
