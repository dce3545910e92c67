#pragma once

// Dirichlet characters mod a prime, Kloosterman sums and the character-sum
// factorizations used on the Petersson side.

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <atomic>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "core_arith.hpp"

namespace momentlab {

// ---------------------------------------------------------------------------
// Characters
// ---------------------------------------------------------------------------

inline i64 primitive_root(i64 q) {
    if (!is_prime(q)) throw Error(Errc::DomainError, "primitive_root needs a prime, got " + std::to_string(q));
    if (q == 2) return 1;
    const auto fac = Modulus(q - 1).factorization();
    for (i64 g = 2; g < q; ++g) {
        bool ok = true;
        for (const auto& pp : fac)
            if (pow_mod(g, (q - 1) / pp.p, q) == 1) { ok = false; break; }
        if (ok) return g;
    }
    throw Error(Errc::DomainError, "no primitive root");
}

/// Discrete logarithm table against the smallest primitive root; dlog[0] = -1.
class DlogTable {
public:
    explicit DlogTable(i64 q) : q_(q), g_(primitive_root(q)), log_(static_cast<std::size_t>(q), -1) {
        i64 x = 1;
        for (i64 i = 0; i < q - 1; ++i) {
            log_[static_cast<std::size_t>(x)] = i;
            x = mul_mod(x, g_, q);
        }
    }
    i64 modulus() const { return q_; }
    i64 generator() const { return g_; }
    i64 operator()(i64 x) const { return log_[static_cast<std::size_t>(reduce(x, q_))]; }

private:
    i64 q_, g_;
    std::vector<i64> log_;
};

/// psi(g^t) = e(index * t / (q - 1)); values are kept as exponents mod q - 1.
class DirichletCharacter {
public:
    DirichletCharacter(std::shared_ptr<const DlogTable> dlog, i64 index)
        : dlog_(std::move(dlog)), index_(reduce(index, dlog_->modulus() - 1)) {}

    DirichletCharacter(i64 q, i64 index) : DirichletCharacter(std::make_shared<DlogTable>(q), index) {}

    i64 modulus() const { return dlog_->modulus(); }
    i64 generator() const { return dlog_->generator(); }
    i64 index() const { return index_; }
    i64 order_modulus() const { return modulus() - 1; }
    bool is_principal() const { return index_ == 0; }

    /// Exponent t with psi(x) = e(t / (q - 1)); -1 when q | x.
    i64 exponent(i64 x) const {
        const i64 l = (*dlog_)(x);
        if (l < 0) return -1;
        return mul_mod(index_, l, order_modulus());
    }

    cplx operator()(i64 x) const {
        const i64 t = exponent(x);
        if (t < 0) return {0.0, 0.0};
        return e_frac(t, order_modulus());
    }

    /// psi(-1) in {+1, -1}.
    int parity() const {
        if (modulus() == 2) return 1;
        return (exponent(-1) == 0) ? 1 : -1;
    }

private:
    std::shared_ptr<const DlogTable> dlog_;
    i64 index_;
};

inline std::vector<DirichletCharacter> characters_mod(i64 q) {
    auto t = std::make_shared<const DlogTable>(q);
    std::vector<DirichletCharacter> out;
    for (i64 j = 0; j < q - 1; ++j) out.emplace_back(t, j);
    return out;
}

// ---------------------------------------------------------------------------
// Kloosterman sums
// ---------------------------------------------------------------------------

/// Reference S(m, n; c): direct sum over all units.
inline cplx kloosterman(i64 m, i64 n, i64 c) {
    if (c == 1) return {1.0, 0.0};
    const RootTable w(c);
    cplx s{0.0, 0.0};
    for (i64 x : unit_iter(c)) {
        const i64 xi = inverse_mod(x, c);
        s += w(mul_mod(m, x, c) + mul_mod(n, xi, c));
    }
    return s;
}

namespace detail {

/// Real-valued S(a, b; q) by brute force (Kloosterman sums are real).
inline double kloosterman_real(i64 a, i64 b, i64 q) {
    if (q == 1) return 1.0;
    double s = 0.0;
    const double step = 2.0 * std::numbers::pi / static_cast<double>(q);
    for (i64 x = 1; x < q; ++x) {
        if (gcd(x, q) != 1) continue;
        const i64 t = reduce(mul_mod(a, x, q) + mul_mod(b, inverse_mod(x, q), q), q);
        s += std::cos(step * static_cast<double>(t));
    }
    return s;
}

}  // namespace detail

/// S(m, n; c) through twisted multiplicativity over the prime-power parts,
/// brute force at each prime power, memoized by (m mod c, n mod c, c).
class KloostermanCache {
public:
    double operator()(i64 m, i64 n, i64 c) const {
        if (c == 1) return 1.0;
        const Key key{reduce(m, c), reduce(n, c), c};
        {
            std::shared_lock lock(mu_);
            auto it = memo_.find(key);
            if (it != memo_.end()) { ++hits_; return it->second; }
        }
        const Modulus mod(c);
        double v = 1.0;
        for (const auto& pp : mod.factorization()) {
            const i64 rest = c / pp.pe;
            const i64 ri = inverse_mod(rest, pp.pe);
            v *= detail::kloosterman_real(mul_mod(key.m, ri, pp.pe), mul_mod(key.n, ri, pp.pe), pp.pe);
        }
        std::unique_lock lock(mu_);
        memo_.emplace(key, v);
        ++misses_;
        return v;
    }

    std::size_t size() const { std::shared_lock lock(mu_); return memo_.size(); }
    std::uint64_t hits() const { return hits_; }
    std::uint64_t misses() const { return misses_; }

private:
    struct Key {
        i64 m, n, c;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            std::uint64_t h = 1469598103934665603ull;
            for (i64 v : {k.m, k.n, k.c}) { h ^= static_cast<std::uint64_t>(v); h *= 1099511628211ull; }
            return static_cast<std::size_t>(h);
        }
    };
    mutable std::shared_mutex mu_;
    mutable std::unordered_map<Key, double, KeyHash> memo_;
    mutable std::atomic<std::uint64_t> hits_{0}, misses_{0};
};

inline cplx kloosterman_fast(i64 m, i64 n, i64 c) {
    static KloostermanCache cache;
    return {cache(m, n, c), 0.0};
}

/// Prime-power tables S(1, t; p^e) used by the pipeline. Build single-threaded,
/// then share read-only.
class LocalKloosterman {
public:
    explicit LocalKloosterman(i64 table_limit = 4096) : limit_(table_limit) {}

    void prepare(i64 pe, i64 p) {
        if (pe > limit_ || tables_.count(pe)) return;
        const auto q = static_cast<std::size_t>(pe);
        std::vector<double> cs(q), t(q, 0.0);
        for (std::size_t j = 0; j < q; ++j) cs[j] = std::cos(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(pe));
        // S(1, j; q) = sum_x e((x + j xbar) / q): each unit x walks the index x + j xbar
        for (i64 x = 1; x < pe; ++x) {
            if (x % p == 0) continue;
            const auto xi = static_cast<std::size_t>(inverse_mod(x, pe));
            std::size_t idx = static_cast<std::size_t>(x);
            for (std::size_t j = 0; j < q; ++j) {
                t[j] += cs[idx];
                idx += xi;
                if (idx >= q) idx -= q;
            }
        }
        tables_.emplace(pe, std::move(t));
    }

    /// Make every prime-power factor of q available.
    void prepare_modulus(const std::vector<PrimePower>& f) {
        for (const auto& pp : f) prepare(pp.pe, pp.p);
    }

    /// S(a, b; p^e).
    /// S(a, b; p^e); `misses` counts evaluations not served by a table.
    double local(i64 a, i64 b, const PrimePower& pp, std::uint64_t* misses = nullptr) const {
        const i64 q = pp.pe;
        a = reduce(a, q);
        b = reduce(b, q);
        const bool ua = a % pp.p != 0, ub = b % pp.p != 0;
        if (ua || ub) {
            auto it = tables_.find(q);
            if (it != tables_.end()) return it->second[static_cast<std::size_t>(mul_mod(a, b, q))];
            if (misses) ++*misses;
            return detail::kloosterman_real(ua ? 1 : mul_mod(a, b, q), ua ? mul_mod(a, b, q) : 1, q);
        }
        if (pp.e == 1) return static_cast<double>(pp.p - 1);
        if (misses) ++*misses;
        return detail::kloosterman_real(a, b, q);
    }

    /// S(a, b; q) for q with factorization f.
    double operator()(i64 a, i64 b, i64 q, const std::vector<PrimePower>& f, std::uint64_t* misses = nullptr) const {
        double v = 1.0;
        for (const auto& pp : f) {
            const i64 ri = inverse_mod(q / pp.pe, pp.pe);
            v *= local(mul_mod(a, ri, pp.pe), mul_mod(b, ri, pp.pe), pp, misses);
        }
        return v;
    }

    std::size_t table_count() const { return tables_.size(); }

private:
    i64 limit_;
    std::unordered_map<i64, std::vector<double>> tables_;
};

/// S_psi(m, n; c) = sum over units x mod c of psi(x) e((m x + n xbar)/c), M1 | c.
inline cplx twisted_kloosterman(const DirichletCharacter& psi, i64 m, i64 n, i64 c) {
    const i64 q = psi.modulus();
    if (c % q != 0)
        throw Error(Errc::ModulusMismatch, std::to_string(q) + " does not divide " + std::to_string(c));
    const RootTable w(c);
    cplx s{0.0, 0.0};
    for (i64 x : unit_iter(c)) {
        const i64 xi = inverse_mod(x, c);
        s += psi(x) * w(mul_mod(m, x, c) + mul_mod(n, xi, c));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Character sum over the parity class
// ---------------------------------------------------------------------------

/// Split c = c0 * M1^b1 * M2^b2 with gcd(c0, M1 M2) = 1.
struct LevelSplit {
    i64 c0;
    int b1, b2;
};

inline LevelSplit split_level(i64 c, i64 M1, i64 M2) {
    LevelSplit s{c, 0, 0};
    while (s.c0 % M1 == 0) { s.c0 /= M1; ++s.b1; }
    while (s.c0 % M2 == 0) { s.c0 /= M2; ++s.b2; }
    return s;
}

/// Brute force: sum over all psi mod M1 with the projector (1 + (-1)^k psi(-1))/2
/// of S_psi(m, m'; M1 M2 c).
inline cplx char_sum_C_brute(i64 m, i64 mp, i64 M1, i64 M2, i64 c, int k) {
    const i64 q = M1 * M2 * c;
    const DlogTable dl(M1);
    const i64 o = M1 - 1;
    const RootTable w(q), wo(o);
    const int sk = (k % 2 == 0) ? 1 : -1;
    std::vector<double> proj(static_cast<std::size_t>(o));
    const i64 lm1 = dl(-1);
    for (i64 j = 0; j < o; ++j) {
        const double par = (M1 == 2) ? 1.0 : (mul_mod(j, lm1, o) == 0 ? 1.0 : -1.0);
        proj[static_cast<std::size_t>(j)] = 0.5 * (1.0 + sk * par);
    }
    cplx total{0.0, 0.0};
    for (i64 j = 0; j < o; ++j) {
        if (proj[static_cast<std::size_t>(j)] == 0.0) continue;
        cplx s{0.0, 0.0};
        for (i64 x : unit_iter(q)) {
            const i64 xi = inverse_mod(x, q);
            s += wo(mul_mod(j, dl(x), o)) * w(mul_mod(m, x, q) + mul_mod(mp, xi, q));
        }
        total += proj[static_cast<std::size_t>(j)] * s;
    }
    return total;
}

/// T_eta = sum over alpha mod P, alpha = eta mod M1, of e(u (alpha m + alphabar m') / P).
inline cplx restricted_twist(i64 m, i64 mp, i64 M1, i64 P, i64 u, int eta) {
    cplx s{0.0, 0.0};
    for (i64 a = reduce(eta, M1); a < P; a += M1) {
        if (gcd(a, P) != 1) continue;
        const i64 ai = inverse_mod(a, P);
        s += e_frac(mul_mod(u, reduce(mul_mod(a, m, P) + mul_mod(ai, mp, P), P), P), P);
    }
    return s;
}

/// Closed form valid for every c: with P = M1^{1+b1} and Q = M1 M2 c / P,
/// C = (M1-1)/2 * S(Pbar m, Pbar m'; Q) * (T_+ + (-1)^k T_-).
/// For b1 = 0 this is (M1-1)/2 * sum_eta w_eta e(eta (m+m') conj(M2 c)/M1) S(M1bar m, M1bar m'; M2 c).
inline cplx char_sum_C_closed(i64 m, i64 mp, i64 M1, i64 M2, i64 c, int k) {
    const LevelSplit ls = split_level(c, M1, M2);
    const i64 P = ipow(M1, 1 + ls.b1);
    const i64 Q = M1 * M2 * c / P;
    const i64 Pi = inverse_mod(P, Q), Qi = inverse_mod(Q, P);
    const double sk = (k % 2 == 0) ? 1.0 : -1.0;
    const cplx t = restricted_twist(m, mp, M1, P, Qi, 1) + sk * restricted_twist(m, mp, M1, P, Qi, -1);
    const double s = std::real(kloosterman(mul_mod(Pi, m, Q), mul_mod(Pi, mp, Q), Q));
    return 0.5 * static_cast<double>(M1 - 1) * s * t;
}

/// The closed form exactly as displayed (b1 = 0 only).
inline cplx char_sum_C_literal(i64 m, i64 mp, i64 M1, i64 M2, i64 c, int k) {
    if (c % M1 == 0) throw Error(Errc::BadFactorization, "literal closed form needs M1 not dividing c");
    const i64 q = M2 * c;
    const i64 inv = inverse_mod(q, M1);
    const i64 M1i = inverse_mod(M1, q);
    const cplx S = kloosterman(mul_mod(M1i, m, q), mul_mod(M1i, mp, q), q);
    const double sk = (k % 2 == 0) ? 1.0 : -1.0;
    const cplx t = e_frac(mul_mod(inv, m + mp, M1), M1) + sk * e_frac(mul_mod(inv, -(m + mp), M1), M1);
    return 0.5 * static_cast<double>(M1 - 1) * t * S;
}

// ---------------------------------------------------------------------------
// Factorization identities
// ---------------------------------------------------------------------------

/// Right side of the divisor decomposition of S(m,n;c) e(-(m+n)/c):
/// sum over ab = c of sum over x mod b, (x(x+a), b) = 1, of e((xbar m - conj(x+a) n)/b).
inline cplx stwist_decompose(i64 m, i64 n, i64 c) {
    cplx s{0.0, 0.0};
    for (i64 b : divisors(c)) {
        const i64 a = c / b;
        if (b == 1) { s += 1.0; continue; }
        for (i64 x = 0; x < b; ++x) {
            if (gcd(mul_mod(x, x + a, b), b) != 1) continue;
            const i64 xi = inverse_mod(x, b), yi = inverse_mod(x + a, b);
            s += e_frac(mul_mod(xi, m, b) - mul_mod(yi, n, b), b);
        }
    }
    return s;
}

/// Separated factorization of the parity-class character sum, literal display.
/// Exact when M1 does not divide c; see char_sum_separated_exact for all c.
inline cplx separ_char_decompose(i64 m, i64 mp, i64 M1, i64 M2, i64 c, int k) {
    if (c < 1 || M1 == M2 || !is_prime(M1) || !is_prime(M2))
        throw Error(Errc::BadFactorization, "need c >= 1 and distinct primes M1, M2");
    const LevelSplit ls = split_level(c, M1, M2);
    const i64 M = M1 * M2;
    const i64 P1 = ipow(M1, ls.b1);
    const i64 Q1 = ipow(M2, 1 + ls.b2);
    const i64 c0 = ls.c0;
    const i64 Mc = M * c;
    const double sk = (k % 2 == 0) ? 1.0 : -1.0;
    cplx total{0.0, 0.0};
    for (int eta : {1, -1}) {
        const double weight = eta == 1 ? 1.0 : sk;
        cplx s{0.0, 0.0};
        const cplx ph1 = e_real(static_cast<double>(eta) * static_cast<double>(reduce(m * P1, Mc)) / static_cast<double>(Mc));
        const cplx ph2 = e_real(static_cast<double>(eta) * static_cast<double>(reduce(mp * P1, Mc)) / static_cast<double>(Mc));
        for (i64 al = 0; al < P1; ++al) {
            const cplx a1 = e_frac(m * al, P1) * ph1;
            const cplx a2 = e_frac(-mp * al, P1) * ph2;
            for (i64 p1 : divisors(Q1)) {
                const i64 p2 = Q1 / p1;
                const i64 u1 = inverse_mod(M1 * c0, p1);
                for (i64 g1 = 0; g1 < p1; ++g1) {
                    if (gcd(mul_mod(g1, g1 + p2, p1), p1) != 1) continue;
                    const cplx b1 = e_frac(eta * mul_mod(mul_mod(u1, inverse_mod(g1, p1), p1), m, p1), p1);
                    const cplx b2 = e_frac(-eta * mul_mod(mul_mod(u1, inverse_mod(g1 + p2, p1), p1), mp, p1), p1);
                    for (i64 a : divisors(c0)) {
                        const i64 d = c0 / a;
                        const i64 u2 = inverse_mod(ipow(M1, 1 + ls.b1) * ipow(M2, 1 + ls.b2), d);
                        for (i64 g = 0; g < d; ++g) {
                            if (gcd(mul_mod(g, g + a, d), d) != 1) continue;
                            const cplx c1 = e_frac(eta * mul_mod(mul_mod(u2, inverse_mod(g, d), d), m, d), d);
                            const cplx c2 = e_frac(-eta * mul_mod(mul_mod(u2, inverse_mod(g + a, d), d), mp, d), d);
                            s += (a1 * b1 * c1) * (a2 * b2 * c2);
                        }
                    }
                }
            }
        }
        total += weight * s;
    }
    return 0.5 * static_cast<double>(M1 - 1) * total;
}

/// Exact separated form for every c. With P = M1^{1+b1}, R = M2^{1+b2},
/// Q = R c0, u = conj(Q) mod P and A = conj(P) m, B = conj(P) m' mod Q, it is
/// (M1-1)/2 sum_eta w_eta sum_{alpha = eta (M1)} e(u alpha m/P) e(u alphabar m'/P)
///   * [Stwist of S(A c0bar, B c0bar; R)] * [Stwist of S(A Rbar, B Rbar; c0)],
/// every factor depending on one of m, m' only.
inline cplx char_sum_separated_exact(i64 m, i64 mp, i64 M1, i64 M2, i64 c, int k) {
    if (c < 1 || M1 == M2 || !is_prime(M1) || !is_prime(M2))
        throw Error(Errc::BadFactorization, "need c >= 1 and distinct primes M1, M2");
    const LevelSplit ls = split_level(c, M1, M2);
    const i64 P = ipow(M1, 1 + ls.b1);
    const i64 R = ipow(M2, 1 + ls.b2);
    const i64 c0 = ls.c0;
    const i64 Q = R * c0;
    const i64 u = inverse_mod(Q, P);
    const i64 Pi = inverse_mod(P, Q);
    const i64 A = mul_mod(Pi, m, Q), B = mul_mod(Pi, mp, Q);
    const i64 c0i = inverse_mod(c0, R), Ri = inverse_mod(R, c0);
    const i64 uR = mul_mod(A, c0i, R), vR = mul_mod(B, c0i, R);
    const i64 uC = mul_mod(A, Ri, c0), vC = mul_mod(B, Ri, c0);

    // Separated pieces f(m-part) * g(m'-part), summed.
    cplx sR{0.0, 0.0};
    for (i64 p1 : divisors(R)) {
        const i64 p2 = R / p1;
        for (i64 g1 = 0; g1 < p1; ++g1) {
            if (gcd(mul_mod(g1, g1 + p2, p1), p1) != 1) continue;
            const cplx x = e_frac(mul_mod(inverse_mod(g1, p1), uR, p1), p1);
            const cplx y = e_frac(-mul_mod(inverse_mod(g1 + p2, p1), vR, p1), p1);
            sR += x * y;
        }
    }
    sR *= e_frac(uR, R) * e_frac(vR, R);
    cplx sC{0.0, 0.0};
    for (i64 a : divisors(c0)) {
        const i64 d = c0 / a;
        for (i64 g = 0; g < d; ++g) {
            if (gcd(mul_mod(g, g + a, d), d) != 1) continue;
            const cplx x = e_frac(mul_mod(inverse_mod(g, d), uC, d), d);
            const cplx y = e_frac(-mul_mod(inverse_mod(g + a, d), vC, d), d);
            sC += x * y;
        }
    }
    sC *= e_frac(uC, c0) * e_frac(vC, c0);

    const double sk = (k % 2 == 0) ? 1.0 : -1.0;
    cplx t{0.0, 0.0};
    for (int eta : {1, -1}) {
        cplx s{0.0, 0.0};
        for (i64 al = reduce(eta, M1); al < P; al += M1) {
            if (gcd(al, P) != 1) continue;
            s += e_frac(mul_mod(u, mul_mod(al, m, P), P), P) * e_frac(mul_mod(u, mul_mod(inverse_mod(al, P), mp, P), P), P);
        }
        t += (eta == 1 ? 1.0 : sk) * s;
    }
    return 0.5 * static_cast<double>(M1 - 1) * t * sR * sC;
}

}  // namespace momentlab
