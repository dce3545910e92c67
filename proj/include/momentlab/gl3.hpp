#pragma once

// Hecke coefficients lambda(n1, n2) of a GL(3) form from local Satake data.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "core_arith.hpp"

namespace momentlab {

using SatakeTriple = std::array<cplx, 3>;

/// Ramanujan tau(1..n_max) from prod (1 - q^n)^24 = (sum (-1)^k (2k+1) q^{k(k+1)/2})^8.
/// The cube of eta is sparse, so the eighth power is seven sparse products in 128-bit integers.
inline std::vector<i128> ramanujan_tau(i64 n_max) {
    if (n_max < 1) return {0};
    if (n_max > 100000) throw Error(Errc::DomainError, "ramanujan_tau supports n_max <= 1e5");
    const std::size_t len = static_cast<std::size_t>(n_max);  // coefficients of q^0..q^{n_max-1}
    std::vector<std::pair<std::size_t, i128>> cube;
    for (i64 k = 0;; ++k) {
        const std::size_t e = static_cast<std::size_t>(k * (k + 1) / 2);
        if (e >= len) break;
        cube.emplace_back(e, (k % 2 ? -1 : 1) * (2 * k + 1));
    }
    std::vector<i128> acc(len, 0), next(len);
    for (const auto& [e, c] : cube) acc[e] = c;
    for (int rep = 1; rep < 8; ++rep) {
        std::fill(next.begin(), next.end(), 0);
        for (std::size_t i = 0; i < len; ++i) {
            if (acc[i] == 0) continue;
            for (const auto& [e, c] : cube) {
                if (i + e >= len) break;
                next[i + e] += acc[i] * c;
            }
        }
        std::swap(acc, next);
    }
    std::vector<i128> tau(len + 1, 0);
    for (std::size_t n = 1; n <= len; ++n) tau[n] = acc[n - 1];
    return tau;
}

inline std::string to_string(i128 v) {
    if (v == 0) return "0";
    const bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    std::string s;
    while (u) { s.push_back(static_cast<char>('0' + static_cast<int>(u % 10))); u /= 10; }
    if (neg) s.push_back('-');
    return {s.rbegin(), s.rend()};
}

/// (alpha^2, 1, alpha^-2) with alpha + 1/alpha = tau(p) / p^{11/2}.
inline SatakeTriple sym_square_satake(i64 p, i128 tau_p) {
    const double t = static_cast<double>(tau_p) / std::pow(static_cast<double>(p), 5.5);
    if (std::abs(t) > 2.0 * (1.0 + 1e-12))
        throw Error(Errc::RamanujanViolation, "|tau(" + std::to_string(p) + ")| exceeds 2 p^{11/2}");
    const double c = std::clamp(0.5 * t, -1.0, 1.0);
    const cplx a = std::polar(1.0, 2.0 * std::acos(c));
    return {a, cplx(1.0), std::conj(a)};
}

/// Schur polynomial s_{(l1, l2, 0)} of a triple via Jacobi-Trudi: h_{l1} h_{l2} - h_{l1+1} h_{l2-1}.
inline cplx schur_two_row(int l1, int l2, const SatakeTriple& t) {
    const cplx e1 = t[0] + t[1] + t[2];
    const cplx e2 = t[0] * t[1] + t[0] * t[2] + t[1] * t[2];
    const cplx e3 = t[0] * t[1] * t[2];
    std::vector<cplx> h(static_cast<std::size_t>(l1 + 2), cplx(0.0));
    h[0] = 1.0;
    for (int k = 1; k <= l1 + 1; ++k) {
        cplx v = e1 * h[static_cast<std::size_t>(k - 1)];
        if (k >= 2) v -= e2 * h[static_cast<std::size_t>(k - 2)];
        if (k >= 3) v += e3 * h[static_cast<std::size_t>(k - 3)];
        h[static_cast<std::size_t>(k)] = v;
    }
    const cplx lower = l2 >= 1 ? h[static_cast<std::size_t>(l2 - 1)] : cplx(0.0);
    return h[static_cast<std::size_t>(l1)] * h[static_cast<std::size_t>(l2)] - h[static_cast<std::size_t>(l1 + 1)] * lower;
}

/// Number of semistandard tableaux of shape (l1, l2, 0) in three letters.
inline double schur_dimension(int l1, int l2) {
    return 0.5 * (l1 - l2 + 1.0) * (l2 + 1.0) * (l1 + 2.0);
}

/// lambda(p^a, p^b) = s_{(a+b, b, 0)}, checked against dim * rho^{a+2b} with rho the largest modulus.
inline cplx lambda_prime_power(int a, int b, const SatakeTriple& t) {
    if (a < 0 || b < 0) throw Error(Errc::DomainError, "negative exponent");
    const cplx v = schur_two_row(a + b, b, t);
    double rho = 0.0;
    for (const auto& z : t) rho = std::max(rho, std::abs(z));
    const double bound = schur_dimension(a + b, b) * std::pow(std::max(rho, 1.0), a + 2.0 * b);
    if (std::abs(v) > bound * (1.0 + 1e-9) + 1e-9)
        throw Error(Errc::ValidationError, "Schur value exceeds the tableau bound");
    return v;
}

/// Local data source for a GL(3) form.
class SatakeProvider {
public:
    virtual ~SatakeProvider() = default;
    virtual SatakeTriple at(i64 p) const = 0;
    virtual bool self_dual() const = 0;
    virtual bool tempered() const { return true; }
    /// Largest prime with data; 0 means unbounded.
    virtual i64 prime_limit() const { return 0; }
    virtual std::string name() const = 0;
};

class TrivialSatake final : public SatakeProvider {
public:
    SatakeTriple at(i64) const override { return {cplx(1.0), cplx(1.0), cplx(1.0)}; }
    bool self_dual() const override { return true; }
    std::string name() const override { return "trivial"; }
};

/// sym^2 of the discriminant form, from tau(p) for p up to a limit.
class Sym2DeltaSatake final : public SatakeProvider {
public:
    explicit Sym2DeltaSatake(i64 limit) : limit_(limit), tau_(ramanujan_tau(std::max<i64>(limit, 2))) {}

    SatakeTriple at(i64 p) const override {
        if (p > limit_) throw Error(Errc::MissingPrime, "no tau data for p = " + std::to_string(p));
        return sym_square_satake(p, tau_[static_cast<std::size_t>(p)]);
    }
    bool self_dual() const override { return true; }
    i64 prime_limit() const override { return limit_; }
    std::string name() const override { return "sym2delta"; }
    const std::vector<i128>& tau() const { return tau_; }

private:
    i64 limit_;
    std::vector<i128> tau_;
};

/// Random unimodular triples with product 1, seeded per prime. Not automorphic.
class SyntheticSatake final : public SatakeProvider {
public:
    explicit SyntheticSatake(std::uint64_t seed) : seed_(seed) {}

    SatakeTriple at(i64 p) const override {
        std::mt19937_64 g(seed_ ^ (static_cast<std::uint64_t>(p) * 0x9E3779B97F4A7C15ull));
        std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
        const double t1 = u(g), t2 = u(g);
        return {std::polar(1.0, t1), std::polar(1.0, t2), std::polar(1.0, -t1 - t2)};
    }
    bool self_dual() const override { return false; }
    std::string name() const override { return "synthetic"; }

private:
    std::uint64_t seed_;
};

/// Immutable lambda(n1, n2) over n1^2 n2 <= capacity: dense rows for n1 <= 64, a sparse map above.
/// extend_row widens a single row before use (dual sums need long rows at a fixed small n1).
class CoeffTable {
public:
    static constexpr i64 kDenseRows = 64;

    CoeffTable(std::shared_ptr<const SatakeProvider> sp, i64 capacity)
        : sp_(std::move(sp)), capacity_(capacity), sieve_(std::max<i64>(capacity, 2)) {
        if (capacity < 1) throw Error(Errc::DomainError, "capacity must be positive");
        check_primes(capacity);
        for (i64 n1 = 1; n1 <= std::min(kDenseRows, capacity); ++n1) {
            const i64 len = capacity / (n1 * n1);
            if (len < 1) break;
            std::vector<cplx> row(static_cast<std::size_t>(len));
            for (i64 n2 = 1; n2 <= len; ++n2) row[static_cast<std::size_t>(n2 - 1)] = compute(n1, n2);
            dense_.push_back(std::move(row));
        }
        for (i64 n1 = kDenseRows + 1; n1 * n1 <= capacity; ++n1)
            for (i64 n2 = 1; n1 * n1 * n2 <= capacity; ++n2) sparse_[key(n1, n2)] = compute(n1, n2);
    }

    /// Extends row n1 (n1 <= 64) to cover n2 <= len.
    void extend_row(i64 n1, i64 len) {
        if (n1 < 1 || n1 > kDenseRows) throw Error(Errc::TableTooSmall, "row " + std::to_string(n1) + " is not dense");
        if (n1 > static_cast<i64>(dense_.size())) dense_.resize(static_cast<std::size_t>(n1));
        auto& row = dense_[static_cast<std::size_t>(n1 - 1)];
        const i64 have = static_cast<i64>(row.size());
        if (len <= have) return;
        if (len > sieve_.limit()) sieve_ = SpfSieve(std::max(len, 2 * sieve_.limit()));
        check_primes(len);
        row.resize(static_cast<std::size_t>(len));
        for (i64 n2 = have + 1; n2 <= len; ++n2) row[static_cast<std::size_t>(n2 - 1)] = compute(n1, n2);
    }

    bool contains(i64 n1, i64 n2) const {
        if (n1 < 1 || n2 < 1) return false;
        if (n1 <= static_cast<i64>(dense_.size())) return n2 <= static_cast<i64>(dense_[static_cast<std::size_t>(n1 - 1)].size());
        return sparse_.count(key(n1, n2)) > 0;
    }

    /// lambda(n1, n2); self-dual tables also serve the transposed index.
    cplx operator()(i64 n1, i64 n2) const {
        if (n1 >= 1 && n1 <= static_cast<i64>(dense_.size())) {
            const auto& row = dense_[static_cast<std::size_t>(n1 - 1)];
            if (n2 >= 1 && n2 <= static_cast<i64>(row.size())) return row[static_cast<std::size_t>(n2 - 1)];
        } else if (auto it = sparse_.find(key(n1, n2)); it != sparse_.end()) {
            return it->second;
        }
        if (sp_->self_dual() && n1 != n2 && contains(n2, n1)) return (*this)(n2, n1);
        throw Error(Errc::TableTooSmall, "lambda(" + std::to_string(n1) + ", " + std::to_string(n2) + ") not tabulated");
    }

    i64 capacity() const { return capacity_; }
    i64 row_length(i64 n1) const {
        return n1 >= 1 && n1 <= static_cast<i64>(dense_.size()) ? static_cast<i64>(dense_[static_cast<std::size_t>(n1 - 1)].size()) : 0;
    }
    const SatakeProvider& provider() const { return *sp_; }

    /// Evaluation by multiplicativity outside the stored range; uncached, safe to call concurrently.
    cplx direct(i64 n1, i64 n2) const { return multiplicative(n1, n2, false); }

private:
    cplx compute(i64 n1, i64 n2) const { return multiplicative(n1, n2, true); }

    cplx multiplicative(i64 n1, i64 n2, bool cached) const {
        if (n1 < 1 || n2 < 1) throw Error(Errc::DomainError, "indices must be positive");
        cplx v(1.0, 0.0);
        i64 a = n1, b = n2;
        auto next_p = [&](i64 x) { return x <= sieve_.limit() ? sieve_.spf(x) : Modulus(x).factorization().front().p; };
        while (a > 1 || b > 1) {
            const i64 p = std::min(a > 1 ? next_p(a) : INT64_MAX, b > 1 ? next_p(b) : INT64_MAX);
            int ea = 0, eb = 0;
            while (a % p == 0) { a /= p; ++ea; }
            while (b % p == 0) { b /= p; ++eb; }
            v *= cached ? local(p, ea, eb) : lambda_prime_power(ea, eb, sp_->at(p));
        }
        return v;
    }

    static std::uint64_t key(i64 n1, i64 n2) { return (static_cast<std::uint64_t>(n1) << 32) | static_cast<std::uint64_t>(n2); }

    void check_primes(i64 up_to) const {
        const i64 lim = sp_->prime_limit();
        if (lim > 0 && lim < up_to)
            throw Error(Errc::MissingPrime, "Satake data stops at " + std::to_string(lim) + ", need " + std::to_string(up_to));
    }

    cplx local(i64 p, int a, int b) const {
        const auto k = std::make_tuple(p, a, b);
        if (auto it = local_.find(k); it != local_.end()) return it->second;
        const cplx v = lambda_prime_power(a, b, sp_->at(p));
        local_.emplace(k, v);
        return v;
    }

    std::shared_ptr<const SatakeProvider> sp_;
    i64 capacity_;
    SpfSieve sieve_;
    std::vector<std::vector<cplx>> dense_;
    std::unordered_map<std::uint64_t, cplx> sparse_;
    // filled during construction and extension only
    mutable std::map<std::tuple<i64, int, int>, cplx> local_;
};

inline std::shared_ptr<const SatakeProvider> make_provider(const std::string& name, i64 prime_limit, std::uint64_t seed = 1) {
    if (name == "sym2delta") return std::make_shared<Sym2DeltaSatake>(prime_limit);
    if (name == "trivial") return std::make_shared<TrivialSatake>();
    if (name == "synthetic") return std::make_shared<SyntheticSatake>(seed);
    throw Error(Errc::DomainError, "unknown form '" + name + "'");
}

}  // namespace momentlab
