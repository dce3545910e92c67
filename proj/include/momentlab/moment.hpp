#pragma once

// Second-moment machinery on the Kloosterman side of the Petersson formula:
// AFE windows, the off-diagonal c-series and its dyadic blocks, the windowed
// double sums, the scaling fit and two diagnostic quantities.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "bessel.hpp"
#include "bump.hpp"
#include "characters.hpp"
#include "core_arith.hpp"
#include "gl3.hpp"
#include "large_sieve.hpp"
#include "mellin.hpp"
#include "quadrature.hpp"

namespace momentlab {

enum class SummationMode { Pairwise, Compensated };

inline const char* to_string(SummationMode m) { return m == SummationMode::Pairwise ? "deterministic-pairwise" : "compensated"; }

struct ExperimentConfig {
    i64 m1 = 7, m2 = 11;
    int k = 4;
    double eps = 0.1;
    int ell_max = 8;
    double c_truncation_tol = 1e-6;
    SummationMode summation_mode = SummationMode::Pairwise;
    i64 n_max = 128;          // largest dyadic AFE scale actually summed
    i64 c_max = 1000;         // c-series cap inside windows
    double afe_factor = 1.0;  // multiplies the AFE length M^{3/2 + eps}
    std::uint64_t op_budget = 300'000'000;
    bool diagonal_only = false;
    std::string provider = "sym2delta";
    std::uint64_t seed = 1;
    int threads = 1;

    i64 M() const { return m1 * m2; }
    double afe_length() const { return afe_factor * std::pow(static_cast<double>(M()), 1.5 + eps); }
    /// M2 <= M1^{1 + eps}.
    bool in_level_range() const { return static_cast<double>(m2) <= std::pow(static_cast<double>(m1), 1.0 + eps); }

    void validate() const {
        auto fail = [](const std::string& w) { throw Error(Errc::ValidationError, w); };
        if (!is_prime(m1)) fail("m1 = " + std::to_string(m1) + " is not prime");
        if (!is_prime(m2)) fail("m2 = " + std::to_string(m2) + " is not prime");
        if (m1 >= m2) fail("need m1 < m2");
        if (k < 3) fail("weight k must be at least 3");
        if (ell_max < 1 || ell_max > CoeffTable::kDenseRows) fail("ell_max must lie in [1, 64]");
        if (!(c_truncation_tol > 0.0)) fail("c_truncation_tol must be positive");
        if (n_max < 1 || c_max < 1) fail("n_max and c_max must be positive");
        if (!(afe_factor > 0.0) || !(eps >= 0.0)) fail("afe_factor must be positive and eps nonnegative");
        if (threads < 1) fail("threads must be positive");
    }
};

/// Worker count: MOMENTLAB_THREADS when set, otherwise cfg.threads.
inline int resolve_threads(const ExperimentConfig& cfg) {
    if (const char* env = std::getenv("MOMENTLAB_THREADS")) {
        const int t = std::atoi(env);
        if (t >= 1) return t;
    }
    return cfg.threads;
}

// ---------------------------------------------------------------------------
// Character sums over the parity class, per level c
// ---------------------------------------------------------------------------

/// C_{Mc}(m, m') = (M1-1)/2 S(Pbar m, Pbar m'; Q) T(m, m') with P = M1^{1+b1}, Q = Mc / P (see
/// char_sum_C_closed). Kloosterman factors come from prime-power tables keyed by residue.
class CharSumEngine {
public:
    CharSumEngine(i64 M1, i64 M2, int k, i64 c_limit, bool tabulate)
        : M1_(M1), M2_(M2), k_(k), lk_(tabulate ? table_limit(M2, c_limit) : 0) {
        levels_.reserve(static_cast<std::size_t>(c_limit));
        for (i64 c = 1; c <= c_limit; ++c) {
            levels_.push_back(make_level(c));
            if (tabulate) lk_.prepare_modulus(levels_.back().fQ);
        }
    }

    i64 c_limit() const { return static_cast<i64>(levels_.size()); }

    cplx operator()(i64 m, i64 mp, i64 c, std::uint64_t* misses = nullptr) const {
        if (c > c_limit()) return eval(make_level(c), m, mp, misses);
        return eval(levels_[static_cast<std::size_t>(c - 1)], m, mp, misses);
    }

private:
    struct Level {
        i64 P = 1, Q = 1, Pi = 0;
        std::vector<PrimePower> fQ;
        std::vector<i64> ri;  // inverse of Q / p^e mod p^e
        std::vector<std::pair<i64, i64>> alpha;  // (u a, u abar) mod P
        std::vector<double> weight;
        std::shared_ptr<const RootTable> roots;
    };

    /// Largest prime power of any Q: c0 parts stay below c_limit, the M2 part is M2^{1+b2} with M2^b2 <= c_limit.
    static i64 table_limit(i64 M2, i64 c_limit) {
        if (c_limit < 1) return 0;
        i64 r = M2;
        while (r <= c_limit) r *= M2;
        return std::max(c_limit, r);
    }

    Level make_level(i64 c) const {
        const LevelSplit ls = split_level(c, M1_, M2_);
        Level L;
        L.P = ipow(M1_, 1 + ls.b1);
        L.Q = M1_ * M2_ * c / L.P;
        L.Pi = inverse_mod(L.P, L.Q);
        L.fQ = Modulus(L.Q).factorization();
        for (const auto& pp : L.fQ) L.ri.push_back(inverse_mod(L.Q / pp.pe, pp.pe));
        const i64 u = inverse_mod(L.Q, L.P);
        const double sk = (k_ % 2 == 0) ? 1.0 : -1.0;
        for (int eta : {1, -1})
            for (i64 a = reduce(eta, M1_); a < L.P; a += M1_) {
                if (gcd(a, L.P) != 1) continue;
                L.alpha.emplace_back(mul_mod(u, a, L.P), mul_mod(u, inverse_mod(a, L.P), L.P));
                L.weight.push_back(eta == 1 ? 1.0 : sk);
            }
        auto it = roots_.find(L.P);
        if (it == roots_.end()) it = roots_.emplace(L.P, std::make_shared<const RootTable>(L.P)).first;
        L.roots = it->second;
        return L;
    }

    cplx eval(const Level& L, i64 m, i64 mp, std::uint64_t* misses) const {
        const i64 a = mul_mod(L.Pi, m, L.Q), b = mul_mod(L.Pi, mp, L.Q);
        double S = 1.0;
        for (std::size_t i = 0; i < L.fQ.size(); ++i) {
            const auto& pp = L.fQ[i];
            S *= lk_.local(mul_mod(a, L.ri[i], pp.pe), mul_mod(b, L.ri[i], pp.pe), pp, misses);
            if (S == 0.0) return {0.0, 0.0};
        }
        const i64 mr = reduce(m, L.P), mpr = reduce(mp, L.P);
        cplx T(0.0, 0.0);
        for (std::size_t j = 0; j < L.alpha.size(); ++j)
            T += L.weight[j] * (*L.roots)(mul_mod(L.alpha[j].first, mr, L.P) + mul_mod(L.alpha[j].second, mpr, L.P));
        return 0.5 * static_cast<double>(M1_ - 1) * S * T;
    }

    i64 M1_, M2_;
    int k_;
    LocalKloosterman lk_;
    std::vector<Level> levels_;
    mutable std::map<i64, std::shared_ptr<const RootTable>> roots_;
};

// ---------------------------------------------------------------------------
// Petersson off-diagonal series
// ---------------------------------------------------------------------------

namespace moment_detail {

/// i^{-k}
inline cplx i_pow_neg(int k) {
    static const cplx v[4] = {{1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}, {0.0, 1.0}};
    return v[((k % 4) + 4) % 4];
}

/// Bound on sum_{c > cs} |C/(Mc)| 2 pi |J_{k-1}(4 pi sqrt(m m') / (M c))| using |C| <= Mc and
/// J_nu(x) <= (x/2)^nu / Gamma(nu + 1).
inline double tail_bound(double mm, double M, int k, double cs) {
    const double A = 2.0 * std::numbers::pi * std::sqrt(mm) / M;
    const double lg = std::log(2.0 * std::numbers::pi) + (k - 1) * std::log(A) - std::lgamma(static_cast<double>(k)) -
                      std::log(static_cast<double>(k - 2)) + (2 - k) * std::log(cs);
    return std::exp(lg);
}

/// Smallest integer c* with tail_bound(c*) <= tol.
inline double rigorous_cutoff(double mm, double M, int k, double tol) {
    const double A = 2.0 * std::numbers::pi * std::sqrt(mm) / M;
    const double lc = (std::log(2.0 * std::numbers::pi) + (k - 1) * std::log(A) - std::lgamma(static_cast<double>(k)) -
                       std::log(static_cast<double>(k - 2)) - std::log(tol)) /
                      (k - 2);
    return std::max(1.0, std::ceil(std::exp(lc)));
}

/// Kahan-Babuska summation of real numbers.
struct KahanBabuska {
    double s = 0.0, c = 0.0;
    void add(double v) {
        const double t = s + v;
        c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

struct CompensatedComplex {
    KahanBabuska re, im;
    void add(cplx v) {
        re.add(v.real());
        im.add(v.imag());
    }
    cplx value() const { return {re.value(), im.value()}; }
};

/// Pairwise reduction in index order.
inline cplx pairwise(const std::vector<cplx>& v, std::size_t lo, std::size_t hi) {
    if (hi <= lo) return {0.0, 0.0};
    if (hi - lo <= 8) {
        cplx s(0.0, 0.0);
        for (std::size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise(v, lo, mid) + pairwise(v, mid, hi);
}

inline cplx reduce_sum(const std::vector<cplx>& v, SummationMode mode) {
    if (mode == SummationMode::Pairwise) return pairwise(v, 0, v.size());
    CompensatedComplex s;
    for (const auto& x : v) s.add(x);
    return s.value();
}

}  // namespace moment_detail

struct ZValue {
    cplx value{0.0, 0.0};  // diagonal + off-diagonal
    double diagonal = 0.0;
    cplx offdiag{0.0, 0.0};
    i64 c_terms = 0;
    double tail_bound = 0.0;  // certificate for the dropped c > c_terms
};

/// sum_{c <= cs} C_{Mc}(m, m') / (Mc) 2 pi i^{-k} J_{k-1}(4 pi sqrt(m m') / (M c)).
inline cplx offdiag_series(i64 m, i64 mp, const ExperimentConfig& cfg, const CharSumEngine& chars, i64 cs,
                           std::uint64_t* misses = nullptr) {
    const double M = static_cast<double>(cfg.M());
    const double root = 4.0 * std::numbers::pi * std::sqrt(static_cast<double>(m) * static_cast<double>(mp)) / M;
    cplx s(0.0, 0.0);
    for (i64 c = 1; c <= cs; ++c) {
        const cplx C = chars(m, mp, c, misses);
        if (C == cplx(0.0, 0.0)) continue;
        const double cd = static_cast<double>(c);
        s += C * (bessel_j(cfg.k - 1, root / cd) / (M * cd));
    }
    return 2.0 * std::numbers::pi * moment_detail::i_pow_neg(cfg.k) * s;
}

/// Z_M(m, m') = (M1-1)/2 [m = m'] + off-diagonal c-series, truncated at the rigorous tail rule.
inline ZValue petersson_offdiag_Z(i64 m, i64 mp, const ExperimentConfig& cfg) {
    if (m < 1 || mp < 1) throw Error(Errc::DomainError, "m, m' must be positive");
    cfg.validate();
    const double mm = static_cast<double>(m) * static_cast<double>(mp);
    const double cs = moment_detail::rigorous_cutoff(mm, static_cast<double>(cfg.M()), cfg.k, cfg.c_truncation_tol);
    if (cs > 1e6) throw Error(Errc::TruncationFailure, "tail bound needs c up to " + std::to_string(cs));
    const CharSumEngine chars(cfg.m1, cfg.m2, cfg.k, 0, false);
    ZValue z;
    z.c_terms = static_cast<i64>(cs);
    z.diagonal = m == mp ? 0.5 * static_cast<double>(cfg.m1 - 1) : 0.0;
    z.offdiag = offdiag_series(m, mp, cfg, chars, z.c_terms);
    z.value = z.diagonal + z.offdiag;
    z.tail_bound = moment_detail::tail_bound(mm, static_cast<double>(cfg.M()), cfg.k, cs);
    return z;
}

struct OffDiagBlock {
    i64 C = 1;  // c in [C, 2C)
    double K = 1.0;
    int beta = 1;
};

/// (2 pi i^{-k} / M) sum_{C <= c < min(2C, c_end)} C_{Mc}(m, m') / c W^beta(2 sqrt(m m') / (M c)).
inline cplx od_block(i64 m, i64 mp, const OffDiagBlock& block, const ExperimentConfig& cfg, const CharSumEngine& chars,
                     i64 c_end = 0) {
    if (block.C < 1) throw Error(Errc::DomainError, "block C must be positive");
    const double M = static_cast<double>(cfg.M());
    const double t0 = 2.0 * std::sqrt(static_cast<double>(m) * static_cast<double>(mp)) / M;
    const i64 hi = c_end > 0 ? std::min(2 * block.C, c_end + 1) : 2 * block.C;
    cplx s(0.0, 0.0);
    for (i64 c = block.C; c < hi; ++c) {
        const cplx C = chars(m, mp, c);
        if (C == cplx(0.0, 0.0)) continue;
        const double cd = static_cast<double>(c);
        s += C / cd * w_beta(block.beta, cfg.k - 1, t0 / cd);
    }
    return 2.0 * std::numbers::pi * moment_detail::i_pow_neg(cfg.k) / M * s;
}

/// K = (1 + N / (C M)) M^eps for a block at scale N.
inline OffDiagBlock make_block(i64 C, double N, const ExperimentConfig& cfg, int beta) {
    const double M = static_cast<double>(cfg.M());
    return {C, (1.0 + N / (static_cast<double>(C) * M)) * std::pow(M, cfg.eps), beta};
}

// ---------------------------------------------------------------------------
// AFE windows and the windowed double sum
// ---------------------------------------------------------------------------

struct AfeWindow {
    int ell = 1;
    i64 N = 1;
    Bump V = default_afe_bump();

    static Bump default_afe_bump() { return Bump::plateau(1.0, 1.25, 1.75, 2.0); }
};

/// a(m) = lambda(ell, m) V(m / N) for N < m < 2N.
inline CoeffVector afe_coefficients(const CoeffTable& coeffs, const AfeWindow& w) {
    CoeffVector a;
    a.start = w.N + 1;
    for (i64 m = w.N + 1; m < 2 * w.N; ++m) {
        if (!coeffs.contains(w.ell, m))
            throw Error(Errc::TableTooSmall, "lambda(" + std::to_string(w.ell) + ", " + std::to_string(m) + ") not tabulated");
        a.a.push_back(coeffs(w.ell, m) * w.V(static_cast<double>(m) / static_cast<double>(w.N)));
    }
    return a;
}

struct WindowResult {
    int ell = 1;
    i64 N = 1;
    double diag = 0.0;          // (M1-1)/(2N) sum |a|^2
    cplx offdiag{0.0, 0.0};     // (1/N) sum a abar' OD
    double window_value = 0.0;  // Re of the total
    double window_imag = 0.0;
    double ratio_to_M1 = 0.0;
    i64 c_used = 0, c_rigorous = 0;
    double tail_bound = 0.0;
    bool certified = true;
    std::uint64_t pairs = 0;
};

struct MomentReport {
    ExperimentConfig cfg;
    std::vector<WindowResult> windows;
    std::vector<std::pair<int, i64>> dropped;  // (ell, N) beyond n_max
    double sup = 0.0, sup_ratio = 0.0;
    int sup_ell = 0;
    i64 sup_N = 0;
    std::uint64_t ops = 0, lookups = 0, misses = 0;
    int threads = 1;
    double hit_rate() const { return lookups ? 1.0 - static_cast<double>(misses) / static_cast<double>(lookups) : 1.0; }
};

/// Dyadic AFE grid: ell <= ell_max, N = 2^j with N ell^2 <= afe_length; N > n_max is dropped.
inline std::vector<AfeWindow> afe_grid(const ExperimentConfig& cfg, std::vector<std::pair<int, i64>>* dropped = nullptr) {
    std::vector<AfeWindow> out;
    const double L = cfg.afe_length();
    for (int ell = 1; ell <= cfg.ell_max; ++ell)
        for (i64 N = 1; static_cast<double>(N) * ell * ell <= L; N *= 2) {
            if (N > cfg.n_max) {
                if (dropped) dropped->emplace_back(ell, N);
                continue;
            }
            AfeWindow w;
            w.ell = ell;
            w.N = N;
            out.push_back(w);
        }
    return out;
}

/// Coefficient table for the grid: rows ell <= ell_max out to 2 n_max.
inline CoeffTable make_moment_table(const ExperimentConfig& cfg) {
    const i64 len = 2 * cfg.n_max + 1;
    auto sp = make_provider(cfg.provider, std::max<i64>(len, cfg.ell_max) + 1, cfg.seed);
    CoeffTable t(sp, len);
    for (int ell = 1; ell <= cfg.ell_max; ++ell) t.extend_row(ell, len);
    return t;
}

namespace moment_detail {

struct BlockPartial {
    cplx offdiag{0.0, 0.0};
    std::uint64_t lookups = 0, misses = 0;
};

}  // namespace moment_detail

/// Windowed double sum for one (ell, N); rows are split into fixed blocks so the reduction
/// order is independent of the worker count.
inline WindowResult evaluate_window(const AfeWindow& w, const CoeffTable& coeffs, const ExperimentConfig& cfg,
                                    const CharSumEngine& chars, i64 c_used, int threads, std::uint64_t* lookups = nullptr,
                                    std::uint64_t* misses = nullptr) {
    const CoeffVector a = afe_coefficients(coeffs, w);
    WindowResult r;
    r.ell = w.ell;
    r.N = w.N;
    const std::size_t n = a.a.size();
    r.pairs = static_cast<std::uint64_t>(n) * n;
    {
        std::vector<cplx> sq(n);
        for (std::size_t i = 0; i < n; ++i) sq[i] = std::norm(a.a[i]);
        r.diag = 0.5 * static_cast<double>(cfg.m1 - 1) * moment_detail::reduce_sum(sq, cfg.summation_mode).real() /
                 static_cast<double>(w.N);
    }
    r.c_used = c_used;
    if (!cfg.diagonal_only && n > 0) {
        constexpr std::size_t kRows = 8;
        const std::size_t nb = (n + kRows - 1) / kRows;
        std::vector<moment_detail::BlockPartial> part(nb);
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (;;) {
                const std::size_t b = next.fetch_add(1);
                if (b >= nb) return;
                auto& P = part[b];
                std::vector<cplx> rows;
                for (std::size_t i = b * kRows; i < std::min(n, (b + 1) * kRows); ++i) {
                    if (a.a[i] == cplx(0.0, 0.0)) continue;
                    std::vector<cplx> terms;
                    terms.reserve(n);
                    for (std::size_t j = 0; j < n; ++j) {
                        if (a.a[j] == cplx(0.0, 0.0)) continue;
                        const i64 m = a.start + static_cast<i64>(i), mp = a.start + static_cast<i64>(j);
                        const cplx z = offdiag_series(m, mp, cfg, chars, c_used, &P.misses);
                        P.lookups += static_cast<std::uint64_t>(c_used);
                        terms.push_back(a.a[i] * std::conj(a.a[j]) * z);
                    }
                    rows.push_back(moment_detail::reduce_sum(terms, cfg.summation_mode));
                }
                P.offdiag = moment_detail::reduce_sum(rows, cfg.summation_mode);
            }
        };
        const int T = std::max(1, std::min<int>(threads, static_cast<int>(nb)));
        std::vector<std::thread> pool;
        for (int t = 1; t < T; ++t) pool.emplace_back(work);
        work();
        for (auto& th : pool) th.join();
        std::vector<cplx> sums(nb);
        for (std::size_t b = 0; b < nb; ++b) {
            sums[b] = part[b].offdiag;
            if (lookups) *lookups += part[b].lookups;
            if (misses) *misses += part[b].misses;
        }
        r.offdiag = moment_detail::reduce_sum(sums, cfg.summation_mode) / static_cast<double>(w.N);
    }
    const cplx total = r.diag + r.offdiag;
    r.window_value = total.real();
    r.window_imag = total.imag();
    r.ratio_to_M1 = r.window_value / static_cast<double>(cfg.m1);
    return r;
}

/// Per-window value/N, the sup over windows and its ratio to M1.
inline MomentReport second_moment_estimate(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.M() > 2500) throw Error(Errc::PreconditionViolated, "M = M1 M2 must be at most 2500");
    MomentReport rep;
    rep.cfg = cfg;
    rep.threads = resolve_threads(cfg);
    const auto grid = afe_grid(cfg, &rep.dropped);
    const double M = static_cast<double>(cfg.M());
    std::vector<i64> cuse(grid.size()), crig(grid.size());
    i64 cmax_used = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double top = 2.0 * static_cast<double>(grid[i].N);
        crig[i] = static_cast<i64>(std::min(1e12, moment_detail::rigorous_cutoff(top * top, M, cfg.k, cfg.c_truncation_tol)));
        cuse[i] = cfg.diagonal_only ? 0 : std::min(crig[i], cfg.c_max);
        const auto n = static_cast<std::uint64_t>(std::max<i64>(0, grid[i].N - 1));
        rep.ops += n * n * static_cast<std::uint64_t>(cuse[i]);
        cmax_used = std::max(cmax_used, cuse[i]);
    }
    if (rep.ops > cfg.op_budget)
        throw Error(Errc::BudgetExceeded, std::to_string(rep.ops) + " (m, m', c) operations exceed the budget of " +
                                              std::to_string(cfg.op_budget));
    const CoeffTable coeffs = make_moment_table(cfg);
    const CharSumEngine chars(cfg.m1, cfg.m2, cfg.k, cmax_used, true);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        WindowResult w = evaluate_window(grid[i], coeffs, cfg, chars, cuse[i], rep.threads, &rep.lookups, &rep.misses);
        w.c_rigorous = crig[i];
        w.certified = cfg.diagonal_only || cuse[i] >= crig[i];
        const double top = 2.0 * static_cast<double>(grid[i].N);
        w.tail_bound = cfg.diagonal_only ? 0.0 : moment_detail::tail_bound(top * top, M, cfg.k, static_cast<double>(std::max<i64>(1, cuse[i])));
        if (rep.windows.empty() || w.window_value > rep.sup) {
            rep.sup = w.window_value;
            rep.sup_ell = w.ell;
            rep.sup_N = w.N;
        }
        rep.windows.push_back(w);
    }
    rep.sup_ratio = rep.sup / static_cast<double>(cfg.m1);
    return rep;
}

// ---------------------------------------------------------------------------
// Scaling experiment
// ---------------------------------------------------------------------------

/// Least-squares slope of log y against log x.
inline double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw Error(Errc::DomainError, "need at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error(Errc::DomainError, "log-log fit needs positive data");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

inline std::vector<std::pair<i64, i64>> default_scaling_grid() { return {{7, 11}, {11, 13}, {13, 17}, {17, 19}, {19, 23}}; }

struct ScalingReport {
    std::vector<MomentReport> runs;
    double slope = 0.0;
    bool in_band() const { return slope >= 0.5 && slope <= 1.6; }
};

inline ScalingReport scaling_experiment(const std::vector<std::pair<i64, i64>>& grid, ExperimentConfig base) {
    ScalingReport rep;
    std::vector<double> xs, ys;
    for (const auto& [a, b] : grid) {
        base.m1 = a;
        base.m2 = b;
        rep.runs.push_back(second_moment_estimate(base));
        xs.push_back(static_cast<double>(a));
        ys.push_back(rep.runs.back().sup);
    }
    rep.slope = fit_loglog_slope(xs, ys);
    return rep;
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

struct DiagnosticParams {
    int ell = 1;
    double A = 1.0, C = 1.0;
    i64 N = 1;
    int b1 = 0, b2 = 0;
    i64 p1 = 1;
};

/// sum*_{d ~ C/(A M1^b1 M2^b2)} sum_{alpha mod M1^b1} sum*_{gamma mod d p1}
///   int_{-K}^{K} |sum_m abar(m) m^{-iy/2} e(-m alpha / M1^b1) e(gamma m / (p1 d)) e(m / (M M2^b2 a d))|^2 dy
/// with a = A and a(m) the AFE sequence of the window (ell, N).
inline double diagnostic_G(const DiagnosticParams& p, const ExperimentConfig& cfg, const CoeffTable& coeffs, double K,
                           std::uint64_t max_terms = 50'000'000) {
    const i64 R = ipow(cfg.m2, 1 + p.b2);
    if (p.p1 < 1 || R % p.p1 != 0) throw Error(Errc::PreconditionViolated, "p1 must divide M2^{1+b2}");
    if (p.A > p.C || p.A < 1.0 || p.b1 < 0 || p.b2 < 0) throw Error(Errc::PreconditionViolated, "need 1 <= A <= C, b1, b2 >= 0");
    if (p.N > 2048) throw Error(Errc::PreconditionViolated, "N must be at most 2048");
    const i64 Pb = ipow(cfg.m1, p.b1);
    const double D = p.C / (p.A * static_cast<double>(Pb) * std::pow(static_cast<double>(cfg.m2), p.b2));
    const i64 dlo = static_cast<i64>(std::ceil(D)), dhi = static_cast<i64>(std::ceil(2.0 * D));  // d in [D, 2D)
    std::vector<i64> ds;
    for (i64 d = std::max<i64>(dlo, 1); d < dhi; ++d)
        if (gcd(d, cfg.M()) == 1) ds.push_back(d);
    if (ds.empty()) return 0.0;
    if (ds.back() * p.p1 > 200) throw Error(Errc::PreconditionViolated, "d p1 must be at most 200");

    AfeWindow w;
    w.ell = p.ell;
    w.N = p.N;
    const CoeffVector a = afe_coefficients(coeffs, w);
    const std::size_t n = a.a.size();
    // y-quadrature: the integrand is a trigonometric sum with frequencies |log(m'/m)| / 2 <= log 2 / 2
    const int panels = static_cast<int>(std::ceil(K / 4.0)) + 1;
    const quad::Rule rule = quad::gauss_legendre(20);
    std::vector<double> ys, wy;
    const double h = 2.0 * K / panels;
    for (int q = 0; q < panels; ++q)
        for (std::size_t i = 0; i < rule.x.size(); ++i) {
            ys.push_back(-K + h * (q + 0.5 + 0.5 * rule.x[i]));
            wy.push_back(0.5 * h * rule.w[i]);
        }
    std::uint64_t terms = 0;
    for (i64 d : ds) terms += static_cast<std::uint64_t>(Pb) * static_cast<std::uint64_t>(d * p.p1);
    terms *= static_cast<std::uint64_t>(n) * ys.size();
    if (terms > max_terms) throw Error(Errc::BudgetExceeded, "diagnostic needs " + std::to_string(terms) + " terms");

    // b(m, y) = abar(m) m^{-iy/2}
    std::vector<cplx> base(n * ys.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double lm = std::log(static_cast<double>(a.start + static_cast<i64>(i)));
        for (std::size_t t = 0; t < ys.size(); ++t) base[t * n + i] = std::conj(a.a[i]) * std::polar(1.0, -0.5 * ys[t] * lm);
    }
    const double Md = static_cast<double>(cfg.M()) * std::pow(static_cast<double>(cfg.m2), p.b2) * p.A;
    moment_detail::KahanBabuska total;
    std::vector<cplx> ph(n);
    for (i64 d : ds) {
        const i64 q = d * p.p1;
        for (i64 al = 0; al < Pb; ++al)
            for (i64 g = 0; g < q; ++g) {
                if (gcd(g, q) != 1) continue;
                for (std::size_t i = 0; i < n; ++i) {
                    const i64 m = a.start + static_cast<i64>(i);
                    ph[i] = e_frac(-mul_mod(m, al, Pb), Pb) * e_frac(mul_mod(g, m, q), q) *
                            e_real(static_cast<double>(m) / (Md * static_cast<double>(d)));
                }
                for (std::size_t t = 0; t < ys.size(); ++t) {
                    cplx s(0.0, 0.0);
                    for (std::size_t i = 0; i < n; ++i) s += base[t * n + i] * ph[i];
                    total.add(wy[t] * std::norm(s));
                }
            }
    }
    return total.value();
}

/// C^2 / A (N + N^2 / M1^2).
inline double easy_bound_envelope(const DiagnosticParams& p, const ExperimentConfig& cfg) {
    const double N = static_cast<double>(p.N), m1 = static_cast<double>(cfg.m1);
    return p.C * p.C / p.A * (N + N * N / (m1 * m1));
}

struct TransferCheck {
    double lhs = 0.0, rhs = 0.0;
};

/// lhs = sum*_{gamma mod p1 d} |sum_{n <= N} alpha(n) S(r s n1 gammabar, -+ n; p1 d r s)|^2,
/// rhs = p1 d r^2 s sum*_{h mod p1 d s} |sum_{n <= N/r} alpha(r n) e(h n / (p1 d s))|^2,
/// gammabar the inverse mod p1 d. alpha[i] is alpha(i + 1).
inline TransferCheck kloosterman_avg_transfer_check(i64 d, i64 p1, i64 r, i64 s, i64 n1, const std::vector<cplx>& alpha,
                                                   int sign = 1) {
    const i64 b = p1 * d;
    if (d < 1 || p1 < 1 || r < 1 || s < 1 || n1 < 1) throw Error(Errc::PreconditionViolated, "parameters must be positive");
    i64 rr = r;
    for (i64 g = gcd(rr, b); g > 1; g = gcd(rr, b)) rr /= g;
    if (rr != 1) throw Error(Errc::PreconditionViolated, "r must divide a power of p1 d");
    if (gcd(s, b) != 1 || gcd(n1, b) != 1) throw Error(Errc::PreconditionViolated, "s and n1 must be coprime to p1 d");
    const i64 q = b * r * s;
    if (q > 500) throw Error(Errc::PreconditionViolated, "p1 d r s must be at most 500");
    const i64 N = static_cast<i64>(alpha.size());
    const i64 sg = sign >= 0 ? -1 : 1;  // the first sign of -+ is minus
    TransferCheck out;
    moment_detail::KahanBabuska L;
    for (i64 g = 0; g < b; ++g) {
        if (gcd(g, b) != 1) continue;
        const i64 gi = b == 1 ? 0 : inverse_mod(g, b);
        const i64 first = mul_mod(mul_mod(r * s, n1, q), gi, q);
        cplx acc(0.0, 0.0);
        for (i64 n = 1; n <= N; ++n) {
            const cplx an = alpha[static_cast<std::size_t>(n - 1)];
            if (an == cplx(0.0, 0.0)) continue;
            acc += an * detail::kloosterman_real(first, sg * n, q);
        }
        L.add(std::norm(acc));
    }
    out.lhs = L.value();
    const i64 h_mod = b * s;
    moment_detail::KahanBabuska Rs;
    for (i64 h = 0; h < h_mod; ++h) {
        if (gcd(h, h_mod) != 1) continue;
        cplx acc(0.0, 0.0);
        for (i64 n = 1; n * r <= N; ++n) acc += alpha[static_cast<std::size_t>(n * r - 1)] * e_frac(mul_mod(h, n, h_mod), h_mod);
        Rs.add(std::norm(acc));
    }
    out.rhs = static_cast<double>(b) * static_cast<double>(r * r) * static_cast<double>(s) * Rs.value();
    return out;
}

}  // namespace momentlab
