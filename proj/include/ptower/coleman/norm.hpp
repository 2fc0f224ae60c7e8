#pragma once
// The Coleman norm operator N on unit power series,
//   N(f)((1+T)^p - 1) = prod_{zeta in mu_p} f(zeta(1+T) - 1),
// its iteration to N^{d inf}(f), and evaluation of the limit through finite products over
// p-power roots of unity.

#include "series.hpp"

namespace ptower {

struct ColemanOptions {
    unsigned jobs = 1;
    i64 min_digits = 0;  // series mode: fail unless every output coefficient reaches this
};

// f(zeta(1+T) - 1) with scalars in E = R[mu_{p^k}].
struct ExtSeries {
    std::vector<ExtRing::Elem> c;
    std::vector<i64> digits;
    bool polynomial = true;
};

// zeta = z^j has v_p(zeta - 1) = 1/e with e = phi(order of zeta); e = 0 for zeta = 1.
inline u64 root_ramification(u64 p, unsigned k, u64 j) {
    u64 q = ipow(p, k);
    j %= q;
    if (j == 0) return 0;
    u64 ord = q / gcd_u(j, q);
    return ord / p * (p - 1);
}

inline i64 add_digits(i64 d, i64 extra) { return d == PadicNumber::INF ? d : d + extra; }

inline ExtSeries substitute(const TruncSeries& f, const ExtRing& E, u64 j) {
    require(f.ring->same_as(E.base()), "substitute: ring mismatch");
    const CoeffRing& R = *f.ring;
    auto b = E.root(j);
    auto a = E.sub(b, E.from_base(R.from_int(1)));
    std::size_t M = f.M();
    std::vector<ExtRing::Elem> acc{E.from_base(f.c[M - 1])};
    for (std::size_t i = M - 1; i-- > 0;) {
        std::vector<ExtRing::Elem> nxt(acc.size() + 1, E.zero());
        for (std::size_t t = 0; t < acc.size(); ++t) {
            nxt[t] = E.add(nxt[t], E.mul(acc[t], a));
            nxt[t + 1] = E.mul(acc[t], b);
        }
        nxt[0] = E.add(nxt[0], E.from_base(f.c[i]));
        acc.swap(nxt);
    }
    ExtSeries r;
    r.c = std::move(acc);
    r.polynomial = f.polynomial;
    // coefficient j collects c_i binom(i, j) (zeta-1)^{i-j} zeta^j, i >= j; an unknown tail
    // beyond T^M enters with valuation >= (M - j)/e
    u64 e = root_ramification(R.p(), E.k(), j);
    r.digits.assign(M, PadicNumber::INF);
    for (std::size_t t = 0; t < M; ++t) {
        i64 d = f.ledger.digits[t];
        if (e > 0) {
            for (std::size_t i = t + 1; i < M; ++i) d = std::min(d, add_digits(f.ledger.digits[i], static_cast<i64>((i - t) / e)));
            if (!f.polynomial) d = std::min<i64>(d, static_cast<i64>((M - t) / e));
        }
        r.digits[t] = d;
    }
    return r;
}

inline ExtSeries ext_mul(const ExtRing& E, const ExtSeries& a, const ExtSeries& b) {
    bool poly = a.polynomial && b.polynomial;
    std::size_t L = poly ? a.c.size() + b.c.size() - 1 : std::min(a.c.size(), b.c.size());
    ExtSeries r;
    r.polynomial = poly;
    r.c.assign(L, E.zero());
    for (std::size_t i = 0; i < a.c.size() && i < L; ++i)
        for (std::size_t j = 0; j < b.c.size() && i + j < L; ++j) r.c[i + j] = E.add(r.c[i + j], E.mul(a.c[i], b.c[j]));
    r.digits.assign(L, PadicNumber::INF);
    i64 run = PadicNumber::INF;
    for (std::size_t j = 0; j < L; ++j) {
        if (j < a.digits.size()) run = std::min(run, a.digits[j]);
        if (j < b.digits.size()) run = std::min(run, b.digits[j]);
        r.digits[j] = run;
    }
    return r;
}

// prod_{zeta in mu_{p^k}} f(zeta(1+T) - 1), checked to descend to the coefficient ring of f.
inline TruncSeries norm_product(const TruncSeries& f, unsigned k, unsigned jobs = 1) {
    ExtRing E(f.ring, k);
    u64 q = ipow(f.ring->p(), k);
    auto subs = parallel_map(static_cast<std::size_t>(q), jobs, [&](std::size_t j) { return substitute(f, E, j); });
    ExtSeries H = subs[0];
    for (std::size_t j = 1; j < subs.size(); ++j) H = ext_mul(E, H, subs[j]);
    TruncSeries out;
    out.ring = f.ring;
    out.polynomial = H.polynomial;
    for (std::size_t t = 0; t < H.c.size(); ++t) {
        if (!E.descends(H.c[t]))
            throw InternalError("Coleman norm: product over mu_" + std::to_string(q) + " does not descend at degree " + std::to_string(t));
        out.c.push_back(H.c[t][0]);
    }
    out.ledger.digits = H.digits;
    return out;
}

// g of length L with g((1+T)^p - 1) = H, by triangular solving: the pivot at degree j is p^j.
inline TruncSeries solve_phi(const TruncSeries& H, std::size_t L, PrecisionLedger& led) {
    const CoeffRing& R = *H.ring;
    u64 p = R.p();
    auto pw = phi_powers(p, 1, L - 1, L - 1);
    TruncSeries g;
    g.ring = H.ring;
    g.polynomial = H.polynomial;
    g.c.reserve(L);
    led.digits.assign(L, PadicNumber::INF);
    for (std::size_t j = 0; j < L; ++j) {
        Coeff acc = j < H.M() ? H.c[j] : R.zero();
        i64 d = j < H.M() ? H.ledger.digits[j] : PadicNumber::INF;
        for (std::size_t k = 0; k < j; ++k) {
            if (pw[k][j] == 0) continue;
            acc = R.sub(acc, R.scale(g.c[k], pw[k][j]));
            d = std::min(d, add_digits(led.digits[k], vp(pw[k][j], p)));
        }
        if (R.exact() && d == PadicNumber::INF) {
            g.c.push_back(R.div_p_pow(acc, static_cast<unsigned>(j)));
        } else {
            BigInt q = big_pow(p, static_cast<unsigned long>(j));
            if (d >= static_cast<i64>(j))
                for (auto& x : acc)
                    if (mod_floor(x, q) != 0) throw InternalError("Coleman norm: degree-" + std::to_string(j) + " pivot does not divide");
            Coeff y(acc.size());
            for (std::size_t s = 0; s < acc.size(); ++s) {
                BigInt x = acc[s] - mod_floor(acc[s], q);
                mpz_divexact(y[s].get_mpz_t(), x.get_mpz_t(), q.get_mpz_t());
            }
            R.reduce(y);
            g.c.push_back(y);
            if (j > 0) led.losses.push_back({"triangular solve: divide by p^" + std::to_string(j), j, static_cast<i64>(j)});
        }
        led.digits[j] = add_digits(d, -static_cast<i64>(j));
        if (led.digits[j] != PadicNumber::INF) led.digits[j] = std::max<i64>(led.digits[j], 0);
    }
    g.ledger.digits = led.digits;
    return g;
}

// N(f). Exact rings lose nothing. Modular rings work with N + 2M + 2 digits so that the p^j
// pivots never reach the certified digits; the output carries the input precision, which is
// justified by continuity: f == f' mod p^a implies N(f) == N(f') mod p^a for unit series.
inline TruncSeries coleman_norm(const TruncSeries& f, const ColemanOptions& o = {}) {
    if (!f.is_unit()) throw UsageError("Coleman norm needs a unit series (c_0 must be a unit)");
    const CoeffRing& R = *f.ring;
    std::size_t M = f.M();
    if (R.exact()) {
        PrecisionLedger led;
        TruncSeries g = solve_phi(norm_product(f, 1, o.jobs), M, led);
        g.ledger.digits = led.digits;
        if (f.polynomial) g.ledger.losses.clear();
        else g.ledger.losses = led.losses;
        if (g.ledger.min_digits() < o.min_digits)
            throw PrecisionError("Coleman norm: series known to T^" + std::to_string(M) + " certifies only p^" +
                                 std::to_string(g.ledger.min_digits()) + "; need M >= " + std::to_string(o.min_digits * static_cast<i64>(R.p() - 1)) +
                                 " plus the pivot loss");
        return g;
    }
    i64 din = f.ledger.min_digits();
    int W = R.N() + 2 * static_cast<int>(M) + 2;
    for (int attempt = 0; attempt < 4; ++attempt, W += static_cast<int>(M)) {
        auto RW = CoeffRing::make(R.p(), R.m(), W);
        TruncSeries F = f.in_ring(RW);
        F.ledger.digits.assign(M, W);  // an exact lift, evaluated mod p^W
        PrecisionLedger led;
        TruncSeries g = solve_phi(norm_product(F, 1, o.jobs), M, led);
        i64 need = std::min<i64>(din, R.N());
        bool enough = true;
        for (std::size_t j = 0; j < M; ++j) {
            led.digits[j] = std::min(led.digits[j], need);
            if (f.polynomial && led.digits[j] < need) enough = false;
        }
        if (!enough) continue;
        TruncSeries out = g.in_ring(f.ring);
        out.ledger = led;
        out.ledger.working_digits = W;
        if (out.ledger.min_digits() < o.min_digits)
            throw PrecisionError("Coleman norm: series known to T^" + std::to_string(M) + " certifies only p^" +
                                 std::to_string(out.ledger.min_digits()) + "; need M >= " +
                                 std::to_string(o.min_digits * static_cast<i64>(R.p() - 1)) + " plus the pivot loss");
        return out;
    }
    throw ResourceError("Coleman norm: working precision budget exhausted");
}

// N^n(f).
inline TruncSeries coleman_power(const TruncSeries& f, unsigned n, const ColemanOptions& o = {}) {
    TruncSeries g = f;
    for (unsigned i = 0; i < n; ++i) g = coleman_norm(g, o);
    return g;
}

// ---------------------------------------------------------------- N^{d inf}

struct ColemanIterate {
    TruncSeries limit;
    std::vector<TruncSeries> iterates;  // N^{d i}(f), i = 0, 1, ...
    unsigned d = 1;
    i64 certified = 0;                  // limit == N^{d inf}(f) mod p^certified
    bool rate_ok = true;                // iterates i > j agree mod p^{j+1}
    std::vector<std::string> notes;
};

// Iterate N^d until successive iterates agree mod p^N. Agreement of successive iterates
// persists (N^d is non-expanding on units), so it certifies the limit; the rate of agreement
// between iterates j apart is recorded as a check.
inline ColemanIterate coleman_iterate(const TruncSeries& f, unsigned d, i64 N, const ColemanOptions& o = {}) {
    u64 rd = f.ring->residue_degree();
    if (d == 0) d = static_cast<unsigned>(rd);
    if (d % rd) throw UsageError("iteration step must be a multiple of the residue degree " + std::to_string(rd));
    if (N > f.ring->digits()) throw PrecisionError("target p^" + std::to_string(N) + " exceeds the coefficient precision");
    ColemanIterate r;
    r.d = d;
    r.iterates.push_back(f);
    unsigned max_steps = static_cast<unsigned>(std::max<i64>(N, 1)) + 2;
    for (unsigned i = 1; i <= max_steps; ++i) {
        r.iterates.push_back(coleman_power(r.iterates.back(), d, o));
        const TruncSeries& cur = r.iterates.back();
        for (unsigned j = 0; j < i; ++j) {
            i64 cap = std::min(r.iterates[j].ledger.min_digits(), cur.ledger.min_digits());
            if (agreement(cur, r.iterates[j]) < std::min<i64>(j + 1, cap)) {
                r.rate_ok = false;
                r.notes.push_back("iterates " + std::to_string(j) + " and " + std::to_string(i) + " disagree below p^" + std::to_string(j + 1));
            }
        }
        i64 a = agreement(cur, r.iterates[i - 1]);
        if (a >= N) {
            r.limit = cur;
            r.certified = std::min(a, cur.ledger.min_digits());
            return r;
        }
    }
    throw PrecisionError("Coleman iteration did not stabilize mod p^" + std::to_string(N) + " within " + std::to_string(max_steps) + " steps");
}

// ---------------------------------------------------------------- evaluation at zeta kappa^s - 1

// prod_{zeta in mu_{p^K}} f(zeta kappa^s - 1) in Z_p[mu_m] mod p^N, computed exactly: for each
// k <= K the value at a primitive p^k-th root is normed from Q(mu_{m p^k}) down to Q(mu_m).
inline Coeff finite_product(const TruncSeries& f, unsigned K, i64 s, int N) {
    const CoeffRing& R = *f.ring;
    u64 p = R.p(), m = R.m();
    auto RN = CoeffRing::make(p, m, N);
    std::size_t M = f.M();
    unsigned long t = static_cast<unsigned long>(s < 0 ? -s : 0);
    BigInt kap = big_pow(kappa(p), t);                                         // s < 0: x = (z - kap)/kap
    BigInt y = s >= 0 ? big_pow(kappa(p), static_cast<unsigned long>(s)) : BigInt(1);  // s >= 0: x = y z - 1
    CycloElem total = CycloElem::from_rational(m, 1);
    for (unsigned k = 0; k <= K; ++k) {
        u64 pk = ipow(p, k), Mk = m * pk;
        // Horner on raw exponent vectors mod z^Mk - 1; multiplying by z is a rotation
        std::vector<BigInt> acc(Mk, 0);
        auto add_coeff = [&](const Coeff& c, const BigInt& scale) {
            for (std::size_t u = 0; u < c.size(); ++u) acc[(u * pk) % Mk] += c[u] * scale;
        };
        for (std::size_t i = M; i-- > 0;) {
            if (i + 1 < M) {
                std::vector<BigInt> rot(Mk, 0);
                for (u64 e = 0; e < Mk; ++e)
                    if (acc[e] != 0) rot[(e + m) % Mk] += s >= 0 ? acc[e] * y : acc[e];
                for (u64 e = 0; e < Mk; ++e) rot[e] -= s >= 0 ? acc[e] : acc[e] * kap;
                acc.swap(rot);
            }
            add_coeff(f.c[i], s >= 0 ? BigInt(1) : big_pow(kap, static_cast<unsigned long>(M - 1 - i)));
        }
        BigInt den = s >= 0 ? BigInt(1) : big_pow(kap, static_cast<unsigned long>(M - 1));
        CycloElem v = CycloElem::from_powers(Mk, std::move(acc), den);
        for (unsigned i = 0; i < k; ++i) v = relative_norm_step(v, p);
        total = total * v;
    }
    BigInt q = big_pow(p, static_cast<unsigned long>(N));
    BigInt inv;
    if (mpz_invert(inv.get_mpz_t(), total.denominator().get_mpz_t(), q.get_mpz_t()) == 0)
        throw InternalError("finite product is not p-integral");
    Coeff out = total.numerators();
    out.resize(R.dim(), 0);
    for (auto& x : out) x *= inv;
    RN->reduce(out);
    return out;
}

struct Lemma3Result {
    Coeff limit;                 // N^{d inf}(f)(0) mod p^certified
    i64 certified = 0;
    unsigned d = 1;
    i64 s = 0;
    std::vector<Coeff> finite;   // level n = 1..n_max: prod over mu_{p^{dn}} of f(zeta kappa^s - 1)
    std::vector<i64> agreement;  // digits shared with the limit, capped at certified
};

inline Lemma3Result lemma3_eval(const TruncSeries& f, unsigned d, i64 s, i64 N, unsigned n_max, const ColemanOptions& o = {}) {
    if (!f.is_unit()) throw UsageError("evaluation needs a unit series");
    auto it = coleman_iterate(f, d, N, o);
    Lemma3Result r;
    r.d = it.d;
    r.s = s;
    r.certified = std::min<i64>(it.certified, N);
    r.limit = it.limit.c[0];
    const CoeffRing& R = *f.ring;
    for (unsigned n = 1; n <= n_max; ++n) {
        Coeff x = finite_product(f, r.d * n, s, static_cast<int>(r.certified));
        Coeff diff(x.size());
        for (std::size_t u = 0; u < x.size(); ++u) diff[u] = x[u] - r.limit[u];
        i64 v = PadicNumber::INF;
        for (auto& t : diff)
            if (t != 0) v = std::min<i64>(v, vp(t, R.p()));
        r.finite.push_back(x);
        r.agreement.push_back(std::min(v, r.certified));
    }
    return r;
}

}  // namespace ptower
