#pragma once
// Kubota-Leopoldt p-adic L-values at s = 0, -1 through the interpolation formula
//   L_p(1-n, chi) = -(1 - chi w^{-n}(p) p^{n-1}) B_{n, chi w^{-n}} / n,
// and products of them evaluated in a local ring at p.

#include "../arith/local.hpp"
#include "../arith/parallel.hpp"
#include "bernoulli.hpp"

namespace ptower {

// Exact L_p(s, chi) for even chi: an element of Q(mu_m), m = order of the twisted character.
struct LpExact {
    DirichletChar chi;
    DirichletChar twisted;  // chi w^{-1} (s = 0) or chi w^{-2} (s = -1)
    int s = 0;
    bool exact_zero = false;  // Euler factor vanishes identically
    CycloElem value;
};

inline LpExact Lp_exact(const DirichletChar& chi, int s, u64 p, BernoulliCache* cache = nullptr) {
    if (chi.is_odd()) throw UsageError("L_p is evaluated at even characters only: " + chi.label());
    if (s != 0 && s != -1) throw UsageError("s must be 0 or -1");
    DirichletChar om = teichmuller_char(p);
    LpExact r;
    r.chi = chi;
    r.s = s;
    r.twisted = chi * om.pow(s == 0 ? -1 : -2);
    u64 m = r.twisted.order();
    CycloElem cp = r.twisted.eval_in(static_cast<i64>(p), m);
    if (s == 0) {
        // twisted is odd, hence nontrivial
        CycloElem euler = CycloElem::from_rational(m, 1) - cp;
        if (euler.is_zero()) {
            r.exact_zero = true;
            r.value = CycloElem(m);
            return r;
        }
        r.value = -(euler * bernoulli_B1(r.twisted, cache));
    } else {
        CycloElem euler = CycloElem::from_rational(m, 1) - BigRational(static_cast<unsigned long>(p)) * cp;
        r.value = BigRational(-1, 2) * (euler * bernoulli_B2(r.twisted, cache));
    }
    if (r.value.is_zero()) r.exact_zero = true;
    return r;
}

// L_p(s, chi) pushed into Z[mu_m]/p^N: value = p^shift * unit_part.
struct LpReduced {
    LpExact exact;
    i64 shift = 0;
    CycloModElem reduced;
};

inline LpReduced Lp_value(const DirichletChar& chi, int s, u64 p, int N, BernoulliCache* cache = nullptr) {
    LpReduced r;
    r.exact = Lp_exact(chi, s, p, cache);
    ModWord w(p, N);
    if (r.exact.exact_zero) {
        r.reduced = CycloModElem(r.exact.value.order(), w);
        return r;
    }
    BigInt den = r.exact.value.denominator();
    int a = strip(den, p);
    r.shift = -a;
    CycloElem scaled = BigRational(big_pow(p, static_cast<unsigned long>(a))) * r.exact.value;
    r.reduced = CycloModElem::reduce(scaled, w);
    return r;
}

// Local rings are cached by (p, W, prime-to-p root order, p-exponent).
inline std::shared_ptr<const LocalRing> local_ring(u64 p, int W, u64 mprime, unsigned k) {
    static std::mutex mu;
    static std::map<std::tuple<u64, int, u64, unsigned>, std::shared_ptr<const LocalRing>> cache;
    auto key = std::tuple(p, W, mprime, k);
    {
        std::lock_guard<std::mutex> g(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto R = std::make_shared<const LocalRing>(p, W, mprime, k);
    std::lock_guard<std::mutex> g(mu);
    return cache.emplace(key, std::move(R)).first->second;
}

// An exact value attached to a character, equivariant: value(chi^a) = sigma_a(value(chi)).
struct CharValue {
    DirichletChar chi;
    CycloElem value;
};

// Replace every complete orbit under {a == 1 mod prime-to-p part of the order} by the exact
// relative norm down to the unramified field Q(mu_{m'}). Products are unchanged; the p-adic
// valuations of the new factors are integers, so no digits are lost to ramification.
inline std::vector<CycloElem> descend_ramified(const std::vector<CharValue>& fs, u64 p) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < fs.size(); ++i) index.emplace(fs[i].chi.label(), i);
    std::vector<bool> used(fs.size(), false);
    std::vector<CycloElem> out;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        if (used[i]) continue;
        const DirichletChar& chi = fs[i].chi;
        u64 m = chi.order(), mp = m;
        while (mp % p == 0) mp /= p;
        std::vector<std::size_t> members;
        bool complete = fs[i].value.order() % m == 0 && fs[i].value.order() / m == 1;
        for (u64 a = 1; a <= m && complete; a += mp) {
            if (gcd_u(a, m) != 1) continue;
            auto it = index.find(chi.pow(static_cast<i64>(a)).label());
            if (it == index.end() || used[it->second]) complete = false;
            else members.push_back(it->second);
        }
        if (!complete || mp == m) {
            used[i] = true;
            out.push_back(fs[i].value);
            continue;
        }
        for (auto j : members) used[j] = true;
        CycloElem x = fs[i].value;
        while (x.order() % p == 0) x = relative_norm_step(x, p);
        out.push_back(x);
    }
    return out;
}

// p^{shift} * prod factors, for a Gal(Qbar_p/Q_p)-stable family of exact factors, to absolute
// precision `prec` (lower if the 62-bit working word runs out; the result carries what it has).
struct LocalProduct {
    PadicNumber value;
    int working_digits = 0;
};

inline LocalProduct local_product(u64 p, const std::vector<CycloElem>& factors, i64 shift, i64 prec) {
    i64 e = shift;
    u64 mprime = 1;
    unsigned k = 0;
    for (auto& f : factors) {
        if (f.is_zero()) return {PadicNumber::zero(p), 0};
        e += p_scale(f, p);
        u64 m = f.order();
        unsigned kk = 0;
        while (m % p == 0) m /= p, ++kk;
        mprime = lcm_u(mprime, m);
        k = std::max(k, kk);
    }
    i64 want = std::max<i64>(1, prec - e);
    int W = static_cast<int>(std::min<i64>(want, word_precision_cap(p)));
    auto R = local_ring(p, W, mprime, k);
    ScaledLocal acc{R->one(), shift, false};
    for (auto& f : factors) acc = scaled_mul(*R, acc, scaled_embed(*R, f));
    return {scaled_to_padic(*R, acc), W};
}

inline LocalProduct local_product(u64 p, const std::vector<CharValue>& factors, i64 shift, i64 prec) {
    for (auto& f : factors)
        if (f.value.is_zero()) return {PadicNumber::zero(p), 0};
    return local_product(p, descend_ramified(factors, p), shift, prec);
}

// prod over the given even characters of 2^{-delta} L_p(s, x), times p^shift, to absolute
// precision prec. The family must be stable under Gal(Qbar_p/Q_p).
inline PadicNumber family_product(const std::vector<DirichletChar>& args, u64 p, int s, i64 shift, i64 prec,
                                  BernoulliCache* cache = nullptr, unsigned jobs = 1) {
    auto fs = parallel_map(args.size(), jobs, [&](std::size_t i) { return Lp_exact(args[i], s, p, cache); });
    std::vector<CharValue> vals;
    for (auto& f : fs) {
        if (f.exact_zero) return PadicNumber::zero(p);
        vals.push_back({f.twisted, p == 2 ? BigRational(1, 2) * f.value : f.value});
    }
    return local_product(p, vals, shift, prec).value;
}

// The twists x w^{-1} (s = 0) or x w^{-2} (s = -1) whose Bernoulli numbers give L_p(s, x).
inline std::vector<DirichletChar> lp_twists(const std::vector<DirichletChar>& args, u64 p, int s) {
    DirichletChar t = teichmuller_char(p).pow(s == 0 ? -1 : -2);
    std::vector<DirichletChar> out;
    for (auto& x : args) out.push_back(x * t);
    return out;
}

// L_p(s, x) lies in the field of values of its twist, so the product is in Q exactly when the
// twisted family is stable under Gal(Qbar/Q) (always for p = 2, 3, where w is rational).
inline bool family_product_is_rational(const std::vector<DirichletChar>& args, u64 p, int s) {
    auto tw = lp_twists(args, p, s);
    std::set<DirichletChar> all(tw.begin(), tw.end());
    for (auto& x : tw)
        for (auto& y : rational_orbit(x))
            if (!all.count(y)) return false;
    return true;
}

// The same product computed exactly in Q, one relative norm per rational orbit of twists.
inline BigRational family_product_exact(const std::vector<DirichletChar>& args, u64 p, int s, BernoulliCache* cache = nullptr,
                                        unsigned jobs = 1) {
    if (!family_product_is_rational(args, p, s)) throw RationalityError("twisted family is not Galois-stable over Q");
    DirichletChar back = teichmuller_char(p).pow(s == 0 ? 1 : 2);
    auto orbits = partition_orbits(lp_twists(args, p, s), [](const DirichletChar& x) { return rational_orbit(x); });
    auto norms = parallel_map(orbits.size(), jobs, [&](std::size_t i) {
        LpExact f = Lp_exact(orbits[i][0] * back, s, p, cache);
        if (f.exact_zero) return BigRational(0);
        BigRational n = norm_to_Q(f.value);
        if (f.value.order() > orbits[i][0].order()) throw InternalError("L_p value outside the field of its twist");
        if (p == 2) n /= BigRational(big_pow(2, static_cast<unsigned long>(orbits[i].size())));
        return n;
    });
    BigRational r = 1;
    for (auto& x : norms) r *= x;
    return r;
}

// {x psi : x in xs, psi of level <= n}
inline std::vector<DirichletChar> tower_twists(const std::vector<DirichletChar>& xs, u64 p, unsigned n) {
    DirichletChar psi = tower_generator(p, n), cur;
    std::vector<DirichletChar> out;
    for (u64 j = 0, pn = ipow(p, n); j < pn; ++j) {
        for (auto& x : xs) out.push_back(x * cur);
        cur = cur * psi;
    }
    return out;
}

// P_n(chi): prod of 2^{-delta} L_p(s, chi' w psi) over chi' in the decomposition orbit of an
// odd chi and psi over the characters of level <= n.
inline PadicNumber orbit_product_Pn(const DirichletChar& chi, u64 p, unsigned n, int s, i64 prec,
                                    BernoulliCache* cache = nullptr, unsigned jobs = 1) {
    if (chi.is_even()) throw UsageError("orbit product expects an odd character (chi w must be even)");
    DirichletChar om = teichmuller_char(p);
    std::vector<DirichletChar> base;
    for (auto& x : decomposition_orbit(chi, p)) base.push_back(x * om);
    return family_product(tower_twists(base, p, n), p, s, 0, prec, cache, jobs);
}

}  // namespace ptower
