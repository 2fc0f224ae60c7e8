#pragma once
// Generalized Bernoulli numbers B_{1,chi}, B_{2,chi} and the classical values
// L(0, chi) = -B_{1,chi}, L(-1, chi) = -B_{2,chi}/2.

#include "../characters/field.hpp"
#include "cache.hpp"

namespace ptower {

namespace detail {

// sum_{a=1..f} chi(a) w(a) / den as an element of Q(mu_m).
template <class W>
CycloElem character_sum(const DirichletChar& chi, W&& weight, const BigInt& den) {
    u64 f = chi.conductor(), m = chi.order();
    std::vector<__int128> acc(m, 0);
    for (u64 a = 1; a <= f; ++a) {
        auto k = chi.exponent_at(static_cast<i64>(a));
        if (k) acc[*k] += weight(static_cast<__int128>(a), static_cast<__int128>(f));
    }
    std::vector<BigInt> num(m);
    for (u64 k = 0; k < m; ++k) {
        __int128 v = acc[k];
        bool neg = v < 0;
        unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
        BigInt b = static_cast<unsigned long>(static_cast<u64>(u >> 64));
        b <<= 64;
        b += static_cast<unsigned long>(static_cast<u64>(u));
        num[k] = neg ? BigInt(-b) : b;
    }
    return CycloElem::from_powers(m, std::move(num), den);
}

}  // namespace detail

inline CycloElem bernoulli_B1_uncached(const DirichletChar& chi) {
    if (chi.is_trivial()) throw UsageError("B_1 of the trivial character is not defined here");
    CycloElem b = detail::character_sum(chi, [](__int128 a, __int128) { return a; }, BigInt(static_cast<unsigned long>(chi.conductor())));
    if (chi.is_even() && !b.is_zero()) throw InternalError("B_1 of an even character did not vanish: " + chi.label());
    return b;
}

inline CycloElem bernoulli_B2_uncached(const DirichletChar& chi) {
    return detail::character_sum(
        chi, [](__int128 a, __int128 f) { return 6 * a * a - 6 * a * f + f * f; },
        BigInt(static_cast<unsigned long>(6 * chi.conductor())));
}

inline CycloElem bernoulli_uncached(const std::string& kind, const DirichletChar& chi) {
    if (kind == "B1") return bernoulli_B1_uncached(chi);
    if (kind == "B2") return bernoulli_B2_uncached(chi);
    throw UsageError("unknown Bernoulli kind " + kind);
}

// Re-derivation hook for BernoulliCache's load-time spot check.
inline CycloElem bernoulli_rederive(const std::string& kind, const std::string& label, u64) {
    return bernoulli_uncached(kind, DirichletChar::from_label(label));
}

inline CycloElem bernoulli(const std::string& kind, const DirichletChar& chi, BernoulliCache* cache) {
    if (!cache) return bernoulli_uncached(kind, chi);
    std::string label = chi.label();
    if (auto v = cache->find(kind, label)) return *v;
    CycloElem v = bernoulli_uncached(kind, chi);
    cache->insert(kind, label, v);
    return v;
}

inline CycloElem bernoulli_B1(const DirichletChar& chi, BernoulliCache* cache = nullptr) { return bernoulli("B1", chi, cache); }
inline CycloElem bernoulli_B2(const DirichletChar& chi, BernoulliCache* cache = nullptr) { return bernoulli("B2", chi, cache); }

struct LValue {
    std::string label;
    int s = 0;
    CycloElem exact;            // in Q(mu_order)
    bool vanishes_by_parity = false;  // s = 0 and chi even
};

inline LValue L_at_0(const DirichletChar& chi, BernoulliCache* cache = nullptr) {
    LValue v{chi.label(), 0, CycloElem(chi.order()), false};
    if (chi.is_trivial()) {
        v.exact = CycloElem::from_rational(1, BigRational(-1, 2));  // zeta(0)
        return v;
    }
    if (chi.is_even()) {
        v.vanishes_by_parity = true;
        return v;
    }
    v.exact = -bernoulli_B1(chi, cache);
    return v;
}

inline LValue L_at_minus1(const DirichletChar& chi, BernoulliCache* cache = nullptr) {
    return LValue{chi.label(), -1, BigRational(-1, 2) * bernoulli_B2(chi, cache), false};
}

}  // namespace ptower
