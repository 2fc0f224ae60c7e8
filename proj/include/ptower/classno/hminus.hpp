#pragma once
// Relative class numbers along a cyclotomic Z_p-tower: the exact analytic class number
// formula, its p-adic rearrangement through L_p(0, chi w psi), and ladder certificates for
// the p-adic limit of h_n^-.

#include <sstream>

#include "../lvalues/padic_l.hpp"

namespace ptower {

struct Env {
    BernoulliCache* cache = nullptr;
    unsigned jobs = 1;
};

// ---------------------------------------------------------------- unit index Q_n

class UnitIndexPolicy {
public:
    enum class Kind { Rules, User };

    UnitIndexPolicy() = default;

    // "auto" or "user:q0,q1,..." (the last value repeats for deeper levels).
    static UnitIndexPolicy parse(const std::string& s) {
        UnitIndexPolicy u;
        if (s.empty() || s == "auto") return u;
        if (s.rfind("user:", 0) != 0) throw UsageError("policy must be 'auto' or 'user:q0,q1,...'");
        u.kind_ = Kind::User;
        std::stringstream ss(s.substr(5));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok != "1" && tok != "2") throw UsageError("unit indices must be 1 or 2");
            u.seq_.push_back(tok == "1" ? 1 : 2);
        }
        if (u.seq_.empty()) throw UsageError("empty unit-index sequence");
        return u;
    }

    Kind kind() const { return kind_; }
    std::string str() const {
        if (kind_ == Kind::Rules) return "auto";
        std::string s = "user:";
        for (std::size_t i = 0; i < seq_.size(); ++i) s += (i ? "," : "") + std::to_string(seq_[i]);
        return s;
    }

    // Direction checks: Q_n = 1 => Q_{n+1} = 1 when mu_{2p} ⊆ k; Q_n = 2 => Q_{n+1} = 2 otherwise.
    void validate(const TowerSpec& T) const {
        if (kind_ != Kind::User) return;
        bool mu = T.contains_mu_2p();
        for (std::size_t i = 0; i + 1 < seq_.size(); ++i) {
            if (mu && seq_[i] == 1 && seq_[i + 1] == 2)
                throw UsageError("unit-index sequence violates Q_n = 1 => Q_{n+1} = 1 (mu_2p in k)");
            if (!mu && seq_[i] == 2 && seq_[i + 1] == 1)
                throw UsageError("unit-index sequence violates Q_n = 2 => Q_{n+1} = 2 (mu_2p not in k)");
        }
    }

    struct Decision {
        int q;
        std::string rule;
    };

    Decision decide(const TowerSpec& T, unsigned n) const {
        if (kind_ == Kind::User) return {seq_[std::min<std::size_t>(n, seq_.size() - 1)], "user-supplied"};
        AbelianFieldSpec F = layer_field(T, n);
        u64 f = F.conductor();
        if (F.degree() == euler_phi(f)) {
            if (factor(f).size() <= 1) return {1, "prime-power cyclotomic"};
            return {2, "composite cyclotomic"};
        }
        if (F.degree() == 2 && F.is_imaginary()) return {1, "imaginary quadratic"};
        // K = K^+(i): Q = 2 would force (2) to be a square of an ideal of K^+.
        if (roots_of_unity_count(F) == 4 && euler_data_at_p(F.real_subfield(), 2).ramification == 1)
            return {1, "w=4, 2 unramified in k^+"};
        throw NeedsInputError("unit index Q_" + std::to_string(n) + " of " + F.name() +
                              " is not determined by any rule; pass --policy user:q0,q1,...");
    }

    int operator()(const TowerSpec& T, unsigned n) const { return decide(T, n).q; }

private:
    Kind kind_ = Kind::Rules;
    std::vector<int> seq_;
};

// ---------------------------------------------------------------- exact h_n^-

// prod over odd characters of the layer of -B_{1,chi}/2, grouped into rational orbits.
inline BigRational odd_bernoulli_product(const std::vector<DirichletChar>& odd, const Env& env) {
    auto orbits = partition_orbits(odd, [](const DirichletChar& x) { return rational_orbit(x); });
    auto norms = parallel_map(orbits.size(), env.jobs, [&](std::size_t i) {
        return norm_to_Q(BigRational(-1, 2) * bernoulli_B1(orbits[i][0], env.cache));
    });
    BigRational r = 1;
    for (auto& x : norms) r *= x;
    return r;
}

inline BigInt hminus(const TowerSpec& T, unsigned n, const UnitIndexPolicy& policy, const Env& env = {}) {
    T.require_imaginary();
    AbelianFieldSpec F = layer_field(T, n);
    BigRational h = odd_bernoulli_product(F.odd_characters(), env);
    h *= policy(T, n);
    h *= roots_of_unity_count(F);
    if (h.get_den() != 1 || h <= 0) throw InternalError("relative class number formula is not a positive integer: " + to_str(h));
    return h.get_num();
}

// ---------------------------------------------------------------- hypothesis chi(p) != 1

struct HypothesisCheck {
    bool ok = true;
    std::optional<DirichletChar> witness;
};

inline HypothesisCheck check_hypothesis(const TowerSpec& T) {
    HypothesisCheck h;
    for (auto& c : T.base.odd_characters())
        if (c.exponent_at(static_cast<i64>(T.p)) == std::optional<u64>(0)) {
            h.ok = false;
            h.witness = c;
            return h;
        }
    return h;
}

// prod over odd base characters of (1 - chi(p)), exact.
inline BigRational euler_product_odd(const TowerSpec& T) {
    BigRational r = 1;
    for (auto& o : partition_orbits(T.base.odd_characters(), [](const DirichletChar& x) { return rational_orbit(x); })) {
        u64 m = o[0].order();
        r *= norm_to_Q(CycloElem::from_rational(m, 1) - o[0].eval_in(static_cast<i64>(T.p), m));
    }
    return r;
}

struct Prop3Result {
    PadicNumber value;
    bool hypothesis_ok = true;
    std::optional<DirichletChar> witness;
    BigRational rational_factor;  // 2^{(delta-1)[k_n:Q]/2} Q_n w_n / prod (1 - chi(p))
};

// h_n^- = 2^{(delta-1)[k_n:Q]/2} Q_n w_n prod(1-chi(p))^{-1} prod_chi P_n(chi), chi over
// decomposition orbits of odd base characters.
inline Prop3Result hminus_prop3(const TowerSpec& T, unsigned n, const UnitIndexPolicy& policy, i64 prec,
                                const Env& env = {}) {
    T.require_imaginary();
    Prop3Result r;
    auto hyp = check_hypothesis(T);
    if (!hyp.ok) {
        r.hypothesis_ok = false;
        r.witness = hyp.witness;
        r.value = PadicNumber::zero(T.p);
        return r;
    }
    u64 deg = T.base.degree() * ipow(T.p, n);
    BigRational f = BigRational(policy(T, n) * static_cast<long>(roots_of_unity_count(T, n)));
    if (T.delta == 0) f /= BigRational(big_pow(2, static_cast<unsigned long>(deg / 2)));
    f /= euler_product_odd(T);
    r.rational_factor = f;
    PadicNumber rf = PadicNumber::from_rational(f, T.p, static_cast<int>(prec + 8));
    i64 vf = rf.valuation();
    PadicNumber acc = rf;
    for (auto& o : partition_orbits(T.base.odd_characters(), [&](const DirichletChar& x) { return decomposition_orbit(x, T.p); }))
        acc = acc * orbit_product_Pn(o[0], T.p, n, 0, prec - vf + 2, env.cache, env.jobs);
    r.value = acc.truncate_abs(prec);
    return r;
}

// ---------------------------------------------------------------- certificates

struct LadderEntry {
    unsigned level = 0;
    std::string term;
    i64 modulus_exp = 0;                    // agrees with every deeper term mod p^modulus_exp
    std::vector<unsigned> verified_against;
};

struct LimitCertificate {
    std::string name;
    PadicNumber value;
    i64 certified = 0;      // absolute precision p^certified
    bool exact = false;     // value is an exact zero/identity, infinite precision
    bool target_reached = false;
    std::string provenance;  // "theoretical ladder", "empirical stabilization", or a mix
    std::vector<LadderEntry> evidence;
    std::vector<std::string> notes;
};

// Split x = p^v * u with p ∤ u.
inline std::pair<unsigned, BigInt> split_p(const BigInt& x, u64 p) {
    BigInt u = x;
    unsigned v = static_cast<unsigned>(strip(u, p));
    return {v, u};
}

struct HminusLadder {
    std::vector<BigInt> h;  // h_0^-, h_1^-, ...
    LimitCertificate cert;
};

// Certified p-adic limit of h_n^-: non-p parts via the congruence ladder (theoretical),
// the p-part via stabilization of v_p(h_n^-) over >= 2 extra levels (empirical).
inline HminusLadder hminus_limit(const TowerSpec& T, const UnitIndexPolicy& policy, i64 target, unsigned max_level,
                                 const Env& env = {}) {
    HminusLadder L;
    L.cert.name = "h_infinity_minus";
    u64 p = T.p;
    auto hyp = check_hypothesis(T);
    if (!hyp.ok) {
        L.cert.value = PadicNumber::zero(p);
        L.cert.exact = true;
        L.cert.target_reached = true;
        L.cert.certified = PadicNumber::INF;
        L.cert.provenance = "hypothesis violated";
        L.cert.notes.push_back("chi(p) = 1 for odd " + hyp.witness->label() + "; h_n^- -> 0");
        return L;
    }
    policy.validate(T);
    for (unsigned n = 0; n <= max_level; ++n) {
        L.h.push_back(hminus(T, n, policy, env));
        unsigned top = n;
        // p-part stable over the last three levels?
        bool stable = top >= 2;
        unsigned v_top = split_p(L.h[top], p).first;
        for (unsigned j = top >= 2 ? top - 2 : 0; j <= top && stable; ++j)
            if (split_p(L.h[j], p).first != v_top) stable = false;
        i64 cert = stable ? static_cast<i64>(v_top) + top : 0;
        if (stable && cert >= target && top >= 2) break;
    }
    unsigned top = static_cast<unsigned>(L.h.size() - 1);
    // ladder evidence on non-p parts
    for (unsigned m = 0; m <= top; ++m) {
        LadderEntry e;
        e.level = m;
        e.term = L.h[m].get_str();
        e.modulus_exp = m;
        BigInt mod = big_pow(p, m);
        BigInt um = split_p(L.h[m], p).second;
        for (unsigned k = m + 1; k <= top; ++k) {
            BigInt uk = split_p(L.h[k], p).second;
            if (mod_floor(um - uk, mod) != 0)
                throw InternalError("congruence ladder failed between levels " + std::to_string(m) + " and " + std::to_string(k));
            e.verified_against.push_back(k);
        }
        L.cert.evidence.push_back(e);
    }
    auto [v, u] = split_p(L.h[top], p);
    bool stable = top >= 2;
    for (unsigned j = top >= 2 ? top - 2 : 0; j <= top && stable; ++j)
        if (split_p(L.h[j], p).first != v) stable = false;
    if (stable) {
        L.cert.certified = static_cast<i64>(v) + top;
        L.cert.value = PadicNumber::make(p, v, u, static_cast<int>(top));
        L.cert.provenance = v == 0 ? "theoretical ladder (p-part trivial, empirically stable)"
                                   : "theoretical ladder on non-p part; p-part empirical stabilization";
    } else {
        // p-part still moving: only the growing valuation is observed
        L.cert.certified = split_p(L.h[top], p).first;
        L.cert.value = PadicNumber::zero_mod(p, L.cert.certified);
        L.cert.provenance = "empirical (p-part not stabilized)";
        L.cert.notes.push_back("v_p(h_n^-) not stable over the last three levels");
    }
    L.cert.target_reached = L.cert.certified >= target;
    return L;
}

}  // namespace ptower
