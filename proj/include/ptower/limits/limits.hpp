#pragma once
// p-adic limits along a cyclotomic Z_p-tower: the L-value products script-L, the constant c_p,
// h_infinity^- assembled from them and checked against the class-number ladder, the residue limit
// rho~, the regulator-ratio limit and K_2-order limits.

#include "certificate.hpp"

namespace ptower {

// ---------------------------------------------------------------- u_n and 2^{p^n}


struct USequence {
    std::vector<BigInt> u;  // u_n = (kappa^{p^n} - 1) / p^{n+1+delta}
    bool ladder_ok = true;  // u_{n+1} == u_n mod p^{n+delta}
    bool units = true;
};

inline USequence u_sequence(u64 p, unsigned n_max) {
    USequence r;
    int delta = p == 2;
    for (unsigned n = 0; n <= n_max; ++n) {
        BigInt k = big_pow(kappa(p), static_cast<unsigned long>(ipow(p, n))) - 1;
        BigInt d = big_pow(p, n + 1 + delta);
        require(mod_floor(k, d) == 0, "u_sequence: kappa^{p^n} != 1 mod p^{n+1+delta}");
        BigInt u = k / d;
        r.units = r.units && vp(u, p) == 0;
        if (n > 0 && n - 1 + delta > 0)
            r.ladder_ok = r.ladder_ok && mod_floor(u - r.u.back(), big_pow(p, n - 1 + delta)) == 0;
        r.u.push_back(u);
    }
    return r;
}

// (2^{p^n})^{-e} mod p^N for n = 0..N-1, and the check that it settles on w(2)^{-e}.
struct TwoPowerCheck {
    std::vector<PadicNumber> seq;
    PadicNumber limit;
    bool ok = false;
};

inline TwoPowerCheck two_power_check(u64 p, i64 e, int N) {
    TwoPowerCheck c;
    c.limit = teichmuller(2, p, N).pow(-e);
    PadicNumber two = PadicNumber::from_int(2, p, N);
    for (int n = 0; n < N; ++n) c.seq.push_back(two.pow(static_cast<i64>(ipow(p, static_cast<unsigned>(n)))).pow(-e));
    // 2^{p^n} == w(2) mod p^{n+1}
    c.ok = true;
    for (int n = 0; n < N; ++n) c.ok = c.ok && agreement(c.seq[n], c.limit) >= n + 1;
    return c;
}

// ---------------------------------------------------------------- script-L

struct ScriptL {
    std::vector<DirichletChar> family;  // even characters whose limits are multiplied
    LimitCertificate s0, sm1;
    IdentityCheck s_independence;
    std::vector<std::pair<unsigned, i64>> level_agreement;  // (n, v_p(term_0 - term_{-1}))
    std::vector<std::string> exact_partials;               // partial products in Q, when the twists are Q-stable
    bool rational_ok = true;
};

// lim_n prod_{x in family, psi of level <= n} 2^{-delta} L_p(s, x psi) at s = 0 and s = -1.
// The family must be Frobenius-stable; a single Z_p-valued character gives script-L(chi) itself.
inline ScriptL script_L_family(const std::vector<DirichletChar>& family, u64 p, const LimitOptions& o, const std::string& name) {
    for (auto& x : family)
        if (x.is_odd() || x.is_trivial()) throw UsageError("script-L needs even nontrivial characters: " + x.label());
    ScriptL r;
    r.family = family;
    int delta = p == 2;
    i64 P = term_precision(o);
    bool exact_check = family_product_is_rational(family, p, 0);
    std::vector<std::vector<PadicNumber>> terms;
    auto certs = run_stabilization({name + "@s=0", name + "@s=-1"}, p, delta, o,
                                   [&](unsigned n) {
                                       auto xs = tower_twists(family, p, n);
                                       PadicNumber a = family_product(xs, p, 0, 0, P, o.env.cache, o.env.jobs);
                                       PadicNumber b = family_product(xs, p, -1, 0, P, o.env.cache, o.env.jobs);
                                       if (exact_check) {
                                           BigRational q = family_product_exact(xs, p, 0, o.env.cache, o.env.jobs);
                                           r.exact_partials.push_back(to_str(q));
                                           PadicNumber qa = q == 0 ? PadicNumber::zero(p) : padic_of(q, p, P);
                                           if (!identity("rational", a, qa).ok) r.rational_ok = false;
                                       }
                                       return std::vector<PadicNumber>{a, b};
                                   },
                                   &terms);
    r.s0 = certs[0];
    r.sm1 = certs[1];
    for (std::size_t n = 0; n < terms[0].size(); ++n)
        r.level_agreement.emplace_back(static_cast<unsigned>(n), agreement(terms[0][n], terms[1][n]));
    r.s_independence = identity(name + ": s=0 vs s=-1", r.s0.value, r.sm1.value);
    return r;
}

// script-L(chi) for Z_p-valued chi; for larger residue degree, the product over the Frobenius orbit.
inline ScriptL script_L(const DirichletChar& chi, u64 p, const LimitOptions& o) {
    auto orbit = galois_orbit_p(chi, p);
    std::string name = orbit.size() == 1 ? "L(" + chi.label() + ")" : "prod_sigma L(" + chi.label() + ")";
    return script_L_family(orbit, p, o, name);
}

// ---------------------------------------------------------------- c_p

struct CpLimit {
    LimitCertificate s0;   // lim p^{n+1+delta} prod_psi 2^{-delta} L_p(0, psi) = -c_p
    LimitCertificate sm1;  // ... at s = -1: -c_p / 2
    LimitCertificate c_p;
    IdentityCheck ratio;   // s0 / sm1 = 2
    std::vector<std::string> exact_partials;
    bool rational_ok = true;
};

inline CpLimit c_p_limit(u64 p, const LimitOptions& o) {
    CpLimit r;
    int delta = p == 2;
    i64 P = term_precision(o);
    auto certs = run_stabilization({"c_p@s=0", "c_p@s=-1"}, p, delta, o, [&](unsigned n) {
        auto xs = tower_twists({DirichletChar()}, p, n);
        i64 shift = n + 1 + delta;
        PadicNumber a = family_product(xs, p, 0, shift, P, o.env.cache, o.env.jobs);
        PadicNumber b = family_product(xs, p, -1, shift, P, o.env.cache, o.env.jobs);
        if (family_product_is_rational(xs, p, 0)) {
            BigRational q = family_product_exact(xs, p, 0, o.env.cache, o.env.jobs) * BigRational(big_pow(p, shift));
            r.exact_partials.push_back(to_str(q));
            if (!identity("rational", a, padic_of(q, p, P)).ok) r.rational_ok = false;
        }
        return std::vector<PadicNumber>{a, b};
    });
    r.s0 = certs[0];
    r.sm1 = certs[1];
    r.c_p = r.s0;
    r.c_p.name = "c_p";
    r.c_p.value = -r.s0.value;
    PadicNumber two = PadicNumber::from_int(2, p, static_cast<int>(P));
    r.ratio = identity("c_p: limit(s=0) / limit(s=-1) = 2", r.s0.value / r.sm1.value, two);
    if (r.c_p.certified >= 1 && !r.c_p.value.is_unit())
        throw InternalError("c_p is not a p-adic unit: " + r.c_p.value.str());
    return r;
}

// ---------------------------------------------------------------- tower constants

struct TowerConstants {
    bool mu_2p = false;
    u64 w0 = 0;
    int limQ = 0;
    unsigned q_level = 0;       // level whose unit index stands for the limit
    BigRational a;              // a_1 if mu_2p ⊆ k, else a_0
    PadicNumber b;              // b_1 / b_0
    BigRational euler_odd;      // prod over odd chi of (1 - chi(p))
    std::optional<u64> w2_real; // w_2(k^+) when mu_2p ⊆ k
    BigRational v0;
    TwoPowerCheck two_power;
};

inline TowerConstants tower_constants(const TowerSpec& T, const UnitIndexPolicy& policy, unsigned q_level, i64 prec) {
    TowerConstants c;
    u64 p = T.p;
    c.mu_2p = T.contains_mu_2p();
    c.w0 = roots_of_unity_count(T.base);
    c.q_level = q_level;
    c.limQ = policy(T, q_level);
    c.a = BigRational(static_cast<long>(c.w0 * c.limQ));
    if (c.mu_2p) c.a /= BigRational(big_pow(p, 1 + T.delta));
    if (c.mu_2p && c.a.get_den() != 1) throw InternalError("a_1 is not an integer");
    i64 e = static_cast<i64>(T.base.degree() / 2);
    c.b = padic_of(c.a, p, prec);
    if (p != 2) {
        c.two_power = two_power_check(p, e, static_cast<int>(prec));
        c.b = c.b * c.two_power.limit;
    } else {
        c.two_power.ok = true;
    }
    c.euler_odd = euler_product_odd(T);
    if (c.mu_2p) {
        c.w2_real = w2(T.base.real_subfield());
        c.v0 = BigRational(static_cast<unsigned long>(*c.w2_real), big_pow(p, 1 + T.delta));
        c.v0.canonicalize();
    }
    return c;
}

// ---------------------------------------------------------------- h_infinity^-

struct HInfinity {
    std::string branch;  // "mu_2p in k", "mu_2p not in k", "hypothesis violated"
    LimitCertificate assembled;
    HminusLadder ladder;
    IdentityCheck agree;
    std::vector<ScriptL> factors;  // script-L products entering the assembly
    std::optional<CpLimit> cp;
    std::optional<DirichletChar> witness;
};

inline std::vector<std::vector<DirichletChar>> even_orbits(const TowerSpec& T) {
    std::vector<DirichletChar> ev;
    for (auto& x : T.base.even_characters())
        if (!x.is_trivial()) ev.push_back(x);
    return partition_orbits(ev, [&](const DirichletChar& x) { return galois_orbit_p(x, T.p); });
}

// Product of the certified s = 0 limits of the given script-L families.
inline PadicNumber product_of(const std::vector<ScriptL>& fs, u64 p, i64 prec) {
    PadicNumber r = PadicNumber::from_int(1, p, static_cast<int>(prec));
    for (auto& f : fs) r = r * f.s0.value;
    return r;
}

inline HInfinity h_infinity(const TowerSpec& T, const UnitIndexPolicy& policy, const LimitOptions& o,
                            std::optional<TowerConstants>* constants_out = nullptr) {
    T.require_imaginary();
    HInfinity r;
    u64 p = T.p;
    i64 P = term_precision(o);
    r.ladder = hminus_limit(T, policy, o.target, max_level_of(o, p), o.env);
    auto hyp = check_hypothesis(T);
    if (!hyp.ok) {
        r.branch = "hypothesis violated";
        r.witness = hyp.witness;
        // chi(p) = 1 for an odd chi: script-L(chi w) vanishes exactly
        DirichletChar cw = *hyp.witness * teichmuller_char(p);
        r.factors.push_back(script_L_family(galois_orbit_p(cw, p), p, o, "L(" + cw.label() + ")"));
        r.assembled = combine("h_infinity_minus (assembled)", PadicNumber::zero(p), {&r.factors[0].s0}, o.target);
        r.agree = identity("assembly = ladder limit", r.assembled.value, r.ladder.cert.value);
        return r;
    }
    unsigned q_level = static_cast<unsigned>(r.ladder.h.size() - 1);
    TowerConstants C = tower_constants(T, policy, q_level, P);
    PadicNumber E_inv = padic_of(1 / C.euler_odd, p, P);
    std::vector<const LimitCertificate*> parts;
    PadicNumber value;
    if (C.mu_2p) {
        r.branch = "mu_2p in k";
        r.cp = c_p_limit(p, o);
        for (auto& orb : even_orbits(T)) r.factors.push_back(script_L_family(orb, p, o, "L(" + orb[0].label() + ")"));
        value = -C.b * r.cp->c_p.value * E_inv * product_of(r.factors, p, P);
        parts.push_back(&r.cp->c_p);
    } else {
        r.branch = "mu_2p not in k";
        DirichletChar om = teichmuller_char(p);
        for (auto& orb : partition_orbits(T.base.odd_characters(), [&](const DirichletChar& x) { return decomposition_orbit(x, p); })) {
            std::vector<DirichletChar> fam;
            for (auto& x : orb) fam.push_back(x * om);
            std::sort(fam.begin(), fam.end());
            r.factors.push_back(script_L_family(fam, p, o, "L(" + fam[0].label() + ")"));
        }
        value = C.b * E_inv * product_of(r.factors, p, P);
    }
    for (auto& f : r.factors) parts.push_back(&f.s0);
    r.assembled = combine("h_infinity_minus (assembled)", value, parts, o.target);
    r.agree = identity("assembly = ladder limit", r.assembled.value, r.ladder.cert.value);
    if (constants_out) *constants_out = C;
    return r;
}

// ---------------------------------------------------------------- rho~ and the regulator ratio

inline void require_mu_2p(const TowerSpec& T, const char* what) {
    if (!T.contains_mu_2p()) throw UsageError(std::string(what) + " requires mu_2p ⊆ k");
}

// rho~_infinity = c_p prod_{even chi != 1} script-L(chi).
inline LimitCertificate rho_tilde(const TowerSpec& T, const HInfinity& H, i64 target) {
    require_mu_2p(T, "rho_tilde");
    u64 p = T.p;
    if (H.branch == "hypothesis violated") {
        LimitCertificate c = H.assembled;
        c.name = "rho_tilde";
        return c;
    }
    PadicNumber v = H.cp->c_p.value * product_of(H.factors, p, H.cp->c_p.value.absolute_precision() + 8);
    std::vector<const LimitCertificate*> parts{&H.cp->c_p};
    for (auto& f : H.factors) parts.push_back(&f.s0);
    return combine("rho_tilde", v, parts, target);
}

// lim p^{n+1+delta} R_n^+ / sqrt(D_n^+) from rho~ and a user-supplied h_infinity^+; the sign is the
// one that makes the p-adic class number formula hold.
inline LimitCertificate regulator_ratio_limit(const TowerSpec& T, const LimitCertificate& rho, const PadicNumber& h_plus,
                                              i64 target) {
    require_mu_2p(T, "regulator_ratio_limit");
    if (h_plus.is_zero()) throw UsageError("h_infinity^+ must be nonzero");
    u64 p = T.p;
    i64 prec = std::max<i64>(rho.value.absolute_precision() == PadicNumber::INF ? target + 8 : rho.value.absolute_precision(), 1) + 8;
    BigRational F = euler_data_at_p(T.base.real_subfield(), p).factor;
    PadicNumber den = h_plus * padic_of(F, p, prec);
    if (p != 2) den = den * teichmuller(2, p, static_cast<int>(prec)).pow(static_cast<i64>(T.base.degree() / 2));
    PadicNumber v = rho.value.is_exact_zero() ? rho.value : PadicNumber::from_int(2, p, static_cast<int>(prec)) * rho.value / den;
    LimitCertificate c = combine("regulator_ratio", v, {&rho}, target);
    c.notes.push_back("h_infinity^+ supplied by the user: " + h_plus.str());
    return c;
}

// ---------------------------------------------------------------- K_2

// #K_2(O_F) = w_2(F) |zeta_F(-1)| for totally real abelian F.
inline BigInt k2_order(const AbelianFieldSpec& F, const Env& env = {}) {
    if (!F.is_totally_real()) throw UsageError("k2_order requires a totally real field");
    auto orbits = partition_orbits(F.characters(), [](const DirichletChar& x) { return rational_orbit(x); });
    auto norms = parallel_map(orbits.size(), env.jobs, [&](std::size_t i) {
        return norm_to_Q(BigRational(-1, 2) * bernoulli_B2(orbits[i][0], env.cache));
    });
    BigRational z = 1;
    for (auto& x : norms) z *= x;
    if (F.degree() % 2) z = -z;
    BigRational k = z * BigRational(static_cast<unsigned long>(w2(F)));
    if (k.get_den() != 1 || k <= 0) throw InternalError("Birch-Tate order is not a positive integer: " + to_str(k));
    return k.get_num();
}

struct K2Limit {
    std::vector<BigInt> orders;    // #K_2(O_n^+)
    std::vector<u64> w2_layers;    // w_2(k_n^+)
    bool w2_growth_ok = true;      // w_2(k_n^+) = p^n w_2(k_0^+)
    LimitCertificate cert;         // lim 2^{(-[k^+:Q] 2^n + 1) delta} #K_2(O_n^+)
};

inline K2Limit k2_limit(const TowerSpec& T, const LimitOptions& o) {
    require_mu_2p(T, "k2_limit");
    u64 p = T.p;
    K2Limit r;
    u64 dplus = T.base.degree() / 2;
    i64 P = term_precision(o);
    auto certs = run_stabilization({"k2_limit"}, p, T.delta, o, [&](unsigned n) {
        AbelianFieldSpec F = layer_field(T, n).real_subfield();
        r.w2_layers.push_back(w2(F));
        if (r.w2_layers.back() != r.w2_layers.front() * ipow(p, n)) r.w2_growth_ok = false;
        BigInt k = k2_order(F, o.env);
        r.orders.push_back(k);
        BigRational t(k);
        if (T.delta) t /= BigRational(big_pow(2, static_cast<unsigned long>(dplus * ipow(2, n) - 1)));
        return std::vector<PadicNumber>{padic_of(t, p, P)};
    });
    r.cert = certs[0];
    return r;
}

// ---------------------------------------------------------------- everything together

struct TowerLimits {
    std::string tower;
    u64 p = 0;
    HInfinity h;
    std::optional<TowerConstants> constants;
    std::optional<LimitCertificate> rho;
    std::optional<LimitCertificate> regulator;
    std::optional<K2Limit> k2;
    std::vector<IdentityCheck> identities;
    std::vector<std::string> notes;

    bool gating_ok() const {
        return std::all_of(identities.begin(), identities.end(), [](const IdentityCheck& c) { return c.ok || !c.gating; });
    }
};

inline bool is_full_cyclotomic(const AbelianFieldSpec& F, u64 m) { return F.characters() == cyclotomic_field(m).characters(); }

inline TowerLimits tower_limits(const TowerSpec& T, const UnitIndexPolicy& policy, const LimitOptions& o,
                                std::optional<PadicNumber> h_plus = std::nullopt) {
    TowerLimits L;
    L.tower = T.base.name();
    L.p = T.p;
    u64 p = T.p;
    L.h = h_infinity(T, policy, o, &L.constants);
    L.identities.push_back(L.h.agree);
    for (auto& f : L.h.factors) {
        L.identities.push_back(f.s_independence);
        if (!f.rational_ok) L.identities.push_back({f.s0.name + ": exact rational partial products", "", "", 0, false, true, ""});
    }
    if (L.h.cp) {
        L.identities.push_back(L.h.cp->ratio);
        if (!L.h.cp->rational_ok) L.identities.push_back({"c_p: exact rational partial products", "", "", 0, false, true, ""});
    }
    if (L.constants && p != 2)
        L.identities.push_back({"(2^{p^n})^{-[k:Q]/2} -> w(2)^{-[k:Q]/2}", "", "", static_cast<i64>(L.constants->two_power.seq.size()),
                                L.constants->two_power.ok, true, ""});
    if (!T.contains_mu_2p()) return L;

    const PadicNumber& hinf = L.h.ladder.cert.value;
    bool violated = L.h.branch == "hypothesis violated";
    L.rho = rho_tilde(T, L.h, o.target);
    L.k2 = k2_limit(T, o);
    if (!L.k2->w2_growth_ok) L.notes.push_back("w_2(k_n^+) != p^n w_2(k_0^+) at some computed level");
    if (violated) {
        L.identities.push_back(identity("rho_tilde = 0", L.rho->value, PadicNumber::zero(p)));
        return L;
    }
    const TowerConstants& C = *L.constants;
    i64 P = term_precision(o);
    PadicNumber E = padic_of(C.euler_odd, p, P), E_inv = padic_of(1 / C.euler_odd, p, P);
    L.identities.push_back(identity("h = -b_1 * rho_tilde / prod(1 - chi(p))", hinf, -C.b * L.rho->value * E_inv));

    // residue-limit example for k = Q(mu_2p)
    bool cyc = is_full_cyclotomic(T.base, p == 2 ? 4 : p);
    if (cyc && p != 2) {
        int sgn = ((p * p - 1) / 8) % 2 ? -1 : 1;
        std::string nm = sgn < 0 ? "example1: h=2*rho_tilde" : "example1: h=-2*rho_tilde";
        L.identities.push_back(identity(nm, hinf, PadicNumber::from_int(-2 * sgn, p, static_cast<int>(P)) * L.rho->value));
    } else if (cyc) {
        L.identities.push_back(identity("example1: h=-rho_tilde", hinf, -L.rho->value));
    }

    if (h_plus) {
        L.regulator = regulator_ratio_limit(T, *L.rho, *h_plus, o.target);
        BigRational F = euler_data_at_p(T.base.real_subfield(), p).factor;
        PadicNumber rhs = -padic_of(C.a / 2, p, P) * *h_plus * E_inv * padic_of(F, p, P) * L.regulator->value;
        L.identities.push_back(identity("h = -(a_1 h^+ / 2) prod(1 - chi(p))^{-1} prod(1 - 1/N(P)) * regulator_ratio", hinf, rhs));
        if (cyc) {
            PadicNumber ex2 = -*h_plus / PadicNumber::from_int(2, p, static_cast<int>(P)) * padic_of(F, p, P) * L.regulator->value;
            auto chk = identity("example2: h = -(h^+/2)(1 - 1/p) * regulator_ratio", hinf, ex2, false);
            if (!chk.ok) chk.note = "differs from the general identity by the factor a_1 = " + to_str(C.a);
            L.identities.push_back(chk);
        }
    }

    // K_2: Birch-Tate limit against h_infinity^-
    u64 dplus = T.base.degree() / 2;
    int sgn = ((1 - T.delta) * dplus) % 2 ? -1 : 1;
    BigRational kfac = BigRational(sgn) * C.v0 / (BigRational(T.delta ? 1 : 2) * BigRational(1 - static_cast<long>(p)));
    PadicNumber kr = padic_of(kfac, p, P) * hinf * E / C.b;
    L.identities.push_back(identity("k2_limit = (-1)^{(1-delta)[k^+:Q]} v_0 h / (2^{1-delta} b_1 (1-p)) * prod(1 - chi(p))", L.k2->cert.value, kr));
    PadicNumber kl = padic_of(BigRational(-sgn) * C.v0 / (BigRational(T.delta ? 1 : 2) * BigRational(1 - static_cast<long>(p))), p, P) *
                     L.h.cp->c_p.value * product_of(L.h.factors, p, P);
    L.identities.push_back(identity("k2_limit = (-1)^{(1-delta)[k^+:Q]} v_0 / (1-p) * (-c_p / 2^{1-delta}) * prod L(chi)", L.k2->cert.value, kl));
    if (cyc) {
        if (p == 3) {
            L.identities.push_back(identity("example3: -h_minus", L.k2->cert.value, -hinf));
        } else if (p == 2) {
            auto chk = identity("example3: 3*h_minus", L.k2->cert.value, PadicNumber::from_int(3, p, static_cast<int>(P)) * hinf);
            if (!chk.ok) chk.note = "with w_2(Q) = 24 (so that #K_2(Z) = 2) the limit is -6 h_infinity^-";
            L.identities.push_back(chk);
        } else {
            int e = static_cast<int>((p - 1) / 2 + (p * p - 1) / 8) % 2 ? -1 : 1;
            BigRational f(6 * e, 1 - static_cast<long>(p));
            auto chk = identity("example3: 6*h_minus*sign/(1-p)", L.k2->cert.value, padic_of(f, p, P) * hinf);
            L.identities.push_back(chk);
        }
        if (C.w2_real)
            L.notes.push_back("v_0 = w_2(k_0^+) / p^{1+delta} = " + std::to_string(*C.w2_real) + " / " + big_pow(p, 1 + T.delta).get_str() + " = " +
                              to_str(C.v0) + "; the constants 12 (p != 3) and 4 (p = 3) correspond to w_2(Q) = 12, incompatible with #K_2(Z) = 2");
    }
    return L;
}

}  // namespace ptower
