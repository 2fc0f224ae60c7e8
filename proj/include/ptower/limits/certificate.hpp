#pragma once
// Certificates for limits observed to stabilize, and checked identities between limits.

#include "../classno/hminus.hpp"

namespace ptower {

struct LimitOptions {
    i64 target = 3;           // requested absolute precision p^target
    unsigned min_level = 0;   // always compute at least this many levels
    unsigned max_level = 0;   // 0: a default depending on p
    Env env;
};

inline unsigned default_max_level(u64 p) {
    switch (p) {
        case 2: return 10;
        case 3: return 6;
        case 5: return 4;
        case 7: return 3;
        default: return 2;
    }
}

inline unsigned max_level_of(const LimitOptions& o, u64 p) { return o.max_level ? o.max_level : default_max_level(p); }

// Working precision (digits) for the terms of a sequence certified to p^target.
inline i64 term_precision(const LimitOptions& o) { return std::max<i64>(o.target, 1) + 8; }

// Limit certificate from observed stabilization: t_{N-2}, t_{N-1}, t_N agree mod p^e. The claim is
// also capped by level + 1 + delta of the oldest witness, the rate at which the partial products
// of the tower converge, so early coincidences (t_0 = t_1 = t_2) never overstate precision.
inline LimitCertificate stabilization_certificate(const std::string& name, const std::vector<PadicNumber>& t,
                                                  unsigned first_level, int delta, i64 target) {
    LimitCertificate c;
    c.name = name;
    c.provenance = "empirical stabilization";
    if (t.empty()) return c;
    u64 p = t[0].prime();
    bool all_zero = std::all_of(t.begin(), t.end(), [](const PadicNumber& x) { return x.is_exact_zero(); });
    for (std::size_t i = 0; i < t.size(); ++i) {
        LadderEntry e;
        e.level = first_level + static_cast<unsigned>(i);
        e.term = t[i].str();
        e.modulus_exp = i + 1 < t.size() ? PadicNumber::INF : 0;
        for (std::size_t k = i + 1; k < t.size(); ++k) {
            e.modulus_exp = std::min(e.modulus_exp, agreement(t[i], t[k]));
            e.verified_against.push_back(first_level + static_cast<unsigned>(k));
        }
        c.evidence.push_back(e);
    }
    if (all_zero) {
        c.value = PadicNumber::zero(p);
        c.exact = true;
        c.certified = PadicNumber::INF;
        c.target_reached = true;
        c.provenance = "exact zero at every level";
        return c;
    }
    std::size_t N = t.size() - 1;
    if (N < 2) {
        c.value = t[N].truncate_abs(0);
        c.notes.push_back("fewer than three levels computed");
        return c;
    }
    i64 e = c.evidence[N - 2].modulus_exp;
    i64 rate = static_cast<i64>(first_level + N - 2) + 1 + delta;
    c.certified = std::min(e, rate);
    c.value = t[N].truncate_abs(c.certified);
    c.target_reached = c.certified >= target;
    return c;
}

// Compute several sequences level by level until each is certified to the target (or the level
// budget runs out); term(n) returns the n-th term of every sequence.
template <class TermFn>
std::vector<LimitCertificate> run_stabilization(const std::vector<std::string>& names, u64 p, int delta, const LimitOptions& o,
                                                TermFn&& term, std::vector<std::vector<PadicNumber>>* terms_out = nullptr) {
    std::vector<std::vector<PadicNumber>> terms(names.size());
    std::vector<LimitCertificate> certs(names.size());
    unsigned top = max_level_of(o, p);
    for (unsigned n = 0; n <= top; ++n) {
        auto t = term(n);
        require(t.size() == names.size(), "run_stabilization: wrong number of terms");
        bool done = n >= o.min_level;
        for (std::size_t i = 0; i < names.size(); ++i) {
            terms[i].push_back(t[i]);
            certs[i] = stabilization_certificate(names[i], terms[i], 0, delta, o.target);
            done = done && certs[i].target_reached;
        }
        if (done) break;
    }
    for (auto& c : certs)
        if (!c.target_reached) c.notes.push_back("level budget exhausted; partial certificate");
    if (terms_out) *terms_out = std::move(terms);
    return certs;
}

// Product of certified limits (exact rational factors allowed).
inline LimitCertificate combine(const std::string& name, const PadicNumber& value, const std::vector<const LimitCertificate*>& parts,
                                i64 target) {
    LimitCertificate c;
    c.name = name;
    c.value = value;
    c.exact = value.is_exact_zero();
    c.certified = value.absolute_precision();
    std::string prov;
    for (auto* q : parts) {
        if (q->exact && q->value.is_exact_zero()) {
            c.value = PadicNumber::zero(value.prime());
            c.exact = true;
            c.certified = PadicNumber::INF;
            prov = "exact zero factor " + q->name;
            break;
        }
        prov += (prov.empty() ? "" : "; ") + q->name + ": " + q->provenance;
    }
    c.provenance = "assembled (" + prov + ")";
    c.target_reached = c.certified >= target;
    return c;
}

struct IdentityCheck {
    std::string name;
    std::string lhs, rhs;
    i64 precision = 0;  // both sides known to p^precision
    bool ok = false;
    bool gating = true;  // a failure is a hard error
    std::string note;
};

inline IdentityCheck identity(const std::string& name, const PadicNumber& a, const PadicNumber& b, bool gating = true,
                              std::string note = {}) {
    IdentityCheck r;
    r.name = name;
    r.lhs = a.str();
    r.rhs = b.str();
    r.gating = gating;
    r.note = std::move(note);
    r.precision = std::min(a.absolute_precision(), b.absolute_precision());
    r.ok = agreement(a, b) >= r.precision;
    return r;
}

inline PadicNumber padic_of(const BigRational& q, u64 p, i64 prec) { return PadicNumber::from_rational(q, p, static_cast<int>(prec)); }

}  // namespace ptower
