#pragma once
// Abelian fields as closed groups of primitive Dirichlet characters, cyclotomic Z_p-towers
// over them, and invariants read off the character group (roots of unity, w_2, Euler data).

#include <set>

#include <json.hpp>

#include "dirichlet.hpp"

namespace ptower {

// Closure of a generating set under multiplication.
inline std::vector<DirichletChar> character_closure(const std::vector<DirichletChar>& gens, std::size_t limit = 1u << 20) {
    std::set<DirichletChar> seen{DirichletChar::trivial()};
    std::vector<DirichletChar> frontier{DirichletChar::trivial()};
    while (!frontier.empty()) {
        std::vector<DirichletChar> next;
        for (auto& x : frontier)
            for (auto& g : gens) {
                DirichletChar y = x * g;
                if (seen.insert(y).second) {
                    if (seen.size() > limit) throw ResourceError("character group too large");
                    next.push_back(y);
                }
            }
        frontier.swap(next);
    }
    return {seen.begin(), seen.end()};
}

class AbelianFieldSpec {
public:
    AbelianFieldSpec() : chars_{DirichletChar::trivial()}, name_("Q") {}

    AbelianFieldSpec(std::vector<DirichletChar> chars, std::string name) : chars_(std::move(chars)), name_(std::move(name)) {
        std::sort(chars_.begin(), chars_.end());
        chars_.erase(std::unique(chars_.begin(), chars_.end()), chars_.end());
        std::set<DirichletChar> s(chars_.begin(), chars_.end());
        if (!s.count(DirichletChar::trivial())) throw UsageError("character set must contain the trivial character");
        for (auto& x : chars_)
            for (auto& y : chars_)
                if (!s.count(x * y)) throw UsageError("character set is not closed under products");
    }

    static AbelianFieldSpec generated_by(const std::vector<DirichletChar>& gens, std::string name) {
        return AbelianFieldSpec(character_closure(gens), std::move(name));
    }

    const std::vector<DirichletChar>& characters() const { return chars_; }
    const std::string& name() const { return name_; }
    std::size_t degree() const { return chars_.size(); }

    u64 conductor() const {
        u64 f = 1;
        for (auto& c : chars_) f = lcm_u(f, c.conductor());
        return f;
    }
    bool contains(const DirichletChar& c) const { return std::binary_search(chars_.begin(), chars_.end(), c); }
    bool is_imaginary() const {
        return std::any_of(chars_.begin(), chars_.end(), [](auto& c) { return c.is_odd(); });
    }
    bool is_totally_real() const { return !is_imaginary(); }

    std::vector<DirichletChar> odd_characters() const { return filter(true); }
    std::vector<DirichletChar> even_characters() const { return filter(false); }

    // Maximal real subfield.
    AbelianFieldSpec real_subfield() const { return AbelianFieldSpec(even_characters(), name_ + "^+"); }

    std::vector<std::string> labels() const {
        std::vector<std::string> r;
        for (auto& c : chars_) r.push_back(c.label());
        return r;
    }

private:
    std::vector<DirichletChar> filter(bool odd) const {
        std::vector<DirichletChar> r;
        for (auto& c : chars_)
            if (c.is_odd() == odd) r.push_back(c);
        return r;
    }

    std::vector<DirichletChar> chars_;
    std::string name_;
};

// Q(mu_m)
inline AbelianFieldSpec cyclotomic_field(u64 m) {
    if (m == 0) throw UsageError("Qzeta: m must be positive");
    return AbelianFieldSpec::generated_by(generators_mod(m), "Qzeta:" + std::to_string(m));
}

// Q(sqrt d), d squarefree, d != 0, 1.
inline AbelianFieldSpec quadratic_field(i64 d) {
    if (d == 0 || d == 1) throw UsageError("Qsqrt: d must be a squarefree integer other than 0, 1");
    u64 ad = static_cast<u64>(d < 0 ? -d : d);
    DirichletChar chi;
    i64 star = 1;  // product of odd prime discriminants q* = (-1)^{(q-1)/2} q
    for (auto [q, e] : factor(ad)) {
        if (e > 1) throw UsageError("Qsqrt: d must be squarefree");
        if (q == 2) continue;
        chi = chi * DirichletChar::local(q, detail::Angle::make(1, 2));
        star *= (q % 4 == 1) ? static_cast<i64>(q) : -static_cast<i64>(q);
    }
    i64 D = (((d % 4) + 4) % 4 == 1) ? d : 4 * d;
    i64 two = D / star;  // 1, -4, 8 or -8
    using detail::Angle;
    if (two == -4) chi = chi * DirichletChar::local(2, {}, Angle::make(1, 2));
    else if (two == 8) chi = chi * DirichletChar::local(2, Angle::make(1, 2));
    else if (two == -8) chi = chi * DirichletChar::local(2, Angle::make(1, 2), Angle::make(1, 2));
    else if (two != 1) throw InternalError("bad 2-part of a quadratic discriminant");
    return AbelianFieldSpec({DirichletChar::trivial(), chi}, "Qsqrt:" + std::to_string(d));
}

// Generators given as [{"modulus": M, "angles": ["a/b", ...]}], one angle per generator of
// (Z/M)^x in the order: for each prime power l^e || M ascending, g_l (odd l) or -1, 5 (l = 2).
inline AbelianFieldSpec field_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw UsageError("field JSON must be an array of generator objects");
    std::vector<DirichletChar> gens;
    for (auto& g : j) {
        if (!g.contains("modulus") || !g.contains("angles")) throw UsageError("generator needs 'modulus' and 'angles'");
        u64 M = g["modulus"].get<u64>();
        std::vector<std::string> angles;
        for (auto& a : g["angles"]) angles.push_back(a.is_string() ? a.get<std::string>() : std::to_string(a.get<i64>()));
        std::size_t idx = 0;
        auto next = [&]() -> detail::Angle {
            if (idx >= angles.size()) throw UsageError("too few angles for modulus " + std::to_string(M));
            BigRational q = parse_rational(angles[idx++]);
            if (!q.get_den().fits_ulong_p() || !q.get_num().fits_slong_p()) throw UsageError("angle out of range");
            return detail::Angle::make(q.get_num().get_si(), q.get_den().get_ui());
        };
        DirichletChar c;
        for (auto [l, e] : factor(M)) {
            if (l == 2) {
                if (e == 1) continue;
                detail::Angle s = next();
                detail::Angle a = e >= 3 ? next() : detail::Angle{};
                if (s.times(2) != detail::Angle{} || a.times(static_cast<i64>(ipow(2, e - 2))) != detail::Angle{})
                    throw UsageError("angle order exceeds the generator order mod " + std::to_string(M));
                c = c * DirichletChar::local(2, a, s);
            } else {
                detail::Angle a = next();
                if (a.times(static_cast<i64>(ipow(l, e - 1) * (l - 1))) != detail::Angle{})
                    throw UsageError("angle order exceeds the generator order mod " + std::to_string(M));
                c = c * DirichletChar::local(l, a);
            }
        }
        if (idx != angles.size()) throw UsageError("too many angles for modulus " + std::to_string(M));
        gens.push_back(c);
    }
    return AbelianFieldSpec::generated_by(gens, "json:" + j.dump());
}

// "Qzeta:m", "Qsqrt:d", "Q", or a JSON generator list.
inline AbelianFieldSpec parse_field(const std::string& text) {
    auto num_after = [&](std::size_t pos) -> i64 {
        try {
            std::size_t used = 0;
            i64 v = std::stoll(text.substr(pos), &used);
            if (used != text.size() - pos) throw UsageError("");
            return v;
        } catch (...) {
            throw UsageError("cannot parse field spec '" + text + "'");
        }
    };
    if (text == "Q") return AbelianFieldSpec();
    if (text.rfind("Qzeta:", 0) == 0) {
        i64 m = num_after(6);
        if (m <= 0) throw UsageError("Qzeta: m must be positive");
        return cyclotomic_field(static_cast<u64>(m));
    }
    if (text.rfind("Qsqrt:", 0) == 0) return quadratic_field(num_after(6));
    if (!text.empty() && text[0] == '[') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const std::exception& e) {
            throw UsageError(std::string("bad field JSON: ") + e.what());
        }
        return field_from_json(j);
    }
    throw UsageError("unknown field spec '" + text + "' (expected Qzeta:m, Qsqrt:d or JSON)");
}

// Cyclotomic Z_p-extension k = k_0 ⊂ k_1 ⊂ ... of an abelian field.
struct TowerSpec {
    AbelianFieldSpec base;
    u64 p = 3;
    int delta = 0;

    TowerSpec() = default;
    TowerSpec(AbelianFieldSpec k, u64 p_) : base(std::move(k)), p(p_), delta(p_ == 2 ? 1 : 0) {
        if (!is_prime(p)) throw UsageError("p must be prime");
        u64 f = base.conductor();
        if (p == 2 ? f % 8 == 0 : f % (p * p) == 0)
            throw UsageError("conductor of the base field is divisible by " + std::string(p == 2 ? "8" : "p^2") +
                             "; the tower must start below the first p-layer");
    }

    void require_imaginary() const {
        if (!base.is_imaginary()) throw UsageError("base field " + base.name() + " is totally real; a CM base is required");
    }

    // mu_{2p} ⊆ k
    bool contains_mu_2p() const {
        for (auto& g : generators_mod(2 * p))
            if (!base.contains(g)) return false;
        return true;
    }
};

// Characters of k_n: X * <psi_n>.
inline std::vector<DirichletChar> layer_characters(const TowerSpec& T, unsigned n) {
    DirichletChar psi = tower_generator(T.p, n);
    u64 pn = ipow(T.p, n);
    std::vector<DirichletChar> out;
    out.reserve(T.base.degree() * pn);
    DirichletChar cur;
    for (u64 j = 0; j < pn; ++j) {
        for (auto& x : T.base.characters()) out.push_back(x * cur);
        cur = cur * psi;
    }
    std::sort(out.begin(), out.end());
    require(std::adjacent_find(out.begin(), out.end()) == out.end(), "tower layers are not linearly disjoint");
    return out;
}

inline AbelianFieldSpec layer_field(const TowerSpec& T, unsigned n) {
    return AbelianFieldSpec(layer_characters(T, n), T.base.name() + "_" + std::to_string(n) + "@p=" + std::to_string(T.p));
}

// Number of roots of unity in a field: the largest M with the characters of Q(mu_M) inside X.
inline u64 roots_of_unity_count(const AbelianFieldSpec& F) {
    u64 best = 1;
    for (u64 M : divisors(2 * F.conductor())) {
        bool ok = true;
        for (auto& g : generators_mod(M))
            if (!F.contains(g)) {
                ok = false;
                break;
            }
        if (ok) best = lcm_u(best, M);
    }
    return best % 2 ? 2 * best : best;
}

inline u64 roots_of_unity_count(const TowerSpec& T, unsigned n) {
    T.require_imaginary();
    return roots_of_unity_count(layer_field(T, n));
}

// w_2(F): the largest N such that Gal(F(mu_N)/F) has exponent dividing 2, i.e. phi^2 restricted
// to F ∩ Q(mu_N) is trivial for every character phi mod N.
inline u64 w2(const AbelianFieldSpec& F) {
    if (!F.is_totally_real()) throw UsageError("w2 requires a totally real field");
    u64 f = F.conductor();
    std::vector<std::pair<u64, unsigned>> space;
    for (auto [l, e] : factor(6 * f)) {
        unsigned v = 0;
        for (u64 x = f; x % l == 0; x /= l) ++v;
        space.emplace_back(l, v + 3);
    }
    auto ok = [&](u64 N) {
        for (auto& g : generators_mod(N)) {
            DirichletChar sq = g * g;
            if (N % sq.conductor() || !F.contains(sq)) return false;
        }
        return true;
    };
    u64 best = 1;
    std::vector<u64> cand{1};
    for (auto [l, e] : space) {
        std::vector<u64> nxt;
        for (u64 c : cand) {
            u64 q = 1;
            for (unsigned i = 0; i <= e; ++i, q *= l) nxt.push_back(c * q);
        }
        cand.swap(nxt);
    }
    for (u64 N : cand)
        if (ok(N)) best = lcm_u(best, N);
    require(ok(best), "w2: admissible moduli not closed under lcm");
    return best;
}

struct EulerData {
    u64 p = 0;
    u64 ramification = 1;   // e
    u64 residue_degree = 1; // f
    u64 primes = 1;         // g
    BigRational factor;     // prod over primes above p of (1 - 1/N(P))
};

inline EulerData euler_data_at_p(const AbelianFieldSpec& F, u64 p) {
    EulerData d;
    d.p = p;
    u64 x0 = 0, f = 1;
    for (auto& c : F.characters()) {
        if (c.conductor() % p == 0) continue;
        ++x0;
        u64 k = *c.exponent_at(static_cast<i64>(p));
        f = lcm_u(f, c.order() / gcd_u(k, c.order()));
    }
    d.ramification = F.degree() / x0;
    d.residue_degree = f;
    d.primes = x0 / f;
    BigRational one_minus = 1 - BigRational(1, big_pow(p, f));
    BigRational r = 1;
    for (u64 i = 0; i < d.primes; ++i) r *= one_minus;
    d.factor = r;
    return d;
}

}  // namespace ptower
