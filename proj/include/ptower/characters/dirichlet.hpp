#pragma once
// Primitive Dirichlet characters stored as angles (elements of Q/Z) on fixed generators of
// the local unit groups: the smallest primitive root g_l mod l^2 for odd l, and -1, 5 for l = 2.
// Adding angles multiplies characters; the conductor is read off the angle denominators,
// so every stored character is automatically primitive.

#include <bit>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <tuple>

#include "../arith/cyclo.hpp"

namespace ptower {

namespace detail {

struct Angle {
    u64 num = 0, den = 1;  // num/den in [0,1), reduced

    static Angle make(i64 n, u64 d) {
        i64 r = n % static_cast<i64>(d);
        if (r < 0) r += static_cast<i64>(d);
        u64 g = gcd_u(static_cast<u64>(r), d);
        if (r == 0) return {0, 1};
        return {static_cast<u64>(r) / g, d / g};
    }
    bool zero() const { return num == 0; }
    friend Angle operator+(Angle a, Angle b) {
        u64 d = lcm_u(a.den, b.den);
        return make(static_cast<i64>(a.num * (d / a.den) + b.num * (d / b.den)), d);
    }
    Angle neg() const { return make(-static_cast<i64>(num), den); }
    Angle times(i64 k) const {
        __int128 r = static_cast<__int128>(num) * k % static_cast<__int128>(den);
        if (r < 0) r += den;
        return make(static_cast<i64>(r), den);
    }
    friend bool operator==(Angle a, Angle b) { return a.num == b.num && a.den == b.den; }
    friend auto operator<=>(Angle a, Angle b) { return std::pair(a.den, a.num) <=> std::pair(b.den, b.num); }
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

// Discrete logarithm tables mod l^c. Odd l: log to base g_l. l = 2: index e*2^{c-2} + f for
// a = (-1)^e 5^f (c >= 2). Entry UINT32_MAX marks non-units.
inline std::shared_ptr<const std::vector<std::uint32_t>> dlog_table(u64 l, unsigned c) {
    static std::mutex mu;
    static std::map<std::pair<u64, unsigned>, std::shared_ptr<const std::vector<std::uint32_t>>> cache;
    {
        std::lock_guard<std::mutex> g(mu);
        auto it = cache.find({l, c});
        if (it != cache.end()) return it->second;
    }
    u64 M = ipow(l, c);
    if (M > (u64(1) << 26)) throw ResourceError("character conductor too large for discrete-log tables");
    auto t = std::make_shared<std::vector<std::uint32_t>>(M, UINT32_MAX);
    if (l == 2) {
        u64 h = c >= 2 ? M / 4 : 1;
        for (u64 e = 0; e < 2; ++e) {
            u64 x = e ? M - 1 : 1;
            for (u64 f = 0; f < h; ++f) {
                (*t)[x % M] = static_cast<std::uint32_t>(e * h + f);
                x = x * 5 % M;
            }
        }
        if (c <= 1) (*t)[1 % M] = 0;
    } else {
        u64 g = primitive_root_l2(l), x = 1;
        u64 ph = M / l * (l - 1);
        for (u64 k = 0; k < ph; ++k) {
            (*t)[x] = static_cast<std::uint32_t>(k);
            x = mulmod(x, g, M);
        }
    }
    std::lock_guard<std::mutex> g(mu);
    return cache.emplace(std::pair(l, c), std::move(t)).first->second;
}

}  // namespace detail

class DirichletChar {
public:
    // Local data at one prime: angle on g_l (odd l) or on 5 (l = 2); sign = angle on -1 (l = 2).
    struct Part {
        u64 l = 0;
        detail::Angle a;
        detail::Angle sign;  // only for l = 2, den 1 or 2
        unsigned exponent() const {
            if (l == 2) {
                if (!a.zero()) return 2 + static_cast<unsigned>(std::countr_zero(a.den));
                return sign.zero() ? 0 : 2;
            }
            if (a.zero()) return 0;
            u64 d = a.den;
            unsigned j = 0;
            while (d % l == 0) d /= l, ++j;
            return 1 + j;
        }
        friend bool operator==(const Part&, const Part&) = default;
    };

    DirichletChar() = default;

    static DirichletChar trivial() { return DirichletChar(); }

    // Character mod l^c with angle x on g_l (odd l) or (sign, x on 5) for l = 2.
    static DirichletChar local(u64 l, detail::Angle x, detail::Angle sign = {}) {
        DirichletChar c;
        Part pt{l, x, l == 2 ? sign : detail::Angle{}};
        if (l != 2) {
            u64 d = x.den;
            while (d % l == 0) d /= l;
            if ((l - 1) % d != 0) throw UsageError("angle denominator incompatible with the unit group mod " + std::to_string(l) + "^k");
        } else {
            if (x.den & (x.den - 1)) throw UsageError("angle on 5 must have 2-power denominator");
            if (sign.den > 2) throw UsageError("angle on -1 must be 0 or 1/2");
        }
        if (!pt.a.zero() || !pt.sign.zero()) c.parts_.push_back(pt);
        c.finish();
        return c;
    }

    u64 conductor() const { return cond_; }
    u64 order() const { return order_; }
    bool is_trivial() const { return parts_.empty(); }
    const std::vector<Part>& parts() const { return parts_; }

    // chi(-1) = (-1)^{parity}
    bool is_odd() const {
        detail::Angle s;
        for (auto& pt : parts_) {
            if (pt.l == 2) s = s + pt.sign;
            else if (!pt.a.zero()) {
                u64 phi = ipow(pt.l, pt.exponent() - 1) * (pt.l - 1);  // log(-1) = phi/2
                s = s + detail::Angle::make(static_cast<i64>(pt.a.num * (phi / pt.a.den) % 2), 2);
            }
        }
        return !s.zero();
    }
    bool is_even() const { return !is_odd(); }

    friend DirichletChar operator*(const DirichletChar& x, const DirichletChar& y) {
        std::map<u64, Part> m;
        for (auto& pt : x.parts_) m[pt.l] = pt;
        for (auto& pt : y.parts_) {
            auto [it, fresh] = m.try_emplace(pt.l, pt);
            if (!fresh) {
                it->second.a = it->second.a + pt.a;
                it->second.sign = it->second.sign + pt.sign;
            }
        }
        DirichletChar r;
        for (auto& [l, pt] : m)
            if (!pt.a.zero() || !pt.sign.zero()) r.parts_.push_back(pt);
        r.finish();
        return r;
    }

    DirichletChar pow(i64 k) const {
        DirichletChar r;
        for (auto pt : parts_) {
            pt.a = pt.a.times(k);
            pt.sign = pt.sign.times(k);
            if (!pt.a.zero() || !pt.sign.zero()) r.parts_.push_back(pt);
        }
        r.finish();
        return r;
    }
    DirichletChar inverse() const { return pow(-1); }

    // chi(a) = zeta_order^k; nullopt when gcd(a, f) > 1.
    std::optional<u64> exponent_at(i64 a) const {
        u64 m = order_;
        u64 k = 0;
        for (auto& pt : parts_) {
            unsigned c = pt.exponent();
            u64 M = ipow(pt.l, c);
            u64 r = static_cast<u64>(((a % static_cast<i64>(M)) + static_cast<i64>(M)) % static_cast<i64>(M));
            auto tab = detail::dlog_table(pt.l, c);
            std::uint32_t lg = (*tab)[r];
            if (lg == UINT32_MAX) return std::nullopt;
            if (pt.l == 2) {
                u64 h = M / 4;
                u64 e = lg / h, f = lg % h;
                k += (pt.a.num * f % pt.a.den) * (m / pt.a.den);
                k += (pt.sign.num * e % pt.sign.den) * (m / pt.sign.den);
            } else {
                k += static_cast<u64>((u128)pt.a.num * lg % pt.a.den) * (m / pt.a.den);
            }
            k %= m;
        }
        return k;
    }

    // chi(a) in Q(mu_order) (0 when gcd(a, f) > 1).
    CycloElem eval(i64 a) const { return eval_in(a, order_); }

    // chi(a) in Q(mu_M), order | M.
    CycloElem eval_in(i64 a, u64 M) const {
        if (M % order_) throw UsageError("eval_in: field does not contain the character values");
        auto k = exponent_at(a);
        if (!k) return CycloElem(M);
        return CycloElem::root_of_unity(M, *k * (M / order_));
    }

    // Canonical label, e.g. "12:2^2:1/2,0/1;3^1:1/2".
    std::string label() const {
        std::string s = std::to_string(cond_) + ":";
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            auto& pt = parts_[i];
            if (i) s += ";";
            s += std::to_string(pt.l) + "^" + std::to_string(pt.exponent()) + ":";
            if (pt.l == 2) s += pt.sign.str() + "," + pt.a.str();
            else s += pt.a.str();
        }
        return s;
    }

    static DirichletChar from_label(const std::string& s) {
        auto bad = [&] { return UsageError("bad character label '" + s + "'"); };
        auto colon = s.find(':');
        if (colon == std::string::npos) throw bad();
        auto angle = [&](const std::string& t) {
            auto sl = t.find('/');
            if (sl == std::string::npos) throw bad();
            return detail::Angle::make(std::stoll(t.substr(0, sl)), std::stoull(t.substr(sl + 1)));
        };
        DirichletChar c;
        std::string rest = s.substr(colon + 1);
        try {
            std::size_t pos = 0;
            while (pos < rest.size()) {
                std::size_t end = rest.find(';', pos);
                if (end == std::string::npos) end = rest.size();
                std::string part = rest.substr(pos, end - pos);
                auto hat = part.find('^'), c2 = part.find(':');
                if (hat == std::string::npos || c2 == std::string::npos) throw bad();
                u64 l = std::stoull(part.substr(0, hat));
                std::string data = part.substr(c2 + 1);
                if (l == 2) {
                    auto comma = data.find(',');
                    if (comma == std::string::npos) throw bad();
                    c = c * local(2, angle(data.substr(comma + 1)), angle(data.substr(0, comma)));
                } else {
                    c = c * local(l, angle(data));
                }
                pos = end + 1;
            }
        } catch (const std::logic_error&) {
            throw bad();
        }
        if (c.label() != s) throw bad();
        return c;
    }

    friend bool operator==(const DirichletChar& x, const DirichletChar& y) { return x.parts_ == y.parts_; }
    friend bool operator<(const DirichletChar& x, const DirichletChar& y) {
        if (x.cond_ != y.cond_) return x.cond_ < y.cond_;
        if (x.order_ != y.order_) return x.order_ < y.order_;
        return std::lexicographical_compare(x.parts_.begin(), x.parts_.end(), y.parts_.begin(), y.parts_.end(),
                                            [](const Part& a, const Part& b) {
                                                return std::tie(a.l, a.a, a.sign) < std::tie(b.l, b.a, b.sign);
                                            });
    }

private:
    void finish() {
        cond_ = 1;
        order_ = 1;
        for (auto& pt : parts_) {
            cond_ *= ipow(pt.l, pt.exponent());
            order_ = lcm_u(order_, lcm_u(pt.a.den, pt.sign.den));
        }
    }

    std::vector<Part> parts_;  // sorted by prime, nontrivial only
    u64 cond_ = 1;
    u64 order_ = 1;
};

// Teichmuller character: angle 1/(p-1) on g_p, or the character mod 4 for p = 2.
inline DirichletChar teichmuller_char(u64 p) {
    if (p == 2) return DirichletChar::local(2, {}, detail::Angle::make(1, 2));
    return DirichletChar::local(p, detail::Angle::make(1, p - 1));
}

// Generator of the characters of the n-th layer of the cyclotomic Z_p-extension of Q:
// order p^n, conductor p^{n+1} (p odd) or 2^{n+2}.
inline DirichletChar tower_generator(u64 p, unsigned n) {
    if (n == 0) return DirichletChar::trivial();
    return DirichletChar::local(p, detail::Angle::make(1, ipow(p, n)));
}

// Generators of the full character group mod M.
inline std::vector<DirichletChar> generators_mod(u64 M) {
    std::vector<DirichletChar> g;
    for (auto [l, e] : factor(M)) {
        if (l == 2) {
            if (e >= 2) g.push_back(DirichletChar::local(2, {}, detail::Angle::make(1, 2)));
            if (e >= 3) g.push_back(DirichletChar::local(2, detail::Angle::make(1, ipow(2, e - 2))));
        } else {
            g.push_back(DirichletChar::local(l, detail::Angle::make(1, ipow(l, e - 1) * (l - 1))));
        }
    }
    return g;
}

// Frobenius orbit at p: the prime-to-p-order part is raised to powers of p.
inline std::vector<DirichletChar> galois_orbit_p(const DirichletChar& chi, u64 p) {
    u64 m = chi.order(), pa = 1;
    while (m % p == 0) m /= p, pa *= p;
    // CRT idempotents for Z/(m * pa)
    u64 M = m * pa;
    u64 e1 = 0;
    for (u64 x = 0; x < M; x += pa)
        if (x % m == 1 % m) {
            e1 = x;
            break;
        }
    u64 e2 = (M + 1 - e1) % M;
    DirichletChar prime_to = chi.pow(static_cast<i64>(e1)), ppart = chi.pow(static_cast<i64>(e2));
    u64 d = mult_order(p % m, m);
    std::vector<DirichletChar> orbit;
    DirichletChar cur = prime_to;
    for (u64 i = 0; i < d; ++i) {
        orbit.push_back(cur * ppart);
        cur = cur.pow(static_cast<i64>(p));
    }
    return orbit;
}

inline u64 residue_degree(const DirichletChar& chi, u64 p) {
    u64 m = chi.order();
    while (m % p == 0) m /= p;
    return mult_order(p % m, m);
}

// Orbit under the decomposition group at p: a == p^i on the prime-to-p part of the order,
// arbitrary unit on the p-power part. Products over it descend to Q_p. Coincides with
// galois_orbit_p unless the p-power-order part of chi has order > 2.
inline std::vector<DirichletChar> decomposition_orbit(const DirichletChar& chi, u64 p) {
    u64 m = chi.order(), mp = m;
    while (mp % p == 0) mp /= p;
    std::vector<bool> frob(mp, false);
    for (u64 x = 1 % mp, i = 0; i <= mp; ++i, x = mulmod(x, p % mp, mp)) frob[x] = true;
    std::vector<DirichletChar> orbit;
    for (u64 a = 1; a <= m; ++a)
        if (gcd_u(a, m) == 1 && frob[a % mp]) orbit.push_back(chi.pow(static_cast<i64>(a)));
    std::sort(orbit.begin(), orbit.end());
    orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
    return orbit;
}

// Orbit under Gal(Qbar/Q): all chi^a, gcd(a, order) = 1.
inline std::vector<DirichletChar> rational_orbit(const DirichletChar& chi) {
    u64 m = chi.order();
    std::vector<DirichletChar> orbit;
    for (u64 a = 1; a <= m; ++a)
        if (gcd_u(a, m) == 1) orbit.push_back(chi.pow(static_cast<i64>(a)));
    std::sort(orbit.begin(), orbit.end());
    orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
    return orbit;
}

// Partition a character set into orbits; each orbit is sorted, orbits ordered by their minimum.
template <class OrbitFn>
std::vector<std::vector<DirichletChar>> partition_orbits(std::vector<DirichletChar> xs, OrbitFn&& orbit_of) {
    std::sort(xs.begin(), xs.end());
    std::set<DirichletChar> done;
    std::vector<std::vector<DirichletChar>> out;
    for (auto& x : xs) {
        if (done.count(x)) continue;
        auto o = orbit_of(x);
        for (auto& y : o) done.insert(y);
        out.push_back(std::move(o));
    }
    return out;
}

}  // namespace ptower
