#pragma once
// Local rings W(F_{p^D})[mu_{p^k}] / p^N and the Teichmuller-normalised embedding of
// Q(mu_m) into them. The embedding sends the value e^{2 pi i/(p-1)} of the Teichmuller
// character at the fixed primitive root g_p to the Teichmuller lift of g_p, so that
// omega(a) == a mod p holds for the image. Galois-stable products (over Gal(Qbar_p/Q_p))
// land in Z_p / p^N independently of every other choice.

#include <memory>

#include "cyclo_mod.hpp"
#include "padic.hpp"

namespace ptower {

namespace detail {

// --- F_p[y] helpers for finding an irreducible modulus ---
using FpPoly = std::vector<u64>;

inline void fp_trim(FpPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline FpPoly fp_mod(FpPoly a, const FpPoly& g, u64 p) {
    fp_trim(a);
    std::size_t dg = g.size() - 1;
    u64 inv_lead = powmod(g.back(), p - 2, p);
    while (a.size() > dg) {
        u64 c = mulmod(a.back(), inv_lead, p);
        std::size_t s = a.size() - 1 - dg;
        for (std::size_t i = 0; i <= dg; ++i) a[s + i] = (a[s + i] + p - mulmod(c, g[i], p)) % p;
        fp_trim(a);
    }
    return a;
}

inline FpPoly fp_mulmod(const FpPoly& a, const FpPoly& b, const FpPoly& g, u64 p) {
    if (a.empty() || b.empty()) return {};
    FpPoly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
    return fp_mod(r, g, p);
}

inline FpPoly fp_pow(FpPoly b, u64 e, const FpPoly& g, u64 p) {
    FpPoly r{1};
    while (e) {
        if (e & 1) r = fp_mulmod(r, b, g, p);
        b = fp_mulmod(b, b, g, p);
        e >>= 1;
    }
    return r;
}

inline FpPoly fp_gcd(FpPoly a, FpPoly b, u64 p) {
    fp_trim(a);
    fp_trim(b);
    while (!b.empty()) {
        FpPoly r = fp_mod(a, b, p);
        a = b;
        b = r;
    }
    return a;
}

// Rabin's test.
inline bool fp_irreducible(const FpPoly& g, u64 p) {
    std::size_t D = g.size() - 1;
    auto frob_iter = [&](std::size_t i) {
        FpPoly x{0, 1};
        for (std::size_t k = 0; k < i; ++k) x = fp_pow(x, p, g, p);
        return x;
    };
    FpPoly xD = frob_iter(D);
    FpPoly x = fp_mod({0, 1}, g, p);
    if (xD != x) return false;
    for (auto [q, e] : factor(D)) {
        FpPoly h = frob_iter(D / q);
        h.resize(std::max<std::size_t>(h.size(), 2), 0);
        h[1] = (h[1] + p - 1) % p;
        fp_trim(h);
        if (fp_gcd(g, h, p).size() != 1) return false;
    }
    return true;
}

inline FpPoly first_irreducible(u64 p, unsigned D) {
    if (D == 1) return {0, 1};
    // monic, lexicographic search over lower coefficients
    std::vector<u64> low(D, 0);
    for (;;) {
        FpPoly g(low);
        g.push_back(1);
        if (g[0] != 0 && fp_irreducible(g, p)) return g;
        std::size_t i = 0;
        while (i < D && ++low[i] == p) low[i++] = 0;
        if (i == D) throw InternalError("no irreducible polynomial found");
    }
}

}  // namespace detail

// W(F_{p^D}) / p^N as (Z/p^N)[y]/G(y), with a fixed primitive m'-th root of unity t.
class GaloisRing {
public:
    using Elem = std::vector<u64>;

    GaloisRing(u64 p, int N, u64 mprime) : w_(p, N) {
        if (mprime % p == 0) throw InternalError("Galois ring root order must be prime to p");
        mprime_ = lcm_u(mprime, p - 1 == 0 ? 1 : p - 1);
        D_ = static_cast<unsigned>(mult_order(p % mprime_, mprime_));
        if (mprime_ == 1) D_ = 1;
        if (D_ > 64) throw ResourceError("residue degree too large for the local ring");
        auto g = detail::first_irreducible(p, D_);
        G_.assign(g.begin(), g.end());
        build_root();
    }

    const ModWord& word() const { return w_; }
    unsigned degree() const { return D_; }
    u64 root_order() const { return mprime_; }
    const Elem& root_power(u64 i) const { return tpow_[i % mprime_]; }

    Elem zero() const { return Elem(D_, 0); }
    Elem one() const {
        Elem e(D_, 0);
        e[0] = 1 % w_.q;
        return e;
    }

    Elem mul(const Elem& a, const Elem& b) const { return mul_w(a, b, w_); }

    void add_to(Elem& a, const Elem& b) const {
        for (unsigned i = 0; i < D_; ++i) a[i] = w_.add(a[i], b[i]);
    }

private:
    Elem mul_w(const Elem& a, const Elem& b, const ModWord& w) const {
        if (D_ == 1) return {w.mul(a[0], b[0])};
        std::vector<u64> acc(2 * D_ - 1, 0);
        for (unsigned i = 0; i < D_; ++i) {
            if (!a[i]) continue;
            for (unsigned j = 0; j < D_; ++j) acc[i + j] = w.add(acc[i + j], w.mul(a[i], b[j]));
        }
        for (std::size_t k = acc.size(); k-- > D_;) {
            u64 c = acc[k];
            if (!c) continue;
            acc[k] = 0;
            for (unsigned i = 0; i < D_; ++i) acc[k - D_ + i] = w.sub(acc[k - D_ + i], w.mul(c, G_[i] % w.q));
        }
        acc.resize(D_);
        return acc;
    }

    Elem pow_w(Elem b, const BigInt& e, const ModWord& w) const {
        Elem r(D_, 0);
        r[0] = 1 % w.q;
        std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
        for (std::size_t i = bits; i-- > 0;) {
            r = mul_w(r, r, w);
            if (mpz_tstbit(e.get_mpz_t(), i)) r = mul_w(r, b, w);
        }
        return r;
    }

    static bool is_one(const Elem& a) {
        if (a[0] != 1) return false;
        for (std::size_t i = 1; i < a.size(); ++i)
            if (a[i]) return false;
        return true;
    }

    void build_root() {
        u64 p = w_.p;
        ModWord w1(p, 1);
        BigInt order = big_pow(p, D_) - 1;
        BigInt cof = order / BigInt(static_cast<unsigned long>(mprime_));
        auto qs = factor(mprime_);
        Elem s;
        bool found = false;
        // enumerate candidate elements r (nonzero polynomials of degree < D)
        std::vector<u64> r(D_, 0);
        while (!found) {
            std::size_t i = 0;
            while (i < D_ && ++r[i] == p) r[i++] = 0;
            if (i == D_) throw InternalError("no root of unity of the requested order");
            Elem c = pow_w(r, cof, w1);
            bool ok = true;
            for (auto [q, e] : qs)
                if (is_one(pow_w(c, BigInt(static_cast<unsigned long>(mprime_ / q)), w1))) ok = false;
            if (ok && mprime_ > 1) s = c, found = true;
            if (mprime_ == 1) s = one_w(w1), found = true;
        }
        // Teichmuller lift: iterate x -> x^{p^D}
        Elem T = s;
        BigInt pD = big_pow(p, D_);
        for (int k = 0; k <= w_.N; ++k) T = pow_w(T, pD, w_);
        // align with omega: (t^j)^{m'/(p-1)} == g_p mod p
        u64 j = 1;
        if (p > 2) {
            u64 gp = primitive_root_l2(p) % p;
            Elem base = pow_w(T, BigInt(static_cast<unsigned long>(mprime_ / (p - 1))), w1);
            require(std::all_of(base.begin() + 1, base.end(), [](u64 x) { return x == 0; }),
                    "Teichmuller power not in F_p");
            u64 c = base[0] % p;
            u64 j0 = 0;
            for (u64 e = 0, v = 1; e < p - 1; ++e, v = v * c % p)
                if (v == gp) j0 = e;
            for (j = j0; gcd_u(j, mprime_) != 1; j += p - 1) {
            }
        }
        Elem t = pow_w(T, BigInt(static_cast<unsigned long>(j)), w_);
        tpow_.assign(mprime_, Elem());
        tpow_[0] = one();
        for (u64 i = 1; i < mprime_; ++i) tpow_[i] = mul(tpow_[i - 1], t);
        require(is_one(mul(tpow_[mprime_ - 1], t)), "root of unity has wrong order");
    }

    Elem one_w(const ModWord& w) const {
        Elem e(D_, 0);
        e[0] = 1 % w.q;
        return e;
    }

    ModWord w_;
    u64 mprime_ = 1;
    unsigned D_ = 1;
    std::vector<u64> G_;
    std::vector<Elem> tpow_;
};

// GR[z]/Phi_{p^k}(z); element layout: coefficient of z^i occupies [i*D, (i+1)*D).
class LocalRing {
public:
    LocalRing(u64 p, int N, u64 mprime, unsigned k)
        : gr_(std::make_shared<GaloisRing>(p, N, mprime)), k_(k) {
        pk_ = ipow(p, k);
        n_ = k == 0 ? 1 : static_cast<std::size_t>(pk_ / p * (p - 1));
        D_ = gr_->degree();
    }

    using Elem = std::vector<u64>;

    u64 prime() const { return gr_->word().p; }
    int precision() const { return gr_->word().N; }
    const ModWord& word() const { return gr_->word(); }
    const GaloisRing& galois_ring() const { return *gr_; }
    unsigned p_exponent() const { return k_; }
    std::size_t size() const { return n_ * D_; }

    Elem zero() const { return Elem(n_ * D_, 0); }
    Elem one() const {
        Elem e = zero();
        e[0] = 1 % word().q;
        return e;
    }
    Elem from_int(i64 a) const {
        Elem e = zero();
        e[0] = word().from_i64(a);
        return e;
    }

    // Image of zeta_m^j, m = m' p^{k'} with m' | root_order and k' <= k.
    Elem root_image(u64 m, u64 j) const {
        Elem e = zero();
        add_root_image(e, m, j, 1);
        return e;
    }

    // e += c * image(zeta_m^j)
    void add_root_image(Elem& e, u64 m, u64 j, u64 c) const {
        if (!c) return;
        RootMap rm = root_map(m);
        j %= m;
        u64 ti = (u128)(rm.alpha * (j % rm.mp)) % rm.mp * (gr_->root_order() / rm.mp);
        u64 zi = (u128)(rm.beta * (j % rm.pkp)) % rm.pkp * (pk_ / rm.pkp);
        add_scaled_z(e, zi, gr_->root_power(ti), c);
    }

    Elem mul(const Elem& a, const Elem& b) const {
        const ModWord& w = word();
        if (D_ == 1) {
            std::vector<u64> acc(2 * n_ - 1, 0);
            for (std::size_t i = 0; i < n_; ++i) {
                if (!a[i]) continue;
                for (std::size_t j = 0; j < n_; ++j)
                    if (b[j]) acc[i + j] = w.add(acc[i + j], w.mul(a[i], b[j]));
            }
            reduce_z(acc, 1);
            return acc;
        }
        std::vector<u64> acc((2 * n_ - 1) * D_, 0);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                Elem x(a.begin() + i * D_, a.begin() + (i + 1) * D_);
                Elem y(b.begin() + j * D_, b.begin() + (j + 1) * D_);
                Elem pr = gr_->mul(x, y);
                for (unsigned d = 0; d < D_; ++d) acc[(i + j) * D_ + d] = w.add(acc[(i + j) * D_ + d], pr[d]);
            }
        reduce_z(acc, D_);
        return acc;
    }

    Elem add(Elem a, const Elem& b) const {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = word().add(a[i], b[i]);
        return a;
    }
    Elem sub(Elem a, const Elem& b) const {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = word().sub(a[i], b[i]);
        return a;
    }
    Elem scale(Elem a, u64 c) const {
        for (auto& x : a) x = word().mul(x, c);
        return a;
    }

    // Lies in Z/p^N (all non-constant coordinates vanish)?
    bool descends(const Elem& a) const {
        for (std::size_t i = 1; i < a.size(); ++i)
            if (a[i]) return false;
        return true;
    }

    bool is_zero(const Elem& a) const {
        for (u64 x : a)
            if (x) return false;
        return true;
    }

    // Image of an exact element whose denominator is prime to p.
    Elem embed(const CycloElem& x) const {
        const ModWord& w = word();
        if (mpz_divisible_ui_p(x.denominator().get_mpz_t(), w.p))
            throw UsageError("embed: denominator divisible by p; scale first");
        Elem e = zero();
        for (std::size_t j = 0; j < x.numerators().size(); ++j)
            if (x.numerators()[j] != 0) add_root_image(e, x.order(), j, w.from_big(x.numerators()[j]));
        return scale(e, w.from_rational_unit(1, x.denominator()));
    }

    Elem embed(const CycloModElem& x) const {
        if (!(x.ring() == word())) throw UsageError("embed: modulus mismatch");
        Elem e = zero();
        for (std::size_t j = 0; j < x.coeffs().size(); ++j) add_root_image(e, x.order(), j, x.coeffs()[j]);
        return e;
    }

    bool can_host(u64 m) const {
        u64 pp = 1, mm = m, p = prime();
        unsigned kk = 0;
        while (mm % p == 0) mm /= p, pp *= p, ++kk;
        return kk <= k_ && gr_->root_order() % mm == 0;
    }

private:
    struct RootMap {
        u64 mp, pkp, alpha, beta;
    };

    RootMap root_map(u64 m) const {
        u64 p = prime();
        RootMap r{m, 1, 1, 0};
        while (r.mp % p == 0) r.mp /= p, r.pkp *= p;
        if (gr_->root_order() % r.mp != 0 || pk_ % r.pkp != 0)
            throw InternalError("root of unity of order " + std::to_string(m) + " not in the local ring");
        // 1/m = alpha/m' + beta/p^{k'} mod 1
        r.alpha = r.mp == 1 ? 0 : static_cast<u64>(inv_mod(BigInt(static_cast<unsigned long>(r.pkp % r.mp)),
                                                            BigInt(static_cast<unsigned long>(r.mp))).get_ui());
        r.beta = r.pkp == 1 ? 0 : static_cast<u64>(inv_mod(BigInt(static_cast<unsigned long>(r.mp % r.pkp)),
                                                            BigInt(static_cast<unsigned long>(r.pkp))).get_ui());
        return r;
    }

    // e += c * g * z^zi, zi < p^k
    void add_scaled_z(Elem& e, u64 zi, const GaloisRing::Elem& g, u64 c) const {
        const ModWord& w = word();
        auto put = [&](std::size_t pos, bool neg) {
            for (unsigned d = 0; d < D_; ++d) {
                u64 v = w.mul(g[d], c);
                e[pos * D_ + d] = neg ? w.sub(e[pos * D_ + d], v) : w.add(e[pos * D_ + d], v);
            }
        };
        if (zi < n_) {
            put(zi, false);
            return;
        }
        // z^{n} = -sum_{i<p-1} z^{i p^{k-1}}
        u64 p = prime(), step = pk_ / p;
        for (u64 i = 0; i + 1 < p; ++i) put(zi - n_ + i * step, true);
    }

    void reduce_z(std::vector<u64>& acc, unsigned D) const {
        const ModWord& w = word();
        u64 p = prime();
        if (k_ == 0) {
            acc.resize(D);
            return;
        }
        u64 step = pk_ / p;
        std::size_t len = acc.size() / D;
        for (std::size_t j = len; j-- > n_;) {
            for (unsigned d = 0; d < D; ++d) {
                u64 c = acc[j * D + d];
                if (!c) continue;
                acc[j * D + d] = 0;
                for (u64 i = 0; i + 1 < p; ++i) {
                    std::size_t pos = (j - n_ + i * step) * D + d;
                    acc[pos] = w.sub(acc[pos], c);
                }
            }
        }
        acc.resize(n_ * D);
    }

    std::shared_ptr<GaloisRing> gr_;
    unsigned k_;
    u64 pk_;
    std::size_t n_;
    unsigned D_;
};

// p^e * x with x in a local ring, or an exact zero.
struct ScaledLocal {
    LocalRing::Elem x;
    i64 e = 0;
    bool exact_zero = false;
};

inline ScaledLocal scaled_mul(const LocalRing& R, const ScaledLocal& a, const ScaledLocal& b) {
    if (a.exact_zero || b.exact_zero) return ScaledLocal{R.zero(), 0, true};
    return ScaledLocal{R.mul(a.x, b.x), a.e + b.e, false};
}

// Largest integer e with x / p^e integral in the power basis (content minus denominator).
inline i64 p_scale(const CycloElem& x, u64 p) {
    if (x.is_zero()) throw InternalError("p_scale of zero");
    int c = INT_MAX;
    for (auto& n : x.numerators())
        if (n != 0) c = std::min(c, vp(n, p));
    return c - vp(x.denominator(), p);
}

// Exact element: split off the p-power content so that the embedded part is p-primitive.
inline ScaledLocal scaled_embed(const LocalRing& R, const CycloElem& x) {
    if (x.is_zero()) return ScaledLocal{R.zero(), 0, true};
    u64 p = R.prime();
    i64 e = p_scale(x, p);
    BigInt d = x.denominator();
    int a = strip(d, p);
    BigInt cpow = big_pow(p, static_cast<unsigned long>(e + a));
    const ModWord& w = R.word();
    LocalRing::Elem v = R.zero();
    for (std::size_t j = 0; j < x.numerators().size(); ++j)
        if (x.numerators()[j] != 0) R.add_root_image(v, x.order(), j, w.from_big(x.numerators()[j] / cpow));
    return ScaledLocal{R.scale(v, w.from_rational_unit(1, d)), e, false};
}

// Descend to Z_p; throws RationalityError when the element is not Galois-stable.
inline PadicNumber scaled_to_padic(const LocalRing& R, const ScaledLocal& s) {
    if (s.exact_zero) return PadicNumber::zero(R.prime());
    if (!R.descends(s.x)) throw RationalityError("local product does not descend to Z_p (incomplete Galois orbit)");
    return PadicNumber::make(R.prime(), s.e, BigInt(static_cast<unsigned long>(s.x[0])), R.precision());
}

}  // namespace ptower
