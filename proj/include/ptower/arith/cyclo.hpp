#pragma once
// Q(mu_m) as Q[x]/Phi_m(x): exact cyclotomic arithmetic.

#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "common.hpp"

namespace ptower {

struct CyclotomicPoly {
    u64 m = 1;
    std::size_t deg = 1;                          // phi(m)
    std::vector<i64> coef;                        // dense, monic, length deg + 1
    std::vector<std::pair<std::size_t, i64>> low; // nonzero coef[i] for i < deg

    // Reduce v (any length >= deg) in place modulo Phi_m, leaving the first deg entries.
    template <class T, class Sub>
    void reduce(std::vector<T>& v, Sub&& submul) const {
        for (std::size_t j = v.size(); j-- > deg;) {
            if (is_zero_entry(v[j])) continue;
            T c = v[j];
            v[j] = T(0);
            for (auto [i, a] : low) submul(v[j - deg + i], c, a);
        }
        if (v.size() > deg) v.resize(deg);
        else v.resize(deg, T(0));
    }

private:
    template <class T>
    static bool is_zero_entry(const T& x) { return x == 0; }
};

namespace detail {

inline std::vector<i64> compute_cyclotomic(u64 m) {
    // Phi_m(x) = Phi_r(x^{m/r}), r = rad(m); Phi_r via the Moebius product.
    u64 r = 1;
    std::vector<u64> primes;
    for (auto [q, e] : factor(m)) r *= q, primes.push_back(q);
    std::vector<i64> num{1}, den{1};
    auto mul_xd_minus_1 = [](std::vector<i64>& a, u64 d) {
        std::vector<i64> out(a.size() + d, 0);
        for (std::size_t i = 0; i < a.size(); ++i) {
            out[i + d] += a[i];
            out[i] -= a[i];
        }
        a.swap(out);
    };
    std::size_t k = primes.size();
    for (u64 mask = 0; mask < (u64(1) << k); ++mask) {
        u64 sub = 1;
        int bits = 0;
        for (std::size_t i = 0; i < k; ++i)
            if (mask >> i & 1) sub *= primes[i], ++bits;
        u64 d = r / sub;  // mu(r/d) = (-1)^bits
        if (bits % 2 == 0) mul_xd_minus_1(num, d);
        else mul_xd_minus_1(den, d);
    }
    // exact division num / den
    std::size_t dn = den.size() - 1;
    std::vector<i64> q(num.size() - dn, 0);
    i64 lead = den.back();
    for (std::size_t j = num.size(); j-- > dn;) {
        i64 c = num[j] / lead;
        q[j - dn] = c;
        if (c)
            for (std::size_t i = 0; i <= dn; ++i) num[j - dn + i] -= c * den[i];
    }
    for (i64 x : num) require(x == 0, "cyclotomic division not exact");
    u64 s = m / r;
    std::vector<i64> out((q.size() - 1) * s + 1, 0);
    for (std::size_t i = 0; i < q.size(); ++i) out[i * s] = q[i];
    return out;
}

}  // namespace detail

inline std::shared_ptr<const CyclotomicPoly> cyclotomic(u64 m) {
    static std::mutex mu;
    static std::map<u64, std::shared_ptr<const CyclotomicPoly>> cache;
    if (m == 0) throw UsageError("cyclotomic order must be positive");
    {
        std::lock_guard<std::mutex> g(mu);
        auto it = cache.find(m);
        if (it != cache.end()) return it->second;
    }
    auto c = std::make_shared<CyclotomicPoly>();
    c->m = m;
    c->coef = detail::compute_cyclotomic(m);
    c->deg = c->coef.size() - 1;
    require(c->deg == euler_phi(m), "cyclotomic degree mismatch");
    for (std::size_t i = 0; i < c->deg; ++i)
        if (c->coef[i]) c->low.emplace_back(i, c->coef[i]);
    std::lock_guard<std::mutex> g(mu);
    return cache.emplace(m, std::move(c)).first->second;
}

// Element of Q(mu_m) stored as (integer numerators, common positive denominator) in the
// power basis 1, z, ..., z^{phi(m)-1}; gcd(content, den) = 1.
class CycloElem {
public:
    CycloElem() : CycloElem(1) {}
    explicit CycloElem(u64 m) : m_(m), phi_(cyclotomic(m)), num_(phi_->deg, 0), den_(1) {}

    static CycloElem from_rational(u64 m, const BigRational& q) {
        CycloElem r(m);
        r.num_[0] = q.get_num();
        r.den_ = q.get_den();
        return r;
    }

    static CycloElem root_of_unity(u64 m, u64 k) {
        std::vector<BigInt> acc(m, 0);
        acc[k % m] = 1;
        return from_powers(m, std::move(acc), 1);
    }

    // sum_j acc[j] z^j / den, with acc of any length (exponents taken as given).
    static CycloElem from_powers(u64 m, std::vector<BigInt> acc, const BigInt& den) {
        CycloElem r(m);
        if (acc.size() > m) {
            for (std::size_t j = m; j < acc.size(); ++j) acc[j % m] += acc[j];
            acc.resize(m);
        }
        r.phi_->reduce(acc, [](BigInt& t, const BigInt& c, i64 a) { t -= c * big(a); });
        r.num_ = std::move(acc);
        r.den_ = den;
        r.normalize();
        return r;
    }

    u64 order() const { return m_; }
    std::size_t degree() const { return phi_->deg; }
    const std::vector<BigInt>& numerators() const { return num_; }
    const BigInt& denominator() const { return den_; }

    BigRational coeff(std::size_t i) const {
        BigRational q(num_.at(i), den_);
        q.canonicalize();
        return q;
    }

    bool is_zero() const {
        for (auto& c : num_)
            if (c != 0) return false;
        return true;
    }

    bool is_rational() const {
        for (std::size_t i = 1; i < num_.size(); ++i)
            if (num_[i] != 0) return false;
        return true;
    }

    // Express in Q(mu_M), m | M.
    CycloElem lift(u64 M) const {
        if (M == m_) return *this;
        if (M % m_) throw UsageError("lift: target order not a multiple");
        u64 s = M / m_;
        std::vector<BigInt> acc(M, 0);
        for (std::size_t i = 0; i < num_.size(); ++i) acc[i * s] = num_[i];
        return from_powers(M, std::move(acc), den_);
    }

    // sigma_a : z -> z^a, gcd(a, m) = 1.
    CycloElem galois(u64 a) const {
        if (gcd_u(a % m_, m_) != 1 && m_ > 1) throw UsageError("galois: exponent not a unit");
        std::vector<BigInt> acc(m_, 0);
        for (std::size_t i = 0; i < num_.size(); ++i)
            if (num_[i] != 0) acc[(u128)i * a % m_] += num_[i];
        return from_powers(m_, std::move(acc), den_);
    }

    friend CycloElem operator+(const CycloElem& a, const CycloElem& b) { return a.addsub(b, 1); }
    friend CycloElem operator-(const CycloElem& a, const CycloElem& b) { return a.addsub(b, -1); }
    CycloElem operator-() const {
        CycloElem r = *this;
        for (auto& c : r.num_) c = -c;
        return r;
    }

    friend CycloElem operator*(const CycloElem& a, const CycloElem& b) {
        a.check(b);
        std::size_t n = a.num_.size();
        std::vector<BigInt> acc(2 * n - 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (a.num_[i] == 0) continue;
            for (std::size_t j = 0; j < n; ++j)
                if (b.num_[j] != 0) mpz_addmul(acc[i + j].get_mpz_t(), a.num_[i].get_mpz_t(), b.num_[j].get_mpz_t());
        }
        CycloElem r(a.m_);
        a.phi_->reduce(acc, [](BigInt& t, const BigInt& c, i64 x) { t -= c * big(x); });
        r.num_ = std::move(acc);
        r.den_ = a.den_ * b.den_;
        r.normalize();
        return r;
    }

    friend CycloElem operator*(const BigRational& q, const CycloElem& a) {
        CycloElem r = a;
        for (auto& c : r.num_) c *= q.get_num();
        r.den_ *= q.get_den();
        r.normalize();
        return r;
    }

    friend bool operator==(const CycloElem& a, const CycloElem& b) {
        return a.m_ == b.m_ && a.den_ == b.den_ && a.num_ == b.num_;
    }
    friend bool operator!=(const CycloElem& a, const CycloElem& b) { return !(a == b); }

    std::string str() const {
        std::ostringstream o;
        bool first = true;
        for (std::size_t i = 0; i < num_.size(); ++i) {
            if (num_[i] == 0) continue;
            if (!first) o << " + ";
            first = false;
            o << to_str(coeff(i));
            if (i) o << "*z" << m_ << "^" << i;
        }
        if (first) o << "0";
        return o.str();
    }

private:
    void check(const CycloElem& b) const {
        if (m_ != b.m_) throw UsageError("cyclotomic operands of different orders");
    }

    CycloElem addsub(const CycloElem& b, int sgn) const {
        check(b);
        CycloElem r(m_);
        for (std::size_t i = 0; i < num_.size(); ++i) {
            BigInt t = num_[i] * b.den_;
            if (sgn > 0) t += b.num_[i] * den_;
            else t -= b.num_[i] * den_;
            r.num_[i] = t;
        }
        r.den_ = den_ * b.den_;
        r.normalize();
        return r;
    }

    void normalize() {
        if (den_ < 0) {
            den_ = -den_;
            for (auto& c : num_) c = -c;
        }
        BigInt g = den_;
        for (auto& c : num_) {
            if (g == 1) break;
            if (c != 0) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
        }
        if (is_zero()) {
            den_ = 1;
            return;
        }
        if (g != 1) {
            for (auto& c : num_) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
            mpz_divexact(den_.get_mpz_t(), den_.get_mpz_t(), g.get_mpz_t());
        }
    }

    u64 m_;
    std::shared_ptr<const CyclotomicPoly> phi_;
    std::vector<BigInt> num_;
    BigInt den_;
};

inline BigRational reduce_to_rational(const CycloElem& a) {
    if (!a.is_rational()) throw RationalityError("element of Q(mu_" + std::to_string(a.order()) + ") is not rational");
    return a.coeff(0);
}

// Relative norm from Q(mu_m) down to Q(mu_{m/l}) for a prime l | m.
inline CycloElem relative_norm_step(const CycloElem& x, u64 l) {
    u64 m = x.order(), mp = m / l;
    CycloElem acc = x;
    bool square = mp % l == 0;
    // conjugates sigma_a with a == 1 mod m/l
    for (u64 a = 1 + mp; a < m; a += mp)
        if (gcd_u(a, m) == 1) acc = acc * x.galois(a);
    const auto& num = acc.numerators();
    std::vector<BigInt> out(mp, 0);
    if (square) {
        // Phi_m(z) = Phi_{m/l}(z^l): fixed elements are polynomials in z^l
        for (std::size_t i = 0; i < num.size(); ++i) {
            if (num[i] == 0) continue;
            if (i % l) throw InternalError("relative norm did not descend");
            out[i / l] = num[i];
        }
        return CycloElem::from_powers(mp, std::move(out), acc.denominator());
    }
    // Q(mu_m) = Q(mu_{m/l}) (x) Q(mu_l); z_m = z_{m/l}^alpha z_l^beta with alpha l == 1 mod m/l
    u64 alpha = mp == 1 ? 0 : static_cast<u64>(inv_mod(BigInt(static_cast<unsigned long>(l % mp)), BigInt(static_cast<unsigned long>(mp))).get_ui());
    u64 beta = static_cast<u64>(inv_mod(BigInt(static_cast<unsigned long>(mp % l)), BigInt(static_cast<unsigned long>(l))).get_ui());
    std::vector<std::vector<BigInt>> grid(l, std::vector<BigInt>(mp, 0));
    for (std::size_t t = 0; t < num.size(); ++t)
        if (num[t] != 0) grid[t * beta % l][mp == 1 ? 0 : t * alpha % mp] += num[t];
    // z_l^{l-1} = -(1 + ... + z_l^{l-2})
    for (u64 j = 0; j + 1 < l; ++j)
        for (u64 i = 0; i < mp; ++i) grid[j][i] -= grid[l - 1][i];
    for (u64 j = 1; j + 1 < l; ++j)
        for (u64 i = 0; i < mp; ++i)
            if (grid[j][i] != 0) {
                // reduce mod Phi_{m/l} before declaring non-descent
                CycloElem chk = CycloElem::from_powers(mp, grid[j], 1);
                if (!chk.is_zero()) throw InternalError("relative norm did not descend");
                break;
            }
    return CycloElem::from_powers(mp, std::move(grid[0]), acc.denominator());
}

// Norm to Q, by descending one prime at a time.
inline BigRational norm_to_Q(const CycloElem& x) {
    CycloElem y = x;
    while (y.order() > 1) {
        u64 m = y.order(), l = 0;
        for (auto [q, e] : factor(m))
            if (e >= 2 || l == 0) l = q;  // prefer a square factor
        y = relative_norm_step(y, l);
    }
    return reduce_to_rational(y);
}

}  // namespace ptower
