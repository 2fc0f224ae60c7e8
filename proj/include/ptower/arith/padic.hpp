#pragma once
// Elements of Q_p as p^v * unit, the unit known modulo p^prec.

#include <climits>
#include <sstream>

#include "common.hpp"

namespace ptower {

class PadicNumber {
public:
    static constexpr i64 INF = LLONG_MAX;

    PadicNumber() = default;

    // Exact zero.
    static PadicNumber zero(u64 p) {
        PadicNumber z;
        z.p_ = p;
        z.v_ = INF;
        z.prec_ = INT_MAX;
        return z;
    }

    // Zero known only modulo p^abs.
    static PadicNumber zero_mod(u64 p, i64 abs) {
        PadicNumber z;
        z.p_ = p;
        z.v_ = abs;
        z.prec_ = 0;
        return z;
    }

    // p^v * u with u known mod p^prec; u may be divisible by p (normalised here).
    static PadicNumber make(u64 p, i64 v, BigInt u, int prec) {
        PadicNumber r;
        r.p_ = p;
        if (prec < 0) prec = 0;
        BigInt m = big_pow(p, prec);
        u = mod_floor(u, m);
        if (u == 0) return zero_mod(p, v + prec);
        int k = strip(u, p);
        r.v_ = v + k;
        r.prec_ = prec - k;
        r.unit_ = mod_floor(u, big_pow(p, r.prec_));
        return r;
    }

    static PadicNumber from_rational(const BigRational& q, u64 p, int N) {
        if (q == 0) return zero(p);
        BigInt a = q.get_num(), b = q.get_den();
        int va = strip(a, p), vb = strip(b, p);
        BigInt m = big_pow(p, N);
        BigInt u = mod_floor(a * inv_mod(mod_floor(b, m), m), m);
        PadicNumber r;
        r.p_ = p;
        r.v_ = va - vb;
        r.prec_ = N;
        r.unit_ = u;
        return r;
    }

    static PadicNumber from_int(const BigInt& a, u64 p, int N) { return from_rational(BigRational(a), p, N); }

    u64 prime() const { return p_; }
    bool is_exact_zero() const { return v_ == INF; }
    // Zero to the known precision (including exact zero).
    bool is_zero() const { return v_ == INF || prec_ == 0; }
    i64 valuation() const { return v_; }
    int precision() const { return prec_; }
    const BigInt& unit() const { return unit_; }
    i64 absolute_precision() const { return v_ == INF ? INF : v_ + prec_; }
    bool is_unit() const { return v_ == 0 && prec_ > 0; }

    // Integer representative of the value mod p^abs (requires v >= 0).
    BigInt residue() const {
        if (v_ == INF || prec_ == 0) return 0;
        if (v_ < 0) throw UsageError("residue of a non-integral p-adic number");
        return unit_ * big_pow(p_, static_cast<unsigned long>(v_));
    }

    // Drop digits so that the absolute precision is at most abs.
    PadicNumber truncate_abs(i64 abs) const {
        if (v_ == INF) return zero_mod(p_, abs);
        if (absolute_precision() <= abs) return *this;
        if (v_ >= abs) return zero_mod(p_, abs);
        return make(p_, v_, unit_, static_cast<int>(abs - v_));
    }

    friend PadicNumber operator*(const PadicNumber& a, const PadicNumber& b) {
        check_same(a, b);
        if (a.v_ == INF || b.v_ == INF) return zero(a.p_);
        // for an inexact zero, v_ is a lower bound on the valuation
        if (a.prec_ == 0 || b.prec_ == 0) return zero_mod(a.p_, a.v_ + b.v_);
        int prec = std::min(a.prec_, b.prec_);
        BigInt m = big_pow(a.p_, prec);
        PadicNumber r;
        r.p_ = a.p_;
        r.v_ = a.v_ + b.v_;
        r.prec_ = prec;
        r.unit_ = mod_floor(a.unit_ * b.unit_, m);
        return r;
    }

    PadicNumber inverse() const {
        if (is_zero()) throw UsageError("p-adic division by zero");
        PadicNumber r;
        r.p_ = p_;
        r.v_ = -v_;
        r.prec_ = prec_;
        r.unit_ = inv_mod(unit_, big_pow(p_, prec_));
        return r;
    }

    friend PadicNumber operator/(const PadicNumber& a, const PadicNumber& b) { return a * b.inverse(); }

    PadicNumber operator-() const {
        if (is_zero()) return *this;
        PadicNumber r = *this;
        r.unit_ = mod_floor(-unit_, big_pow(p_, prec_));
        return r;
    }

    friend PadicNumber operator+(const PadicNumber& a, const PadicNumber& b) {
        check_same(a, b);
        if (a.v_ == INF) return b;
        if (b.v_ == INF) return a;
        i64 abs = std::min(a.absolute_precision(), b.absolute_precision());
        i64 v0 = std::min(a.v_, b.v_);
        if (v0 >= abs) return zero_mod(a.p_, abs);
        BigInt s = 0;
        if (a.prec_ > 0) s += a.unit_ * big_pow(a.p_, static_cast<unsigned long>(a.v_ - v0));
        if (b.prec_ > 0) s += b.unit_ * big_pow(a.p_, static_cast<unsigned long>(b.v_ - v0));
        return make(a.p_, v0, s, static_cast<int>(abs - v0));
    }

    friend PadicNumber operator-(const PadicNumber& a, const PadicNumber& b) { return a + (-b); }

    PadicNumber pow(i64 e) const {
        if (e < 0) return inverse().pow(-e);
        if (v_ == INF) return e == 0 ? from_int(1, p_, 1) : *this;
        PadicNumber r = from_int(1, p_, prec_ == 0 ? 1 : prec_);
        PadicNumber b = *this;
        while (e) {
            if (e & 1) r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }

    // Number of agreeing digits: v_p(a - b), capped at the common precision.
    friend i64 agreement(const PadicNumber& a, const PadicNumber& b) {
        PadicNumber d = a - b;
        if (d.v_ == INF) return INF;
        return d.v_;
    }

    // a == b modulo p^k, with k no larger than both absolute precisions.
    friend bool congruent(const PadicNumber& a, const PadicNumber& b, i64 k) {
        return agreement(a, b) >= k;
    }

    std::string str() const {
        std::ostringstream o;
        if (v_ == INF) return "0 (exact)";
        if (prec_ == 0) {
            o << "O(" << p_ << "^" << v_ << ")";
            return o.str();
        }
        if (v_ >= 0) {
            o << residue().get_str() << " + O(" << p_ << "^" << absolute_precision() << ")";
        } else {
            o << p_ << "^" << v_ << " * " << unit_.get_str() << " + O(" << p_ << "^" << absolute_precision()
              << ")";
        }
        return o.str();
    }

private:
    static void check_same(const PadicNumber& a, const PadicNumber& b) {
        if (a.p_ != b.p_) throw UsageError("p-adic operands over different primes");
    }

    u64 p_ = 2;
    i64 v_ = INF;
    int prec_ = INT_MAX;
    BigInt unit_ = 0;
};

inline PadicNumber padic_reduce(const BigRational& q, u64 p, int N) { return PadicNumber::from_rational(q, p, N); }

// Teichmuller representative: the root of unity congruent to a mod p (mod 4 if p = 2),
// found as the stable value of x -> x^p.
inline PadicNumber teichmuller(const BigInt& a, u64 p, int N) {
    if (mpz_divisible_ui_p(a.get_mpz_t(), p)) throw UsageError("teichmuller: p divides the argument");
    BigInt m = big_pow(p, N);
    if (p == 2) {
        BigInt r = mod_floor(a, 4) == 1 ? BigInt(1) : m - 1;
        return PadicNumber::make(2, 0, r, N);
    }
    BigInt x = mod_floor(a, m), y;
    for (int i = 0; i <= N; ++i) {
        mpz_powm_ui(y.get_mpz_t(), x.get_mpz_t(), p, m.get_mpz_t());
        if (y == x) break;
        x = y;
    }
    return PadicNumber::make(p, 0, x, N);
}

}  // namespace ptower
