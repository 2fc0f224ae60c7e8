#pragma once
// Z[mu_m] / p^N, coefficients in machine words (p^N < 2^62).

#include "cyclo.hpp"

namespace ptower {

struct ModWord {
    u64 p = 2;
    int N = 1;
    u64 q = 2;  // p^N

    ModWord() = default;
    ModWord(u64 p_, int N_) : p(p_), N(N_) {
        if (N_ < 1) throw UsageError("precision must be positive");
        if (N_ > static_cast<int>(word_precision_cap(p_)))
            throw ResourceError("modular precision " + std::to_string(p_) + "^" + std::to_string(N_) +
                                " exceeds the 62-bit word; use exact mode or lower --prec");
        q = ipow(p_, N_);
    }
    u64 add(u64 a, u64 b) const { u64 s = a + b; return s >= q ? s - q : s; }
    u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + q - b; }
    u64 mul(u64 a, u64 b) const { return mulmod(a, b, q); }
    u64 neg(u64 a) const { return a ? q - a : 0; }
    u64 from_i64(i64 a) const {
        i64 r = a % static_cast<i64>(q);
        return r < 0 ? static_cast<u64>(r + static_cast<i64>(q)) : static_cast<u64>(r);
    }
    u64 from_big(const BigInt& a) const {
        BigInt r = mod_floor(a, BigInt(static_cast<unsigned long>(q)));
        return r.get_ui();
    }
    // a / b for b a p-adic unit
    u64 from_rational_unit(const BigInt& a, const BigInt& b) const {
        BigInt Q(static_cast<unsigned long>(q));
        return mod_floor(a * inv_mod(mod_floor(b, Q), Q), Q).get_ui();
    }
    u64 inv(u64 a) const {
        if (a % p == 0) throw InternalError("modular inverse of a non-unit");
        return from_rational_unit(1, BigInt(static_cast<unsigned long>(a)));
    }
    bool operator==(const ModWord& o) const { return p == o.p && N == o.N; }
};

class CycloModElem {
public:
    CycloModElem() = default;
    CycloModElem(u64 m, ModWord w) : m_(m), w_(w), phi_(cyclotomic(m)), c_(phi_->deg, 0) {}

    static CycloModElem from_int(u64 m, ModWord w, i64 a) {
        CycloModElem r(m, w);
        r.c_[0] = w.from_i64(a);
        return r;
    }

    static CycloModElem root_of_unity(u64 m, ModWord w, u64 k) {
        std::vector<u64> acc(m, 0);
        acc[k % m] = 1;
        return from_powers(m, w, std::move(acc));
    }

    static CycloModElem from_powers(u64 m, ModWord w, std::vector<u64> acc) {
        CycloModElem r(m, w);
        if (acc.size() > m) {
            for (std::size_t j = m; j < acc.size(); ++j) acc[j % m] = w.add(acc[j % m], acc[j]);
            acc.resize(m);
        }
        r.phi_->reduce(acc, [&w](u64& t, u64 c, i64 a) { t = w.sub(t, w.mul(c, w.from_i64(a))); });
        r.c_ = std::move(acc);
        return r;
    }

    // Exact element with denominator prime to p, pushed into Z[mu_m]/p^N.
    static CycloModElem reduce(const CycloElem& x, ModWord w) {
        if (mpz_divisible_ui_p(x.denominator().get_mpz_t(), w.p))
            throw UsageError("reduce: denominator divisible by p; scale first");
        CycloModElem r(x.order(), w);
        u64 dinv = w.from_rational_unit(1, x.denominator());
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = w.mul(w.from_big(x.numerators()[i]), dinv);
        return r;
    }

    u64 order() const { return m_; }
    const ModWord& ring() const { return w_; }
    const std::vector<u64>& coeffs() const { return c_; }
    std::vector<u64>& coeffs() { return c_; }

    bool is_zero() const {
        for (u64 x : c_)
            if (x) return false;
        return true;
    }
    bool is_rational() const {
        for (std::size_t i = 1; i < c_.size(); ++i)
            if (c_[i]) return false;
        return true;
    }

    friend CycloModElem operator+(const CycloModElem& a, const CycloModElem& b) {
        a.check(b);
        CycloModElem r = a;
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = a.w_.add(a.c_[i], b.c_[i]);
        return r;
    }
    friend CycloModElem operator-(const CycloModElem& a, const CycloModElem& b) {
        a.check(b);
        CycloModElem r = a;
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = a.w_.sub(a.c_[i], b.c_[i]);
        return r;
    }
    friend CycloModElem operator*(const CycloModElem& a, const CycloModElem& b) {
        a.check(b);
        const ModWord& w = a.w_;
        std::size_t n = a.c_.size();
        std::vector<u64> acc(2 * n - 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (!a.c_[i]) continue;
            for (std::size_t j = 0; j < n; ++j)
                if (b.c_[j]) acc[i + j] = w.add(acc[i + j], w.mul(a.c_[i], b.c_[j]));
        }
        CycloModElem r(a.m_, w);
        a.phi_->reduce(acc, [&w](u64& t, u64 c, i64 x) { t = w.sub(t, w.mul(c, w.from_i64(x))); });
        r.c_ = std::move(acc);
        return r;
    }
    friend CycloModElem operator*(i64 k, const CycloModElem& a) {
        CycloModElem r = a;
        u64 kk = a.w_.from_i64(k);
        for (auto& x : r.c_) x = a.w_.mul(x, kk);
        return r;
    }
    friend bool operator==(const CycloModElem& a, const CycloModElem& b) {
        return a.m_ == b.m_ && a.w_ == b.w_ && a.c_ == b.c_;
    }

private:
    void check(const CycloModElem& b) const {
        if (m_ != b.m_) throw UsageError("modular cyclotomic operands of different orders");
        if (!(w_ == b.w_)) throw UsageError("modular cyclotomic operands with different moduli");
    }

    u64 m_ = 1;
    ModWord w_;
    std::shared_ptr<const CyclotomicPoly> phi_;
    std::vector<u64> c_;
};

}  // namespace ptower
