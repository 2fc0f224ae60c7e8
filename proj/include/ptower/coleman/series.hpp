#pragma once
// Truncated power series over Z[mu_m]/p^N (or exactly over Z[mu_m]) with a per-coefficient
// precision ledger, and scalars extended by mu_{p^k} for the substitutions T -> zeta(1+T) - 1.

#include <random>

#include "../arith/local.hpp"
#include "../arith/parallel.hpp"

namespace ptower {

// Element of Z[mu_m] in the power basis 1, y, ..., y^{phi(m)-1}.
using Coeff = std::vector<BigInt>;

class CoeffRing {
public:
    // N = 0: exact integers.
    CoeffRing(u64 p, u64 m, int N) : p_(p), m_(m), N_(N), phi_(cyclotomic(m)) {
        if (!is_prime(p)) throw UsageError("p must be prime");
        if (m == 0 || gcd_u(m, p) != 1) throw UsageError("coefficient ring Z[mu_m] must be unramified at p (p ∤ m)");
        if (N < 0) throw UsageError("precision must be >= 0");
        if (N > 0) mod_ = big_pow(p, static_cast<unsigned long>(N));
    }

    static std::shared_ptr<const CoeffRing> make(u64 p, u64 m, int N) { return std::make_shared<const CoeffRing>(p, m, N); }

    u64 p() const { return p_; }
    u64 m() const { return m_; }
    int N() const { return N_; }
    bool exact() const { return N_ == 0; }
    std::size_t dim() const { return phi_->deg; }
    i64 digits() const { return exact() ? PadicNumber::INF : N_; }
    // Residue degree d of Z_p[mu_m]: the Frobenius order.
    u64 residue_degree() const { return m_ == 1 ? 1 : mult_order(p_ % m_, m_); }

    std::string str() const {
        return "Z[mu_" + std::to_string(m_) + "]" + (exact() ? "" : "/" + std::to_string(p_) + "^" + std::to_string(N_));
    }

    Coeff zero() const { return Coeff(dim(), 0); }
    Coeff from_int(const BigInt& a) const {
        Coeff r = zero();
        r[0] = a;
        reduce(r);
        return r;
    }
    Coeff from_vector(Coeff a) const {
        if (a.size() > dim()) {
            // longer inputs are read as powers of y
            phi_->reduce(a, [](BigInt& t, const BigInt& c, i64 k) { t -= c * big(k); });
        }
        a.resize(dim(), 0);
        reduce(a);
        return a;
    }

    void reduce(Coeff& a) const {
        if (!exact())
            for (auto& x : a) x = mod_floor(x, mod_);
    }
    void reduce(BigInt& x) const {
        if (!exact()) x = mod_floor(x, mod_);
    }

    Coeff add(const Coeff& a, const Coeff& b) const {
        Coeff r(dim());
        for (std::size_t i = 0; i < dim(); ++i) r[i] = a[i] + b[i];
        reduce(r);
        return r;
    }
    Coeff sub(const Coeff& a, const Coeff& b) const {
        Coeff r(dim());
        for (std::size_t i = 0; i < dim(); ++i) r[i] = a[i] - b[i];
        reduce(r);
        return r;
    }
    Coeff neg(const Coeff& a) const { return sub(zero(), a); }
    Coeff scale(const Coeff& a, const BigInt& k) const {
        Coeff r(dim());
        for (std::size_t i = 0; i < dim(); ++i) r[i] = a[i] * k;
        reduce(r);
        return r;
    }
    Coeff mul(const Coeff& a, const Coeff& b) const {
        if (dim() == 1) {
            Coeff r{a[0] * b[0]};
            reduce(r);
            return r;
        }
        std::vector<BigInt> v(2 * dim() - 1, 0);
        for (std::size_t i = 0; i < dim(); ++i) {
            if (a[i] == 0) continue;
            for (std::size_t j = 0; j < dim(); ++j) v[i + j] += a[i] * b[j];
        }
        phi_->reduce(v, [](BigInt& t, const BigInt& c, i64 k) { t -= c * big(k); });
        reduce(v);
        return v;
    }

    bool is_zero(const Coeff& a) const {
        return std::all_of(a.begin(), a.end(), [](const BigInt& x) { return x == 0; });
    }
    i64 valuation(const Coeff& a) const {
        i64 v = PadicNumber::INF;
        for (auto& x : a)
            if (x != 0) v = std::min<i64>(v, vp(x, p_));
        if (!exact() && v >= N_) v = PadicNumber::INF;
        return v;
    }
    // Unit of Z_p[mu_m]: coprime to Phi_m modulo p.
    bool is_unit(const Coeff& a) const {
        detail::FpPoly x(dim());
        for (std::size_t i = 0; i < dim(); ++i) x[i] = mod_floor(a[i], BigInt(static_cast<unsigned long>(p_))).get_ui();
        detail::fp_trim(x);
        if (x.empty()) return false;
        if (dim() == 1) return true;
        detail::FpPoly g(phi_->coef.size());
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = static_cast<u64>(((phi_->coef[i] % static_cast<i64>(p_)) + static_cast<i64>(p_)) % static_cast<i64>(p_));
        return detail::fp_gcd(x, g, p_).size() == 1;
    }
    // a / p^j; exact mode requires divisibility, modular mode keeps the residue's quotient
    // (the top j digits become unknown and are accounted for by the caller's ledger).
    Coeff div_p_pow(const Coeff& a, unsigned j) const {
        BigInt q = big_pow(p_, j);
        Coeff r(dim());
        for (std::size_t i = 0; i < dim(); ++i) {
            if (exact() && mod_floor(a[i], q) != 0) throw InternalError("Coleman norm: coefficient not divisible by p^" + std::to_string(j));
            BigInt x = a[i];
            if (!exact()) x -= mod_floor(x, q);
            mpz_divexact(r[i].get_mpz_t(), x.get_mpz_t(), q.get_mpz_t());
        }
        reduce(r);
        return r;
    }

    bool same_as(const CoeffRing& o) const { return p_ == o.p_ && m_ == o.m_ && N_ == o.N_; }

private:
    u64 p_, m_;
    int N_;
    std::shared_ptr<const CyclotomicPoly> phi_;
    BigInt mod_;
};

using RingPtr = std::shared_ptr<const CoeffRing>;

// R[z] / Phi_{p^k}(z).
class ExtRing {
public:
    using Elem = std::vector<Coeff>;

    ExtRing(RingPtr R, unsigned k) : R_(std::move(R)), k_(k) {
        if (k == 0) throw UsageError("ExtRing needs k >= 1");
        pk1_ = ipow(R_->p(), k - 1);
        dim_ = static_cast<std::size_t>((R_->p() - 1) * pk1_);
    }

    const CoeffRing& base() const { return *R_; }
    std::size_t dim() const { return dim_; }
    unsigned k() const { return k_; }

    Elem zero() const { return Elem(dim_, R_->zero()); }
    Elem from_base(const Coeff& a) const {
        Elem r = zero();
        r[0] = a;
        return r;
    }
    // z^j
    Elem root(u64 j) const {
        std::vector<Coeff> v(static_cast<std::size_t>(ipow(R_->p(), k_)), R_->zero());
        v[j % v.size()][0] = 1;
        reduce(v);
        return v;
    }
    Elem add(const Elem& a, const Elem& b) const {
        Elem r(dim_);
        for (std::size_t i = 0; i < dim_; ++i) r[i] = R_->add(a[i], b[i]);
        return r;
    }
    Elem sub(const Elem& a, const Elem& b) const {
        Elem r(dim_);
        for (std::size_t i = 0; i < dim_; ++i) r[i] = R_->sub(a[i], b[i]);
        return r;
    }
    Elem mul(const Elem& a, const Elem& b) const {
        std::vector<Coeff> v(2 * dim_ - 1, R_->zero());
        for (std::size_t i = 0; i < dim_; ++i) {
            if (R_->is_zero(a[i])) continue;
            for (std::size_t j = 0; j < dim_; ++j) {
                if (R_->is_zero(b[j])) continue;
                Coeff t = R_->mul(a[i], b[j]);
                for (std::size_t s = 0; s < t.size(); ++s) v[i + j][s] += t[s];
            }
        }
        reduce(v);
        return v;
    }
    bool descends(const Elem& a) const {
        for (std::size_t i = 1; i < dim_; ++i)
            if (!R_->is_zero(a[i])) return false;
        return true;
    }

private:
    // z^{(p-1)p^{k-1}} = -sum_{i<p-1} z^{i p^{k-1}}
    void reduce(std::vector<Coeff>& v) const {
        u64 p = R_->p();
        for (std::size_t t = v.size(); t-- > dim_;) {
            if (R_->is_zero(v[t])) continue;
            Coeff c = v[t];
            v[t] = R_->zero();
            for (u64 i = 0; i + 1 < p; ++i) {
                Coeff& dst = v[t - dim_ + static_cast<std::size_t>(i * pk1_)];
                for (std::size_t s = 0; s < c.size(); ++s) dst[s] -= c[s];
            }
        }
        v.resize(dim_, R_->zero());
        for (auto& c : v) R_->reduce(c);
    }

    RingPtr R_;
    unsigned k_;
    u64 pk1_;
    std::size_t dim_;
};

struct LossEvent {
    std::string op;
    std::size_t degree = 0;
    i64 digits = 0;
};

// Absolute p-adic precision of every coefficient after a sequence of operations.
struct PrecisionLedger {
    std::vector<i64> digits;  // INF: exact
    std::vector<LossEvent> losses;
    int working_digits = 0;   // internal precision used by the last operation (0: exact)

    i64 min_digits() const {
        i64 r = PadicNumber::INF;
        for (auto d : digits) r = std::min(r, d);
        return r;
    }
};

struct TruncSeries {
    RingPtr ring;
    std::vector<Coeff> c;     // c_0 .. c_{M-1}
    bool polynomial = true;   // true: coefficients of degree >= M vanish; false: unknown tail
    PrecisionLedger ledger;

    std::size_t M() const { return c.size(); }
    bool is_unit() const { return !c.empty() && ring->is_unit(c[0]); }

    static TruncSeries make(RingPtr R, std::vector<Coeff> coeffs, bool polynomial = true) {
        if (coeffs.empty()) throw UsageError("empty series");
        TruncSeries s;
        s.ring = R;
        for (auto& x : coeffs) s.c.push_back(R->from_vector(std::move(x)));
        s.polynomial = polynomial;
        s.ledger.digits.assign(s.c.size(), R->digits());
        return s;
    }
    static TruncSeries from_ints(RingPtr R, const std::vector<BigInt>& a, bool polynomial = true) {
        std::vector<Coeff> cs;
        for (auto& x : a) cs.push_back(R->from_int(x));
        return make(R, std::move(cs), polynomial);
    }
    static TruncSeries constant(RingPtr R, const Coeff& a, std::size_t M = 1) {
        std::vector<Coeff> cs(M, R->zero());
        cs[0] = a;
        return make(R, std::move(cs));
    }

    // The same coefficients read in another ring of the same (p, m): lifting to more digits (the
    // ledger keeps the original precision) or reducing to fewer.
    TruncSeries in_ring(RingPtr R) const {
        require(R->p() == ring->p() && R->m() == ring->m(), "in_ring: different coefficient rings");
        TruncSeries s = *this;
        s.ring = R;
        for (std::size_t j = 0; j < s.c.size(); ++j) {
            R->reduce(s.c[j]);
            s.ledger.digits[j] = std::min(s.ledger.digits[j], R->digits());
        }
        return s;
    }

    // Digits to which a and b agree on their common coefficients, capped by both ledgers.
    friend i64 agreement(const TruncSeries& a, const TruncSeries& b) {
        std::size_t n = std::max(a.M(), b.M());
        i64 r = PadicNumber::INF;
        for (std::size_t j = 0; j < n; ++j) {
            bool in_a = j < a.M(), in_b = j < b.M();
            if ((!in_a && !a.polynomial) || (!in_b && !b.polynomial)) break;
            Coeff x = in_a ? a.c[j] : a.ring->zero(), y = in_b ? b.c[j] : b.ring->zero();
            i64 cap = std::min(in_a ? a.ledger.digits[j] : PadicNumber::INF, in_b ? b.ledger.digits[j] : PadicNumber::INF);
            Coeff d(x.size());
            for (std::size_t s = 0; s < d.size(); ++s) d[s] = x[s] - y[s];
            i64 v = PadicNumber::INF;
            for (auto& t : d)
                if (t != 0) v = std::min<i64>(v, vp(t, a.ring->p()));
            r = std::min(r, std::min(v, cap));
        }
        return r;
    }

    // "19 + 27T + 5T^3"; zero terms are omitted, unit coefficients elided.
    std::string str() const {
        std::ostringstream o;
        bool first = true;
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (ring->is_zero(c[j]) && !(j == 0 && c.size() == 1)) continue;
            if (!first) o << " + ";
            first = false;
            bool one = c[j].size() == 1 && c[j][0] == 1;
            if (c[j].size() == 1) {
                if (!one || !j) o << c[j][0];
            } else {
                o << "(";
                for (std::size_t s = 0; s < c[j].size(); ++s) o << (s ? "," : "") << c[j][s];
                o << ")";
            }
            if (j) o << "T" << (j > 1 ? "^" + std::to_string(j) : "");
        }
        if (first) o << "0";
        o << (polynomial ? "" : " + O(T^" + std::to_string(c.size()) + ")");
        return o.str();
    }
};

// Product; two polynomials multiply in full, anything else is truncated to the shorter length.
inline TruncSeries operator*(const TruncSeries& a, const TruncSeries& b) {
    require(a.ring->same_as(*b.ring), "series over different rings");
    const CoeffRing& R = *a.ring;
    bool poly = a.polynomial && b.polynomial;
    std::size_t L = poly ? a.M() + b.M() - 1 : std::min(a.M(), b.M());
    TruncSeries r;
    r.ring = a.ring;
    r.polynomial = poly;
    r.c.assign(L, R.zero());
    r.ledger.digits.assign(L, R.digits());
    for (std::size_t i = 0; i < a.M() && i < L; ++i)
        for (std::size_t j = 0; j < b.M() && i + j < L; ++j) r.c[i + j] = R.add(r.c[i + j], R.mul(a.c[i], b.c[j]));
    // coefficient j involves a_0..a_j and b_0..b_j
    i64 run = PadicNumber::INF;
    for (std::size_t j = 0; j < L; ++j) {
        if (j < a.M()) run = std::min(run, a.ledger.digits[j]);
        if (j < b.M()) run = std::min(run, b.ledger.digits[j]);
        r.ledger.digits[j] = std::min(run, R.digits());
    }
    return r;
}

// Coefficients of ((1+T)^{p^n} - 1)^k, k = 0..K, up to degree D.
inline std::vector<std::vector<BigInt>> phi_powers(u64 p, unsigned n, std::size_t K, std::size_t D) {
    u64 q = ipow(p, n);
    std::vector<BigInt> phi(std::min<std::size_t>(q, D) + 1, 0);
    for (u64 i = 1; i <= q && i <= D; ++i) {
        BigInt b;
        mpz_bin_uiui(b.get_mpz_t(), q, i);
        phi[i] = b;
    }
    std::vector<std::vector<BigInt>> out;
    std::vector<BigInt> cur(D + 1, 0);
    cur[0] = 1;
    for (std::size_t k = 0; k <= K; ++k) {
        out.push_back(cur);
        std::vector<BigInt> nxt(D + 1, 0);
        for (std::size_t i = 0; i <= D; ++i) {
            if (cur[i] == 0) continue;
            for (std::size_t t = 1; t < phi.size() && i + t <= D; ++t) nxt[i + t] += cur[i] * phi[t];
        }
        cur.swap(nxt);
    }
    return out;
}

// g((1+T)^{p^n} - 1): in full for a polynomial g, else truncated to the length of g.
inline TruncSeries compose_phi(const TruncSeries& g, unsigned n) {
    const CoeffRing& R = *g.ring;
    u64 q = ipow(R.p(), n);
    std::size_t L = g.polynomial ? (g.M() - 1) * q + 1 : g.M();
    auto pw = phi_powers(R.p(), n, g.M() - 1, L - 1);
    TruncSeries r;
    r.ring = g.ring;
    r.polynomial = g.polynomial;
    r.c.assign(L, R.zero());
    r.ledger.digits.assign(L, R.digits());
    for (std::size_t k = 0; k < g.M(); ++k)
        for (std::size_t j = k; j < L; ++j)
            if (pw[k][j] != 0) r.c[j] = R.add(r.c[j], R.scale(g.c[k], pw[k][j]));
    for (std::size_t j = 0; j < L; ++j) {
        i64 d = R.digits();
        for (std::size_t k = 0; k < g.M() && k <= j; ++k)
            if (pw[k][j] != 0) d = std::min<i64>(d, g.ledger.digits[k] == PadicNumber::INF ? PadicNumber::INF : g.ledger.digits[k] + vp(pw[k][j], R.p()));
        r.ledger.digits[j] = d;
    }
    return r;
}

// Random unit series with coefficients reduced in R (seeded, deterministic).
inline TruncSeries random_unit_series(RingPtr R, std::size_t M, std::mt19937_64& rng, int digits = 6) {
    BigInt q = big_pow(R->p(), static_cast<unsigned long>(R->exact() ? digits : R->N()));
    auto draw = [&]() {
        BigInt x = 0;
        for (int i = 0; i < 4; ++i) {
            x <<= 64;
            x += static_cast<unsigned long>(rng());
        }
        return mod_floor(x, q);
    };
    std::vector<Coeff> cs;
    for (std::size_t j = 0; j < M; ++j) {
        Coeff a(R->dim());
        for (auto& x : a) x = draw();
        cs.push_back(a);
    }
    while (!R->is_unit(cs[0]))
        for (auto& x : cs[0]) x = draw();
    return TruncSeries::make(R, std::move(cs));
}

}  // namespace ptower
