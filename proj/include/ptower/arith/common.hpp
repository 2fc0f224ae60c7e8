#pragma once
// Shared integer utilities and the error taxonomy used across the library.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ptower {

using BigInt = mpz_class;
using BigRational = mpq_class;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

// Exit-code classes: usage -> 2, resource -> 3, everything else -> 1.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RationalityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};
// Q_n cannot be decided by any rule and no override was supplied.
struct NeedsInputError : UsageError {
    using UsageError::UsageError;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw InternalError(what);
}

inline BigInt big(i64 v) { return BigInt(static_cast<long>(v)); }

inline BigInt big_pow(const BigInt& b, unsigned long e) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

inline BigInt big_pow(u64 b, unsigned long e) {
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), b, e);
    return r;
}

// v_p(x); x != 0 required.
inline int vp(const BigInt& x, u64 p) {
    if (x == 0) throw InternalError("vp of zero");
    BigInt t = x;
    int v = 0;
    while (mpz_divisible_ui_p(t.get_mpz_t(), p)) {
        mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), p);
        ++v;
    }
    return v;
}

// Strip all factors p from x (x != 0), returning the count.
inline int strip(BigInt& x, u64 p) {
    int v = 0;
    while (x != 0 && mpz_divisible_ui_p(x.get_mpz_t(), p)) {
        mpz_divexact_ui(x.get_mpz_t(), x.get_mpz_t(), p);
        ++v;
    }
    return v;
}

inline BigInt mod_floor(const BigInt& a, const BigInt& m) {
    BigInt r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline BigInt inv_mod(const BigInt& a, const BigInt& m) {
    BigInt r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
        throw InternalError("inv_mod: not invertible");
    return r;
}

inline std::string to_dec(const BigInt& x) { return x.get_str(10); }

inline std::string to_str(const BigRational& q) {
    return q.get_den() == 1 ? q.get_num().get_str() : q.get_str();
}

inline BigRational parse_rational(const std::string& s) {
    BigRational q;
    if (q.set_str(s, 10) != 0) throw UsageError("bad rational: " + s);
    q.canonicalize();
    return q;
}

// --- machine-word number theory ---

inline u64 gcd_u(u64 a, u64 b) { return std::gcd(a, b); }
inline u64 lcm_u(u64 a, u64 b) { return a / std::gcd(a, b) * b; }

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>((u128)a * b % m); }

inline u64 powmod(u64 b, u64 e, u64 m) {
    u64 r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

inline u64 ipow(u64 b, unsigned e) {
    u64 r = 1;
    while (e--) {
        if (r > UINT64_MAX / b) throw ResourceError("integer power overflows 64 bits");
        r *= b;
    }
    return r;
}

// Topological generator of 1 + 2pZ_p: 1+p (p odd) or 5.
inline u64 kappa(u64 p) { return p == 2 ? 5 : p + 1; }

// (prime, exponent) pairs in increasing prime order.
inline std::vector<std::pair<u64, unsigned>> factor(u64 n) {
    std::vector<std::pair<u64, unsigned>> f;
    for (u64 d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
        if (n % d) continue;
        unsigned e = 0;
        while (n % d == 0) n /= d, ++e;
        f.emplace_back(d, e);
    }
    if (n > 1) f.emplace_back(n, 1);
    return f;
}

inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline u64 euler_phi(u64 n) {
    u64 r = n;
    for (auto [q, e] : factor(n)) r = r / q * (q - 1);
    return r;
}

inline std::vector<u64> divisors(u64 n) {
    std::vector<u64> d{1};
    for (auto [q, e] : factor(n)) {
        std::size_t k = d.size();
        u64 qq = 1;
        for (unsigned i = 0; i < e; ++i) {
            qq *= q;
            for (std::size_t j = 0; j < k; ++j) d.push_back(d[j] * qq);
        }
    }
    std::sort(d.begin(), d.end());
    return d;
}

// Multiplicative order of a mod m (gcd(a,m)=1).
inline u64 mult_order(u64 a, u64 m) {
    if (m == 1) return 1;
    u64 n = euler_phi(m);
    u64 o = n;
    for (auto [q, e] : factor(n))
        while (o % q == 0 && powmod(a, o / q, m) == 1) o /= q;
    return o;
}

// Smallest g that generates (Z/l^2)^x; it then generates (Z/l^k)^x for all k.
inline u64 primitive_root_l2(u64 l) {
    u64 m = l * l;
    u64 n = l * (l - 1);
    for (u64 g = 2; g < m; ++g)
        if (g % l && mult_order(g, m) == n) return g;
    throw InternalError("no primitive root");
}

// Largest N with p^N < 2^62; modular word arithmetic is capped there.
inline unsigned word_precision_cap(u64 p) {
    unsigned n = 0;
    u128 v = 1;
    while (v * p < ((u128)1 << 62)) v *= p, ++n;
    return n;
}

}  // namespace ptower
