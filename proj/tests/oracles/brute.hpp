#pragma once
// Brute-force oracles used by the tests. Everything here is written from first principles and
// shares no code with the library beyond GMP.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oracle {

using Z = mpz_class;
using Q = mpq_class;
using i64 = std::int64_t;

inline i64 mod(i64 a, i64 m) { return ((a % m) + m) % m; }

inline i64 powmod(i64 b, i64 e, i64 m) {
    i64 r = 1 % m;
    b = mod(b, m);
    for (; e; e >>= 1, b = b * b % m)
        if (e & 1) r = r * b % m;
    return r;
}

inline bool is_squarefree(i64 n) {
    n = n < 0 ? -n : n;
    for (i64 q = 2; q * q <= n; ++q)
        if (n % (q * q) == 0) return false;
    return true;
}

// Fundamental discriminant of Q(sqrt d), d squarefree.
inline i64 discriminant(i64 d) { return mod(d, 4) == 1 ? d : 4 * d; }

// Kronecker symbol (D/n) for n >= 1, by quadratic reciprocity.
inline int kronecker(i64 D, i64 n) {
    int r = 1;
    while (n % 2 == 0) {
        n /= 2;
        if (D % 2 == 0) return 0;
        i64 e = mod(D, 8);
        if (e == 3 || e == 5) r = -r;
    }
    i64 a = mod(D, n);
    while (a) {  // Jacobi (a/n), n odd
        while (a % 2 == 0) {
            a /= 2;
            if (n % 8 == 3 || n % 8 == 5) r = -r;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) r = -r;
        a %= n;
    }
    return n == 1 ? r : 0;
}

// B_{1,chi} and B_{2,chi} for the quadratic character of discriminant D.
inline Q B1_quadratic(i64 D) {
    i64 f = D < 0 ? -D : D;
    Q s = 0;
    for (i64 a = 1; a <= f; ++a) s += Q(kronecker(D, a) * a);
    return s / f;
}

inline Q B2_quadratic(i64 D) {
    i64 f = D < 0 ? -D : D;
    Q s = 0;
    for (i64 a = 1; a <= f; ++a) {
        Q x(a, f);
        x.canonicalize();
        s += kronecker(D, a) * (x * x - x + Q(1, 6));
    }
    return s * f;
}

// Bernoulli numbers B_0..B_n from sum_{j<=k} C(k+1, j) B_j = 0.
inline std::vector<Q> bernoulli(int n) {
    std::vector<Q> B(n + 1);
    B[0] = 1;
    for (int k = 1; k <= n; ++k) {
        Q s = 0;
        Z c = 1;  // C(k+1, j)
        for (int j = 0; j < k; ++j) {
            s += c * B[j];
            c = c * (k + 1 - j) / (j + 1);
        }
        B[k] = -s / (k + 1);
    }
    return B;
}

// Number of primitive reduced positive definite forms of discriminant D < 0.
inline int class_number_forms(i64 D) {
    int h = 0;
    for (i64 a = 1; 3 * a * a <= -D; ++a)
        for (i64 b = -a + 1; b <= a; ++b) {
            i64 num = b * b - D;
            if (num % (4 * a)) continue;
            i64 c = num / (4 * a);
            if (c < a || (c == a && b < 0)) continue;
            if (std::gcd(std::gcd(a, b < 0 ? -b : b), c) != 1) continue;
            ++h;
        }
    return h;
}

// Exact determinant by fraction-free elimination.
inline Z det(std::vector<std::vector<Z>> M) {
    std::size_t n = M.size();
    Z prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && M[piv][k] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != k) std::swap(M[piv], M[k]), sign = -sign;
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) / prev;
        prev = M[k][k];
    }
    return sign * M[n - 1][n - 1];
}

// Res(A, F) for monic A: determinant of multiplication by F on Z[x]/(A).
inline Z resultant_monic(const std::vector<Z>& A, const std::vector<Z>& F) {
    std::size_t d = A.size() - 1;
    auto reduce = [&](std::vector<Z> v) {
        for (std::size_t i = v.size(); i-- > d;) {
            if (v[i] == 0) continue;
            Z c = v[i];
            for (std::size_t j = 0; j <= d; ++j) v[i - d + j] -= c * A[j];
        }
        v.resize(d, 0);
        return v;
    };
    std::vector<std::vector<Z>> M(d, std::vector<Z>(d));
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<Z> col(j, 0);
        col.insert(col.end(), F.begin(), F.end());
        auto r = reduce(col);
        for (std::size_t i = 0; i < d; ++i) M[i][j] = r[i];
    }
    return det(M);
}

// h^- of Q(mu_m) for m = q^k (q odd prime) or m = 2^k (k >= 2), from
// h^- = Q w prod_{chi odd} (-B_{1,chi}/2), the product taken as a resultant over the
// cyclic part of (Z/m)^x.
inline Z hminus_prime_power_cyclotomic(i64 m) {
    i64 q = 2;
    while (m % q) ++q;
    i64 phi = m / q * (q - 1);
    std::vector<Z> A, F;
    i64 nchars;
    if (q == 2) {
        if (m == 4) return 1;
        // (Z/m)^x = <-1> x <5>; odd chi: chi(-1) = -1, chi(5) runs over roots of x^{phi/2} - 1
        i64 r = phi / 2;
        A.assign(r + 1, 0);
        A[0] = -1, A[r] = 1;
        F.assign(r, 0);
        for (i64 i = 0, g = 1; i < r; ++i, g = g * 5 % m) F[i] = Z(g) - Z(m - g);
        nchars = r;
    } else {
        i64 g = 2;
        auto is_gen = [&](i64 x) {
            if (x % q == 0) return false;
            for (i64 t = 2; t <= phi; ++t)
                if (phi % t == 0 && [&] {
                        for (i64 s = 2; s * s <= t; ++s)
                            if (t % s == 0) return false;
                        return true;
                    }() && powmod(x, phi / t, m) == 1)
                    return false;
            return true;
        };
        while (!is_gen(g)) ++g;
        // odd chi: chi(g) runs over roots of x^{phi/2} + 1
        i64 r = phi / 2;
        A.assign(r + 1, 0);
        A[0] = 1, A[r] = 1;
        F.assign(phi, 0);
        for (i64 i = 0, x = 1; i < phi; ++i, x = x * g % m) F[i] = x;
        nchars = r;
    }
    Z res = resultant_monic(A, F);  // prod_{chi odd} m B_{1,chi}
    i64 w = q == 2 ? m : 2 * m;
    Z den;
    mpz_pow_ui(den.get_mpz_t(), Z(2 * m).get_mpz_t(), static_cast<unsigned long>(nchars));
    Q h(res * w, den);
    h.canonicalize();
    if (h < 0) h = -h;
    return h.get_den() == 1 ? Z(h.get_num()) : Z(0);  // zero signals a non-integer result
}

// w_2(F) for F = Q or Q(sqrt d): the largest N with Gal(F(mu_N)/F) of exponent <= 2, by search.
inline i64 w2_quadratic(i64 d /* 1 for Q */) {
    i64 cond = d == 1 ? 1 : (d < 0 ? -discriminant(d) : discriminant(d));
    i64 D = d == 1 ? 1 : discriminant(d);
    i64 w = 1;
    for (i64 N = 1; N <= 2000; ++N) {
        bool ok = true;
        for (i64 a = 1; a < N && ok; ++a) {
            if (std::gcd(a, N) != 1) continue;
            if (d != 1 && N % cond == 0 && kronecker(D, a) != 1) continue;  // not in Gal(F(mu_N)/F)
            if (a * a % N != 1) ok = false;
        }
        if (ok) w = std::lcm(w, N);
    }
    return w;
}

// ---- power series over Z[zeta_3] = Z[w]/(w^2 + w + 1), elements (a, b) = a + b w

struct E3 {
    Z a = 0, b = 0;
};
inline E3 operator+(E3 x, const E3& y) { return {x.a + y.a, x.b + y.b}; }
inline E3 operator*(const E3& x, const E3& y) {
    // w^2 = -1 - w
    Z bb = x.b * y.b;
    return {x.a * y.a - bb, x.a * y.b + x.b * y.a - bb};
}

using Poly3 = std::vector<E3>;

inline Poly3 mul(const Poly3& f, const Poly3& g) {
    Poly3 r(f.size() + g.size() - 1);
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) r[i + j] = r[i + j] + f[i] * g[j];
    return r;
}

// f(u(T)) for a polynomial u.
inline Poly3 compose(const Poly3& f, const Poly3& u) {
    Poly3 r{E3{}};
    for (std::size_t i = f.size(); i-- > 0;) {
        r = mul(r, u);
        r[0] = r[0] + f[i];
    }
    return r;
}

// Coleman norm over Z_3 of an integer polynomial f with f(0) a unit, exactly: the unique g with
// g((1+T)^3 - 1) = prod_{zeta^3 = 1} f(zeta(1+T) - 1). Returns empty if g is not integral.
inline std::vector<Z> coleman_norm_p3(const std::vector<Z>& f) {
    Poly3 F;
    for (auto& c : f) F.push_back({c, 0});
    Poly3 prod{E3{1, 0}};
    for (E3 z : {E3{1, 0}, E3{0, 1}, E3{-1, -1}}) prod = mul(prod, compose(F, {E3{z.a - 1, z.b}, z}));
    std::vector<Z> h;
    for (auto& e : prod) {
        if (e.b != 0) return {};
        h.push_back(e.a);
    }
    // (1+T)^3 - 1 = 3T + 3T^2 + T^3: peel g from the top degree down
    std::size_t deg = f.size() - 1;
    std::vector<Z> g(deg + 1, 0), u{0, 3, 3, 1};
    std::vector<Z> rem = h;
    for (std::size_t k = deg + 1; k-- > 0;) {
        std::vector<Z> uk{1};
        for (std::size_t i = 0; i < k; ++i) {
            std::vector<Z> t(uk.size() + 3, 0);
            for (std::size_t a = 0; a < uk.size(); ++a)
                for (std::size_t b = 0; b < 4; ++b) t[a + b] += uk[a] * u[b];
            uk = t;
        }
        g[k] = rem[3 * k];
        for (std::size_t i = 0; i < uk.size(); ++i) rem[i] -= g[k] * uk[i];
    }
    for (auto& r : rem)
        if (r != 0) return {};
    return g;
}

// ---- groups and permutation actions

// Orbits of the subgroup H (list of permutations of {0..n-1}) by Burnside's lemma.
inline std::size_t burnside_orbits(const std::vector<std::vector<std::size_t>>& H) {
    std::size_t fixed = 0;
    for (auto& h : H)
        for (std::size_t i = 0; i < h.size(); ++i) fixed += h[i] == i;
    return fixed / H.size();
}

// dim_F_l of vectors fixed by all matrices in gens, by enumerating F_l^d (small cases only).
inline unsigned fixed_dim_enumerate(const std::vector<std::vector<std::vector<i64>>>& gens, i64 l, std::size_t d) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= static_cast<std::size_t>(l);
    std::size_t count = 0;
    std::vector<i64> v(d);
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        for (std::size_t i = 0; i < d; ++i) v[i] = static_cast<i64>(c % l), c /= l;
        bool fixed = true;
        for (auto& M : gens) {
            for (std::size_t i = 0; i < d && fixed; ++i) {
                i64 s = 0;
                for (std::size_t j = 0; j < d; ++j) s += M[i][j] * v[j];
                if (mod(s, l) != v[i]) fixed = false;
            }
            if (!fixed) break;
        }
        count += fixed;
    }
    unsigned k = 0;
    for (std::size_t x = 1; x < count; x *= static_cast<std::size_t>(l)) ++k;
    return k;
}

}  // namespace oracle
