// Integer helpers, p-adic numbers and cyclotomic arithmetic against brute-force computation.

#include <catch_amalgamated.hpp>

#include <random>

#include "oracles/brute.hpp"
#include "ptower/arith/padic.hpp"
#include "ptower/arith/cyclo.hpp"

using namespace ptower;

namespace {

std::vector<BigInt> poly_mul(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
    std::vector<BigInt> r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

// Phi_m by dividing x^m - 1 by prod_{d | m, d < m} Phi_d (recursive, exact long division).
std::vector<BigInt> cyclotomic_brute(u64 m) {
    std::vector<BigInt> num(m + 1, 0);
    num[0] = -1, num[m] = 1;
    std::vector<BigInt> den{1};
    for (u64 d = 1; d < m; ++d)
        if (m % d == 0) den = poly_mul(den, cyclotomic_brute(d));
    std::vector<BigInt> q(num.size() - den.size() + 1, 0);
    for (std::size_t i = q.size(); i-- > 0;) {
        q[i] = num[i + den.size() - 1];
        for (std::size_t j = 0; j < den.size(); ++j) num[i + j] -= q[i] * den[j];
    }
    return q;
}

}  // namespace

TEST_CASE("integer helpers agree with trial division", "[arith]") {
    for (u64 n = 1; n <= 2000; ++n) {
        u64 phi = 0;
        for (u64 a = 1; a <= n; ++a) phi += std::gcd(a, n) == 1;
        REQUIRE(euler_phi(n) == phi);
        bool prime = n > 1;
        for (u64 d = 2; d * d <= n; ++d)
            if (n % d == 0) prime = false;
        REQUIRE(is_prime(n) == prime);
        u64 prod = 1;
        for (auto [q, e] : factor(n)) prod *= ipow(q, e);
        REQUIRE(prod == n);
    }
    REQUIRE(mult_order(2, 7) == 3);
    REQUIRE(kappa(2) == 5);
    REQUIRE(kappa(7) == 8);
    REQUIRE(vp(BigInt(648), 3) == 4);
    REQUIRE(mod_floor(BigInt(-7), BigInt(3)) == 2);
}

TEST_CASE("cyclotomic polynomials match long division of x^m - 1", "[arith]") {
    for (u64 m : {1, 2, 3, 4, 6, 9, 12, 15, 16, 20, 27, 30, 36, 45, 105}) {
        auto want = cyclotomic_brute(m);
        auto got = cyclotomic(m);
        REQUIRE(got->deg == euler_phi(m));
        REQUIRE(got->coef.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) REQUIRE(BigInt(static_cast<long>(got->coef[i])) == want[i]);
    }
}

TEST_CASE("cyclotomic field arithmetic", "[arith]") {
    for (u64 m : {3, 4, 5, 8, 9, 12, 15}) {
        auto z = CycloElem::root_of_unity(m, 1);
        CycloElem pw = CycloElem::from_rational(m, 1);
        for (u64 i = 0; i < m; ++i) pw = pw * z;
        REQUIRE(pw == CycloElem::from_rational(m, 1));
        // sum of all m-th roots of unity vanishes
        CycloElem s = CycloElem::from_rational(m, 0);
        for (u64 i = 0; i < m; ++i) s = s + CycloElem::root_of_unity(m, i);
        REQUIRE(s.is_zero());
    }
    // N(1 - zeta_{q^k}) = q; N(a + b zeta_3) = a^2 - ab + b^2
    for (u64 m : {3, 4, 5, 8, 9, 25, 27})
        REQUIRE(norm_to_Q(CycloElem::from_rational(m, 1) - CycloElem::root_of_unity(m, 1)) == BigRational(factor(m)[0].first));
    for (int a = -4; a <= 4; ++a)
        for (int b = -4; b <= 4; ++b) {
            auto x = CycloElem::from_rational(3, a) + BigRational(b) * CycloElem::root_of_unity(3, 1);
            REQUIRE(norm_to_Q(x) == BigRational(a * a - a * b + b * b));
        }
    // Galois action permutes roots
    auto z = CycloElem::root_of_unity(12, 1);
    REQUIRE(z.galois(5) == CycloElem::root_of_unity(12, 5));
}

TEST_CASE("p-adic numbers reduce rationals faithfully", "[arith]") {
    std::mt19937_64 rng(11);
    for (u64 p : {2, 3, 5, 7}) {
        const int N = 12;
        for (int t = 0; t < 200; ++t) {
            long a = static_cast<long>(rng() % 20001) - 10000, b = static_cast<long>(rng() % 999) + 1;
            long c = static_cast<long>(rng() % 20001) - 10000, d = static_cast<long>(rng() % 999) + 1;
            if (a == 0 || c == 0) continue;
            BigRational x(a, b), y(c, d);
            x.canonicalize(), y.canonicalize();
            auto X = PadicNumber::from_rational(x, p, N), Y = PadicNumber::from_rational(y, p, N);
            // brute force: p^{-v} x * den == num mod p^prec after clearing the unit part
            BigInt num = x.get_num(), den = x.get_den();
            int v = vp(num, p) - vp(den, p);
            REQUIRE(X.valuation() == v);
            BigInt u = X.unit();
            strip(num, p), strip(den, p);
            REQUIRE(X.precision() > 0);
            REQUIRE(mod_floor(u * den - num, big_pow(p, static_cast<unsigned long>(X.precision()))) == 0);
            for (auto [got, want] : {std::pair<PadicNumber, BigRational>{X * Y, x * y}, std::pair<PadicNumber, BigRational>{X / Y, x / y}}) {
                auto W = PadicNumber::from_rational(want, p, N);
                REQUIRE(agreement(got, W) >= std::min(got.absolute_precision(), W.absolute_precision()));
            }
            BigRational s = x + y;
            if (s != 0) {
                auto S = X + Y;
                REQUIRE(agreement(S, PadicNumber::from_rational(s, p, N)) >= S.absolute_precision());
            }
        }
    }
}

TEST_CASE("Teichmuller lifts are roots of unity congruent to a", "[arith]") {
    for (u64 p : {3, 5, 7, 11}) {
        for (long a = 1; a < static_cast<long>(p); ++a) {
            auto w = teichmuller(BigInt(a), p, 10);
            REQUIRE(mod_floor(w.residue() - a, BigInt(p)) == 0);
            auto one = PadicNumber::from_int(BigInt(1), p, 10);
            REQUIRE(agreement(w.pow(static_cast<i64>(p - 1)), one) >= 10);
        }
    }
}
