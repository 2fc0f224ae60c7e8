// Generalized Bernoulli numbers, complex L-values at 0 and -1, p-adic L-values, and the cache.

#include <catch_amalgamated.hpp>

#include <filesystem>

#include "oracles/brute.hpp"
#include "ptower/lvalues/padic_l.hpp"

using namespace ptower;

namespace {
DirichletChar quad(i64 d) {
    auto F = quadratic_field(d);
    for (auto& x : F.characters())
        if (!x.is_trivial()) return x;
    throw std::logic_error("trivial field");
}
BigRational rational(const CycloElem& x) {
    REQUIRE(x.is_rational());
    return x.coeff(0);
}
}  // namespace

TEST_CASE("quadratic Bernoulli numbers match the defining sums", "[lvalues]") {
    for (i64 d = -40; d <= 40; ++d) {
        if (d == 0 || d == 1 || !oracle::is_squarefree(d)) continue;
        auto chi = quad(d);
        i64 D = oracle::discriminant(d);
        REQUIRE(rational(bernoulli_B1(chi)) == oracle::B1_quadratic(D));
        REQUIRE(rational(bernoulli_B2(chi)) == oracle::B2_quadratic(D));
    }
}

TEST_CASE("parity kills the wrong Bernoulli numbers", "[lvalues]") {
    for (u64 m : {7, 9, 15, 16}) {
        auto F = cyclotomic_field(m);
        for (auto& chi : F.characters()) {
            if (chi.is_trivial()) continue;
            if (chi.is_odd()) REQUIRE(bernoulli_B2(chi).is_zero());
            else REQUIRE(bernoulli_B1(chi).is_zero());
        }
    }
}

TEST_CASE("L(0) of imaginary quadratic characters is 2h/w", "[lvalues]") {
    for (i64 d = -1; d >= -150; --d) {
        if (!oracle::is_squarefree(d)) continue;
        i64 D = oracle::discriminant(d);
        int w = D == -3 ? 6 : D == -4 ? 4 : 2;
        auto L0 = L_at_0(quad(d));
        REQUIRE_FALSE(L0.vanishes_by_parity);
        BigRational want(2 * oracle::class_number_forms(D), w);
        want.canonicalize();
        REQUIRE(rational(L0.exact) == want);
    }
}

TEST_CASE("zeta(-1) and L(-1, chi) from Bernoulli numbers", "[lvalues]") {
    auto B = oracle::bernoulli(2);
    REQUIRE(rational(L_at_minus1(DirichletChar::trivial()).exact) == -B[2] / 2);
    for (i64 d : {2, 3, 5, 13}) REQUIRE(rational(L_at_minus1(quad(d)).exact) == -oracle::B2_quadratic(oracle::discriminant(d)) / 2);
    REQUIRE(L_at_0(quad(5)).vanishes_by_parity);
}

TEST_CASE("p-adic L-values of even quadratic characters", "[lvalues]") {
    // L_p(0, chi) = -(1 - chi w^{-1}(p)) B_{1, chi w^{-1}}; for p = 3, w^{-1} is the character of
    // Q(sqrt -3). L_p(-1, chi) = -(1 - chi(p) p) B_{2, chi} / 2 for p = 3 (w^{-2} trivial).
    for (i64 d : {2, 5, 7, 13, 17}) {
        i64 D = oracle::discriminant(d);
        i64 Dt = D % 3 == 0 ? -D / 3 : -3 * D;  // discriminant of chi * chi_{-3}
        Dt = oracle::discriminant([&] {
            i64 t = Dt;
            for (i64 q = 2; q * q <= (t < 0 ? -t : t); ++q)
                while (t % (q * q) == 0) t /= q * q;
            return t;
        }());
        auto s0 = Lp_exact(quad(d), 0, 3);
        REQUIRE(rational(s0.value) == -(1 - oracle::kronecker(Dt, 3)) * oracle::B1_quadratic(Dt));
        auto s1 = Lp_exact(quad(d), -1, 3);
        REQUIRE(rational(s1.value) == -(1 - 3 * oracle::kronecker(D, 3)) * oracle::B2_quadratic(D) / 2);
    }
}

TEST_CASE("Bernoulli cache persists and re-serves values", "[lvalues]") {
    auto dir = std::filesystem::temp_directory_path() / "ptower_test_cache";
    std::filesystem::remove_all(dir);
    auto path = dir / "bernoulli.cache";
    CycloElem first;
    {
        BernoulliCache c(path, bernoulli_rederive);
        first = bernoulli_B1(quad(-23), &c);
        REQUIRE(c.hits() == 0);
    }
    {
        BernoulliCache c(path, bernoulli_rederive);
        REQUIRE(c.loaded() >= 1);
        REQUIRE(bernoulli_B1(quad(-23), &c) == first);
        REQUIRE(c.hits() == 1);
        REQUIRE_FALSE(c.corruption_detected());
    }
    std::filesystem::remove_all(dir);
}
