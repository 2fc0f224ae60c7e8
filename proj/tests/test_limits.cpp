// Certified p-adic limits along towers and the identities relating them.

#include <catch_amalgamated.hpp>

#include "oracles/brute.hpp"
#include "ptower/limits/limits.hpp"

using namespace ptower;

namespace {
const UnitIndexPolicy kAuto = UnitIndexPolicy::parse("auto");
LimitOptions opts(i64 target, unsigned max_level = 0) {
    LimitOptions o;
    o.target = target;
    o.max_level = max_level;
    return o;
}
DirichletChar quad(i64 d) {
    auto F = quadratic_field(d);
    for (auto& x : F.characters())
        if (!x.is_trivial()) return x;
    throw std::logic_error("trivial");
}
}  // namespace

TEST_CASE("h_infinity^- is the limit of the oracle class numbers", "[limits]") {
    for (auto [k, p, m0] : std::vector<std::tuple<std::string, u64, i64>>{{"Qzeta:3", 3, 3}, {"Qzeta:4", 2, 4}}) {
        TowerSpec T(parse_field(k), p);
        auto L = hminus_limit(T, kAuto, 3, default_max_level(p));
        REQUIRE(L.cert.certified >= 3);
        REQUIRE_FALSE(L.cert.provenance.empty());
        // every oracle h_n^- here is prime to p, and h_n^- == h_inf mod p^n
        i64 m = m0 * static_cast<i64>(ipow(p, 4));
        auto h4 = oracle::hminus_prime_power_cyclotomic(m);
        REQUIRE(vp(h4, p) == 0);
        REQUIRE(agreement(L.cert.value, PadicNumber::from_int(h4, p, 10)) >= std::min<i64>(L.cert.certified, 4));
    }
}

TEST_CASE("the identity web holds for Q(mu_3), p = 3", "[limits]") {
    TowerSpec T(parse_field("Qzeta:3"), 3);
    auto L = tower_limits(T, kAuto, opts(3));
    REQUIRE(L.gating_ok());
    bool example1 = false;
    for (auto& c : L.identities) {
        INFO(c.name << ": " << c.lhs << " vs " << c.rhs);
        REQUIRE((c.ok || !c.gating));
        REQUIRE(c.precision >= 3);
        example1 = example1 || c.name == "example1: h=2*rho_tilde";
    }
    REQUIRE(example1);
    REQUIRE(L.k2);
    REQUIRE(L.k2->orders.front() == 2);  // K_2(Z)
    REQUIRE(L.k2->w2_growth_ok);
}

TEST_CASE("hypothesis violation gives an exact zero limit", "[limits]") {
    TowerSpec T(parse_field("Qsqrt:-11"), 3);
    auto L = tower_limits(T, kAuto, opts(3));
    REQUIRE(L.h.ladder.cert.exact);
    REQUIRE(L.h.ladder.cert.value.is_exact_zero());
    REQUIRE(L.h.witness);
    REQUIRE(L.gating_ok());
}

TEST_CASE("script L is independent of s", "[limits]") {
    for (auto [d, p] : std::vector<std::pair<i64, u64>>{{3, 5}, {2, 3}}) {
        auto S = script_L(quad(d), p, opts(3, 4));
        REQUIRE(S.s_independence.ok);
        REQUIRE(S.rational_ok);
        for (auto [n, a] : S.level_agreement) REQUIRE(a >= static_cast<i64>(n));
    }
}

TEST_CASE("c_p: ratio 2 and a unit", "[limits]") {
    for (u64 p : {2, 3, 5}) {
        auto C = c_p_limit(p, opts(3));
        REQUIRE(C.ratio.ok);
        REQUIRE(C.rational_ok);
        REQUIRE(C.c_p.value.valuation() == 0);
    }
}

TEST_CASE("powers 2^{p^n} converge to the Teichmuller lift of 2", "[limits]") {
    for (u64 p : {3, 5, 7}) {
        auto c = two_power_check(p, 1, 8);
        REQUIRE(c.ok);
        for (std::size_t n = 0; n < c.seq.size(); ++n) REQUIRE(agreement(c.seq[n], c.limit) >= static_cast<i64>(n) + 1);
    }
}

TEST_CASE("K_2 orders of real quadratic fields from Birch-Tate", "[limits]") {
    auto B = oracle::bernoulli(2);
    REQUIRE(k2_order(parse_field("Q")) == 2);
    for (i64 d : {2, 3, 5, 6, 7, 13, 17}) {
        // #K_2 = w_2 |zeta_F(-1)|, zeta_F(-1) = zeta(-1) L(-1, chi_D) = (B_2 / 2)(B_{2,chi} / 2)
        oracle::Q z = B[2] * oracle::B2_quadratic(oracle::discriminant(d)) / 4;
        oracle::Q want = z * oracle::w2_quadratic(d);
        if (want < 0) want = -want;
        REQUIRE(want.get_den() == 1);
        INFO("d = " << d);
        REQUIRE(k2_order(quadratic_field(d)) == want.get_num());
    }
}
