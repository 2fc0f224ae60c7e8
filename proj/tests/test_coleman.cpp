// Coleman norm operator: exact small cases against a naive Z[zeta_3] computation, and the
// defining identity, multiplicativity and convergence properties on random unit series.

#include <catch_amalgamated.hpp>

#include <random>

#include "oracles/brute.hpp"
#include "ptower/coleman/io.hpp"
#include "ptower/coleman/norm.hpp"

using namespace ptower;

namespace {
std::vector<BigInt> ints(const TruncSeries& s) {
    std::vector<BigInt> v;
    for (auto& c : s.c) v.push_back(c[0]);
    return v;
}
}  // namespace

TEST_CASE("exact norms of small polynomials", "[coleman]") {
    auto R = CoeffRing::make(3, 1, 0);
    auto f = TruncSeries::from_ints(R, {1, 3});
    auto g = coleman_norm(f);
    REQUIRE(ints(g) == std::vector<BigInt>{19, 27});
    REQUIRE(g.ledger.losses.empty());
    REQUIRE(g.str() == "19 + 27T");
    REQUIRE(ints(coleman_norm(TruncSeries::from_ints(R, {1, 1}))) == std::vector<BigInt>{1, 1});
}

TEST_CASE("exact norms agree with the naive product over Z[zeta_3]", "[coleman]") {
    auto R = CoeffRing::make(3, 1, 0);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 40; ++t) {
        std::size_t deg = 1 + rng() % 4;
        std::vector<BigInt> a(deg + 1);
        for (auto& x : a) x = static_cast<long>(rng() % 19) - 9;
        if (a[0] % 3 == 0) a[0] += 1;
        if (a[deg] == 0) a[deg] = 2;
        auto want = oracle::coleman_norm_p3(a);
        REQUIRE(want.size() == a.size());
        REQUIRE(ints(coleman_norm(TruncSeries::from_ints(R, a))) == want);
        // modular reduction commutes with the norm
        auto Rm = CoeffRing::make(3, 1, 6);
        auto gm = coleman_norm(TruncSeries::from_ints(Rm, a));
        for (std::size_t i = 0; i < want.size(); ++i) REQUIRE(mod_floor(gm.c[i][0] - want[i], BigInt(729)) == 0);
    }
}

TEST_CASE("defining identity and multiplicativity on random units", "[coleman]") {
    std::mt19937_64 rng(17);
    for (auto [p, m] : std::vector<std::pair<u64, u64>>{{3, 1}, {2, 3}}) {
        auto R = CoeffRing::make(p, m, 6);
        for (int t = 0; t < 4; ++t) {
            auto f = random_unit_series(R, 40, rng), g = random_unit_series(R, 40, rng);
            auto Nf = coleman_norm(f), Ng = coleman_norm(g);
            REQUIRE(agreement(compose_phi(Nf, 1), norm_product(f, 1)) >= 6);
            REQUIRE(agreement(coleman_norm(f * g), Nf * Ng) >= 6);
        }
    }
}

TEST_CASE("iterates converge at the stated rate and evaluate to finite products", "[coleman]") {
    std::mt19937_64 rng(23);
    for (auto [p, m] : std::vector<std::pair<u64, u64>>{{3, 1}, {2, 3}}) {
        auto R = CoeffRing::make(p, m, 6);
        auto f = random_unit_series(R, 30, rng);
        auto it = coleman_iterate(f, 0, 6);
        REQUIRE(it.rate_ok);
        REQUIRE(it.certified == 6);
        REQUIRE(it.d == R->residue_degree());
        for (std::size_t i = 0; i + 1 < it.iterates.size(); ++i)
            for (std::size_t j = i + 1; j < it.iterates.size(); ++j) REQUIRE(agreement(it.iterates[i], it.iterates[j]) >= std::min<i64>(6, static_cast<i64>(i) + 1));
        auto L = lemma3_eval(f, 0, 0, 6, 5);
        REQUIRE(L.agreement.size() == 5);
        REQUIRE(L.agreement.back() >= 4);
    }
}

TEST_CASE("bad inputs are rejected", "[coleman]") {
    REQUIRE_THROWS_AS(CoeffRing::make(4, 1, 6), UsageError);
    REQUIRE_THROWS_AS(CoeffRing::make(3, 3, 6), UsageError);
    auto R = CoeffRing::make(3, 1, 6);
    REQUIRE_THROWS_AS(coleman_norm(TruncSeries::from_ints(R, {3, 1})), UsageError);
    // a truncated series too short for the requested precision
    auto s = TruncSeries::from_ints(R, {1, 1, 2}, false);
    REQUIRE_THROWS_AS(coleman_iterate(s, 1, 6), PrecisionError);
}

TEST_CASE("series JSON round-trips", "[coleman]") {
    std::mt19937_64 rng(3);
    auto R = CoeffRing::make(2, 3, 5);
    auto f = random_unit_series(R, 12, rng);
    auto g = series_from_json(series_to_json(f));
    REQUIRE(agreement(f, g) >= 5);
    REQUIRE(g.ring->same_as(*R));
    REQUIRE_THROWS_AS(series_from_json(nlohmann::json::parse(R"({"ring":{"p":3,"pN":"5^2"},"coeffs":["1"]})")), UsageError);
}
