// Finite p-groups, F_l-modules and the fixed-point congruences, against naive enumeration.

#include <catch_amalgamated.hpp>

#include <set>

#include "oracles/brute.hpp"
#include "ptower/groupcong/module.hpp"

using namespace ptower;

namespace {

// Naive closure of a generating set under the group law.
std::vector<bool> naive_closure(const FiniteGroup& G, const std::vector<std::size_t>& gens) {
    std::vector<bool> in(G.size(), false);
    std::vector<std::size_t> list{G.identity()};
    in[G.identity()] = true;
    for (std::size_t i = 0; i < list.size(); ++i)
        for (auto g : gens) {
            auto h = G.mul(list[i], g);
            if (!in[h]) in[h] = true, list.push_back(h);
        }
    return in;
}

// All subgroups generated by at most `r` elements.
std::set<std::vector<bool>> naive_subgroups(const FiniteGroup& G, unsigned r) {
    std::set<std::vector<bool>> out;
    std::size_t n = G.size();
    out.insert(naive_closure(G, {}));
    for (std::size_t a = 0; a < n; ++a) {
        out.insert(naive_closure(G, {a}));
        if (r < 2) continue;
        for (std::size_t b = a + 1; b < n; ++b) {
            out.insert(naive_closure(G, {a, b}));
            if (r < 3) continue;
            for (std::size_t c = b + 1; c < n; ++c) out.insert(naive_closure(G, {a, b, c}));
        }
    }
    return out;
}

std::vector<std::vector<oracle::i64>> as_matrix(const FlMatrix& m) {
    std::vector<std::vector<oracle::i64>> r(m.n, std::vector<oracle::i64>(m.n));
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.n; ++j) r[i][j] = m.at(i, j);
    return r;
}

}  // namespace

TEST_CASE("builtin groups and their subgroup lattices", "[groupcong]") {
    struct Case { std::string name; std::size_t order; unsigned rank; };
    for (auto c : std::vector<Case>{{"z9", 9, 1}, {"z2xz2", 4, 2}, {"z2xz2xz2", 8, 3}, {"z4xz2", 8, 2}, {"d4", 8, 2}, {"q8", 8, 2}, {"z3xz3", 9, 2}, {"heisenberg3", 27, 2}}) {
        auto G = builtin_group(c.name);
        REQUIRE(G.size() == c.order);
        auto subs = all_subgroups(G);
        // every subgroup of these groups needs at most `rank` generators
        REQUIRE(subs.size() == naive_subgroups(G, c.rank).size());
        for (auto& H : subs) REQUIRE(G.is_subgroup(H));
    }
    REQUIRE(subgroups_up_to_index(builtin_group("z9"), 3).subgroups.size() == 2);
    REQUIRE(all_subgroups(builtin_group("q8")).size() == 6);
    REQUIRE(all_subgroups(builtin_group("d4")).size() == 10);
    REQUIRE(all_subgroups(builtin_group("heisenberg3")).size() == 19);
}

TEST_CASE("N_n is the intersection of subgroups of index <= p^n", "[groupcong]") {
    for (auto name : {"z9", "z27", "z3xz3", "d4", "q8", "heisenberg3"}) {
        auto G = builtin_group(name);
        auto subs = all_subgroups(G);
        for (unsigned n = 0; n <= G.log_order(); ++n) {
            Subset want = G.all();
            for (auto& H : subs)
                if (G.size() / H.count() <= ipow(G.p(), n)) want &= H;
            REQUIRE(compute_Nn(G, n) == want);
            REQUIRE(G.is_normal(want));
        }
    }
    REQUIRE(compute_Nn(builtin_group("z9"), 1).count() == 3);
    REQUIRE(compute_Nn(builtin_group("z3xz3"), 1).count() == 1);
}

TEST_CASE("fixed points of permutation modules count orbits", "[groupcong]") {
    for (auto name : {"z8", "z4xz2", "d4", "q8", "z3xz3", "heisenberg3"}) {
        auto G = builtin_group(name);
        auto subs = all_subgroups(G);
        u64 l = G.p() == 2 ? 3 : 2;
        for (auto& U : subs) {
            auto A = permutation_module(G, U, l);
            auto C = cosets(G, U);
            for (auto& H : subs) {
                // Burnside on the action of H on G/U by left multiplication
                std::vector<std::vector<std::size_t>> perms;
                for (auto h : G.elements(H)) {
                    std::vector<std::size_t> perm(C.reps.size());
                    for (std::size_t c = 0; c < C.reps.size(); ++c) perm[c] = C.coset_of[G.mul(h, C.reps[c])];
                    perms.push_back(perm);
                }
                auto orbits = oracle::burnside_orbits(perms);
                REQUIRE(orbit_count(G, U, H) == orbits);
                REQUIRE(fixed_points_dim(G, A, H) == orbits);
            }
        }
    }
}

TEST_CASE("fixed-point dimensions by enumerating vectors", "[groupcong]") {
    for (auto [name, l] : std::vector<std::pair<std::string, u64>>{{"z4", 3}, {"z2xz2", 3}, {"d4", 3}, {"q8", 3}, {"z9", 2}, {"z3xz3", 2}}) {
        auto G = builtin_group(name);
        std::vector<ModRep> mods{regular_module(G, l)};
        if (G.is_cyclic()) mods.push_back(cyclotomic_module(G, l));
        for (auto& A : mods) {
            for (auto& H : all_subgroups(G)) {
                std::vector<std::vector<std::vector<oracle::i64>>> gens;
                for (auto h : G.generators_of(H)) gens.push_back(as_matrix(A.rho(h)));
                REQUIRE(fixed_points_dim(G, A, H) == oracle::fixed_dim_enumerate(gens, static_cast<oracle::i64>(l), A.dim()));
            }
        }
    }
}

TEST_CASE("the fixed-point congruence over the corpus", "[groupcong]") {
    std::size_t triples = 0;
    for (auto& name : builtin_corpus_groups()) {
        auto G = builtin_group(name);
        std::vector<u64> ls;
        for (u64 l : {2, 3, 5, 7})
            if (l != G.p()) ls.push_back(l);
        auto R = run_corpus(G, ls, "perm");
        INFO(name);
        REQUIRE(R.ok());
        REQUIRE(R.orbit_mismatches == 0);
        for (auto& v : R.verdicts) {
            // independent check of the congruence on the reported dimensions
            BigInt diff = BigInt(static_cast<long>(v.dim_A)) - BigInt(static_cast<long>(v.dim_AH));
            if (v.status == "pass") REQUIRE(mod_floor(diff, big_pow(v.p, v.n)) == 0);
        }
        triples += R.verdicts.size();
    }
    REQUIRE(triples >= 200);
}

TEST_CASE("invalid groups and modules are rejected", "[groupcong]") {
    auto G = builtin_group("z9");
    REQUIRE_THROWS_WITH(regular_module(G, 3), "l must differ from p");
    REQUIRE_THROWS_AS(builtin_group("z6"), UsageError);
    REQUIRE_THROWS_AS(builtin_group("z512"), ResourceError);
    REQUIRE_THROWS_AS(FiniteGroup("bad", 2, {0, 1, 1, 1}), UsageError);
    // a matrix that does not satisfy g^9 = 1
    FlMatrix m = FlMatrix::identity(1);
    m.at(0, 0) = 1;
    REQUIRE_NOTHROW(ModRep(G, 2, {m}, "trivial"));
    FlMatrix bad = FlMatrix::identity(2);
    bad.at(0, 1) = 1;  // unipotent of order 5 mod 5
    REQUIRE_THROWS_AS(ModRep(G, 5, {bad}, "bad"), UsageError);
}
