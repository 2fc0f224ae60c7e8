#pragma once
// Finite F_l[G]-modules given by one matrix per generator, fixed-point dimensions, and the
// fixed-point congruences #A == #A^H mod p^n for H inside N_n.

#include <optional>

#include "../arith/parallel.hpp"
#include "group.hpp"

namespace ptower {

// Square matrix over F_l, row-major.
struct FlMatrix {
    std::size_t n = 0;
    std::vector<std::uint32_t> a;

    static FlMatrix identity(std::size_t n) {
        FlMatrix m{n, std::vector<std::uint32_t>(n * n, 0)};
        for (std::size_t i = 0; i < n; ++i) m.a[i * n + i] = 1;
        return m;
    }
    std::uint32_t at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
    std::uint32_t& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
    bool operator==(const FlMatrix&) const = default;
};

inline FlMatrix mat_mul(const FlMatrix& x, const FlMatrix& y, u64 l) {
    std::size_t n = x.n;
    FlMatrix r{n, std::vector<std::uint32_t>(n * n, 0)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            u64 c = x.at(i, k);
            if (!c) continue;
            for (std::size_t j = 0; j < n; ++j)
                if (y.at(k, j)) r.at(i, j) = static_cast<std::uint32_t>((r.at(i, j) + c * y.at(k, j)) % l);
        }
    return r;
}

// Rank over F_l of the rows given.
inline std::size_t rank_mod(std::vector<std::vector<std::uint32_t>> rows, std::size_t cols, u64 l) {
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        std::size_t piv = r;
        while (piv < rows.size() && rows[piv][c] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[r], rows[piv]);
        u64 inv = powmod(rows[r][c], l - 2, l);
        for (auto& x : rows[r]) x = static_cast<std::uint32_t>(x * inv % l);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] == 0) continue;
            u64 f = rows[i][c];
            for (std::size_t j = c; j < cols; ++j) rows[i][j] = static_cast<std::uint32_t>((rows[i][j] + (l - f) * rows[r][j]) % l);
        }
        ++r;
    }
    return r;
}

class ModRep {
public:
    // Matrices act on column vectors, one per designated generator of G; the relations of G are
    // checked by walking the multiplication table.
    ModRep(const FiniteGroup& G, u64 l, std::vector<FlMatrix> gen_mats, std::string name) : l_(l), name_(std::move(name)) {
        if (!is_prime(l)) throw UsageError("l must be prime");
        if (l == G.p()) throw UsageError("l must differ from p");
        if (gen_mats.size() != G.generators().size()) throw UsageError("one matrix per group generator is required");
        dim_ = gen_mats.empty() ? 0 : gen_mats[0].n;
        for (auto& m : gen_mats) {
            if (m.n != dim_ || m.a.size() != dim_ * dim_) throw UsageError("module matrices must be square of equal size");
            for (auto x : m.a)
                if (x >= l) throw UsageError("matrix entry not reduced mod l");
        }
        rho_.assign(G.size(), FlMatrix{});
        std::vector<bool> set(G.size(), false);
        rho_[G.identity()] = FlMatrix::identity(dim_);
        set[G.identity()] = true;
        std::vector<std::size_t> order{G.identity()};
        for (std::size_t i = 0; i < order.size(); ++i) {
            std::size_t x = order[i];
            for (std::size_t s = 0; s < G.generators().size(); ++s) {
                std::size_t y = G.mul(x, G.generators()[s]);
                FlMatrix m = mat_mul(rho_[x], gen_mats[s], l);
                if (!set[y]) {
                    rho_[y] = std::move(m);
                    set[y] = true;
                    order.push_back(y);
                } else if (!(rho_[y] == m)) {
                    throw UsageError("module " + name_ + " does not respect the group relations");
                }
            }
        }
    }

    u64 l() const { return l_; }
    std::size_t dim() const { return dim_; }
    const std::string& name() const { return name_; }
    const FlMatrix& rho(std::size_t g) const { return rho_[g]; }

private:
    u64 l_;
    std::size_t dim_ = 0;
    std::string name_;
    std::vector<FlMatrix> rho_;
};

// Left cosets xU, numbered by first appearance; coset_of[g] = index of gU.
struct CosetSpace {
    std::vector<std::size_t> coset_of;
    std::vector<std::size_t> reps;
};

inline CosetSpace cosets(const FiniteGroup& G, const Subset& U) {
    CosetSpace C;
    C.coset_of.assign(G.size(), SIZE_MAX);
    auto us = G.elements(U);
    for (std::size_t x = 0; x < G.size(); ++x) {
        if (C.coset_of[x] != SIZE_MAX) continue;
        std::size_t c = C.reps.size();
        C.reps.push_back(x);
        for (auto u : us) C.coset_of[G.mul(x, u)] = c;
    }
    return C;
}

// F_l[G/U], g acting by left multiplication on cosets.
inline ModRep permutation_module(const FiniteGroup& G, const Subset& U, u64 l) {
    CosetSpace C = cosets(G, U);
    std::size_t d = C.reps.size();
    std::vector<FlMatrix> mats;
    for (auto g : G.generators()) {
        FlMatrix m{d, std::vector<std::uint32_t>(d * d, 0)};
        for (std::size_t c = 0; c < d; ++c) m.at(C.coset_of[G.mul(g, C.reps[c])], c) = 1;
        mats.push_back(std::move(m));
    }
    return ModRep(G, l, std::move(mats), "F_" + std::to_string(l) + "[G/U], |U|=" + std::to_string(U.count()) + " " + subset_str(G, U));
}

inline ModRep regular_module(const FiniteGroup& G, u64 l) {
    ModRep r = permutation_module(G, G.trivial(), l);
    return ModRep(G, l, [&] {
        std::vector<FlMatrix> m;
        for (auto g : G.generators()) m.push_back(r.rho(g));
        return m;
    }(), "F_" + std::to_string(l) + "[G] (regular)");
}

inline ModRep tensor_module(const FiniteGroup& G, const ModRep& A, const ModRep& B) {
    require(A.l() == B.l(), "tensor of modules over different fields");
    std::size_t da = A.dim(), db = B.dim(), d = da * db;
    std::vector<FlMatrix> mats;
    for (auto g : G.generators()) {
        const FlMatrix &x = A.rho(g), &y = B.rho(g);
        FlMatrix m{d, std::vector<std::uint32_t>(d * d, 0)};
        for (std::size_t i = 0; i < da; ++i)
            for (std::size_t j = 0; j < da; ++j) {
                if (!x.at(i, j)) continue;
                for (std::size_t k = 0; k < db; ++k)
                    for (std::size_t t = 0; t < db; ++t)
                        m.at(i * db + k, j * db + t) = static_cast<std::uint32_t>(static_cast<u64>(x.at(i, j)) * y.at(k, t) % A.l());
            }
        mats.push_back(std::move(m));
    }
    return ModRep(G, A.l(), std::move(mats), "(" + A.name() + ") (x) (" + B.name() + ")");
}

// For cyclic G of order q: F_l[x]/(Phi_q(x)), the generator acting by multiplication by x.
inline ModRep cyclotomic_module(const FiniteGroup& G, u64 l) {
    if (!G.is_cyclic() || G.generators().size() != 1) throw UsageError("cyclotomic module needs a cyclic group with one generator");
    std::size_t q = G.size(), qp = q / G.p();
    // Phi_q(x) = sum_{i<p} x^{i q/p}; companion matrix of the monic Phi_q
    std::size_t d = q - qp;
    std::vector<std::uint32_t> phi(d + 1, 0);
    for (u64 i = 0; i < G.p(); ++i) phi[i * qp] = 1;
    FlMatrix m{d, std::vector<std::uint32_t>(d * d, 0)};
    for (std::size_t i = 1; i < d; ++i) m.at(i, i - 1) = 1;
    for (std::size_t i = 0; i < d; ++i) m.at(i, d - 1) = static_cast<std::uint32_t>((l - phi[i] % l) % l);
    return ModRep(G, l, {m}, "F_" + std::to_string(l) + "[x]/Phi_" + std::to_string(q));
}

// dim A^H: common kernel of rho(h) - 1 over generators of H.
inline std::size_t fixed_points_dim(const FiniteGroup& G, const ModRep& A, const Subset& H) {
    std::vector<std::vector<std::uint32_t>> rows;
    std::size_t d = A.dim();
    for (auto h : G.generators_of(H)) {
        const FlMatrix& m = A.rho(h);
        for (std::size_t i = 0; i < d; ++i) {
            std::vector<std::uint32_t> r(d);
            for (std::size_t j = 0; j < d; ++j) r[j] = static_cast<std::uint32_t>((m.at(i, j) + (i == j ? A.l() - 1 : 0)) % A.l());
            rows.push_back(std::move(r));
        }
    }
    return d - rank_mod(std::move(rows), d, A.l());
}

// Number of H-orbits on G/U, by union-find: the fixed-point dimension of F_l[G/U] without
// linear algebra.
inline std::size_t orbit_count(const FiniteGroup& G, const Subset& U, const Subset& H) {
    CosetSpace C = cosets(G, U);
    std::vector<std::size_t> parent(C.reps.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (auto h : G.elements(H))
        for (std::size_t c = 0; c < C.reps.size(); ++c) parent[find(c)] = find(C.coset_of[G.mul(h, C.reps[c])]);
    std::size_t k = 0;
    for (std::size_t c = 0; c < parent.size(); ++c) k += find(c) == c;
    return k;
}

// ---------------------------------------------------------------- congruence checks

struct Prop2Verdict {
    std::string group, module, H;
    u64 p = 0, l = 0;
    unsigned n = 0;
    std::size_t H_order = 0, dim_A = 0, dim_AH = 0;
    bool normal = false, inside_Nn = false;
    bool hypothesis_met = false;
    bool congruent = false;       // l^dim A == l^dim A^H mod p^n
    bool quotient_is_one = false; // l^{dim A - dim A^H} == 1 mod p^n
    std::string status;           // "pass", "FAIL", or "hypothesis unmet"

    bool ok() const { return status != "FAIL"; }
};

inline Prop2Verdict check_prop2(const FiniteGroup& G, const ModRep& A, const Subset& H, unsigned n) {
    Prop2Verdict v;
    v.group = G.name();
    v.module = A.name();
    v.H = subset_str(G, H);
    v.p = G.p();
    v.l = A.l();
    v.n = n;
    v.H_order = H.count();
    v.normal = G.is_subgroup(H) && G.is_normal(H);
    v.inside_Nn = (H & ~compute_Nn(G, n)).none();
    v.hypothesis_met = v.normal && v.inside_Nn;
    v.dim_A = A.dim();
    v.dim_AH = fixed_points_dim(G, A, H);
    BigInt q = big_pow(G.p(), n);
    BigInt a = big_pow(A.l(), v.dim_A), b = big_pow(A.l(), v.dim_AH);
    v.congruent = mod_floor(a - b, q) == 0;
    v.quotient_is_one = mod_floor(big_pow(A.l(), v.dim_A - v.dim_AH) - 1, q) == 0;
    if (!v.hypothesis_met) v.status = "hypothesis unmet";
    else v.status = v.congruent && v.quotient_is_one ? "pass" : "FAIL";
    return v;
}

struct ChainVerdict {
    std::vector<std::size_t> orders;  // |H_i|
    std::vector<std::size_t> dims;    // dim A^{H_i}
    std::size_t pairs_checked = 0;
    bool valid = true;                // normal, decreasing, ends at 1
    bool ok = true;
    std::size_t limit_dim = 0;
    std::vector<std::string> failures;
};

// #A^{H_i} along a descending chain of normal subgroups: terms whose subgroups both lie in N_n
// agree mod p^n; the limit is #A^{1} = #A.
inline ChainVerdict chain_convergence(const FiniteGroup& G, const ModRep& A, const std::vector<Subset>& chain) {
    ChainVerdict c;
    std::vector<Subset> Ns;
    for (unsigned n = 0; n <= G.log_order(); ++n) Ns.push_back(compute_Nn(G, n));
    auto depth = [&](const Subset& H) {
        unsigned d = 0;
        for (unsigned n = 0; n < Ns.size(); ++n)
            if ((H & ~Ns[n]).none()) d = n;
        return d;
    };
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const Subset& H = chain[i];
        if (!G.is_subgroup(H) || !G.is_normal(H) || (i > 0 && (H & ~chain[i - 1]).any())) c.valid = false;
        c.orders.push_back(H.count());
        c.dims.push_back(fixed_points_dim(G, A, H));
    }
    if (chain.empty() || chain.back() != G.trivial()) c.valid = false;
    if (!c.valid) {
        c.ok = false;
        c.failures.push_back("invalid chain");
        return c;
    }
    for (std::size_t i = 0; i < chain.size(); ++i)
        for (std::size_t j = i + 1; j < chain.size(); ++j) {
            unsigned n = std::min(depth(chain[i]), depth(chain[j]));
            ++c.pairs_checked;
            BigInt q = big_pow(G.p(), n);
            if (mod_floor(big_pow(A.l(), c.dims[i]) - big_pow(A.l(), c.dims[j]), q) != 0) {
                c.ok = false;
                c.failures.push_back("terms " + std::to_string(i) + ", " + std::to_string(j) + " differ mod p^" + std::to_string(n));
            }
        }
    c.limit_dim = c.dims.back();
    if (c.limit_dim != A.dim()) {
        c.ok = false;
        c.failures.push_back("limit differs from #A");
    }
    return c;
}

// G = N_0 > N_1 > ... (distinct terms) down to 1.
inline std::vector<Subset> Nn_chain(const FiniteGroup& G) {
    std::vector<Subset> c;
    for (unsigned n = 0; n <= G.log_order(); ++n) {
        Subset N = compute_Nn(G, n);
        if (c.empty() || c.back() != N) c.push_back(N);
    }
    if (c.back() != G.trivial()) c.push_back(G.trivial());
    return c;
}

// A chain of subgroups normal in G dropping by index p at each step (first choice in canonical
// order), or with `last` = true the last choice.
inline std::vector<Subset> index_p_chain(const FiniteGroup& G, bool last = false) {
    auto subs = all_subgroups(G);
    std::vector<Subset> c{G.all()};
    while (c.back().count() > 1) {
        std::optional<Subset> pick;
        for (auto& S : subs)
            if (S.count() * G.p() == c.back().count() && (S & ~c.back()).none() && G.is_normal(S)) {
                pick = S;
                if (!last) break;
            }
        require(pick.has_value(), "p-group without a normal subgroup of index p in a normal subgroup");
        c.push_back(*pick);
    }
    return c;
}

// ---------------------------------------------------------------- corpus

struct CorpusReport {
    std::string group;
    std::vector<Prop2Verdict> verdicts;  // hypothesis-met triples only
    std::size_t passed = 0, failed = 0;
    std::size_t orbit_checks = 0, orbit_mismatches = 0;
    std::size_t chain_checks = 0, chain_failures = 0;
    std::size_t modules = 0;
    bool ok() const { return failed == 0 && orbit_mismatches == 0 && chain_failures == 0; }
};

// kind "perm": every permutation module F_l[G/U]; "full": also tensor products of two of them
// of dimension <= 30 and, for cyclic G, the cyclotomic module. Every normal H and n with
// H inside N_n is checked, permutation-module fixed points are compared with orbit counts for
// every subgroup H, and the N_n chain is compared with an index-p chain.
inline CorpusReport run_corpus(const FiniteGroup& G, const std::vector<u64>& ls, const std::string& kind, unsigned jobs = 1) {
    if (kind != "perm" && kind != "full") throw UsageError("corpus must be 'perm' or 'full'");
    CorpusReport R;
    R.group = G.name();
    auto subs = all_subgroups(G);
    std::vector<Subset> normals;
    for (auto& S : subs)
        if (G.is_normal(S)) normals.push_back(S);
    std::vector<Subset> Ns;
    for (unsigned n = 0; n <= G.log_order(); ++n) Ns.push_back(compute_Nn(G, n));
    auto chainA = Nn_chain(G), chainB = index_p_chain(G), chainC = index_p_chain(G, true);

    struct Job {
        u64 l;
        std::ptrdiff_t U = -1, V = -1;  // permutation modules (V >= 0: tensor U (x) V)
        bool cyclotomic = false;
    };
    std::vector<Job> jobs_list;
    for (auto l : ls) {
        if (l == G.p()) continue;
        for (std::size_t u = 0; u < subs.size(); ++u) jobs_list.push_back({l, static_cast<std::ptrdiff_t>(u)});
        if (kind == "full") {
            for (std::size_t u = 0; u < subs.size(); ++u)
                for (std::size_t v = u; v < subs.size(); ++v) {
                    std::size_t d = (G.size() / subs[u].count()) * (G.size() / subs[v].count());
                    if (d > 1 && d <= 30 && subs[u] != G.all() && subs[v] != G.all())
                        jobs_list.push_back({l, static_cast<std::ptrdiff_t>(u), static_cast<std::ptrdiff_t>(v)});
                }
            if (G.is_cyclic() && G.generators().size() == 1) jobs_list.push_back({l, -1, -1, true});
        }
    }
    struct Out {
        std::vector<Prop2Verdict> v;
        std::size_t orbit_checks = 0, orbit_mismatches = 0, chain_checks = 0, chain_failures = 0;
    };
    auto outs = parallel_map(jobs_list.size(), jobs, [&](std::size_t i) {
        const Job& J = jobs_list[i];
        Out o;
        ModRep A = J.cyclotomic ? cyclotomic_module(G, J.l)
                   : J.V >= 0   ? tensor_module(G, permutation_module(G, subs[J.U], J.l), permutation_module(G, subs[J.V], J.l))
                                : permutation_module(G, subs[J.U], J.l);
        for (auto& H : normals)
            for (unsigned n = 1; n <= G.log_order(); ++n)
                if ((H & ~Ns[n]).none()) o.v.push_back(check_prop2(G, A, H, n));
        if (!J.cyclotomic && J.V < 0)
            for (auto& H : subs) {
                ++o.orbit_checks;
                if (fixed_points_dim(G, A, H) != orbit_count(G, subs[J.U], H)) ++o.orbit_mismatches;
            }
        for (auto* ch : {&chainA, &chainB, &chainC}) {
            ++o.chain_checks;
            if (!chain_convergence(G, A, *ch).ok) ++o.chain_failures;
        }
        return o;
    });
    R.modules = jobs_list.size();
    for (auto& o : outs) {
        for (auto& v : o.v) {
            (v.ok() ? R.passed : R.failed) += 1;
            R.verdicts.push_back(std::move(v));
        }
        R.orbit_checks += o.orbit_checks;
        R.orbit_mismatches += o.orbit_mismatches;
        R.chain_checks += o.chain_checks;
        R.chain_failures += o.chain_failures;
    }
    return R;
}

// Groups of order <= 64 covering the cyclic, elementary abelian, mixed abelian and
// nonabelian cases.
inline std::vector<std::string> builtin_corpus_groups() {
    return {"z4", "z8", "z9", "z27", "z2xz2", "z2xz2xz2", "z3xz3", "z4xz2", "d4", "q8", "heisenberg3", "z5", "z25", "z7"};
}

}  // namespace ptower
