#pragma once
// Finite p-groups given by a multiplication table, and their subgroup lattices.

#include <bitset>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_set>

#include "../arith/common.hpp"

namespace ptower {

constexpr std::size_t kGroupBudget = 256;
using Subset = std::bitset<kGroupBudget>;

class FiniteGroup {
public:
    FiniteGroup(std::string name, std::size_t n, std::vector<std::uint16_t> table, std::vector<std::size_t> gens = {})
        : name_(std::move(name)), n_(n), table_(std::move(table)) {
        if (n == 0) throw UsageError("empty group");
        if (n > kGroupBudget) throw ResourceError("group of order " + std::to_string(n) + " exceeds the budget of " + std::to_string(kGroupBudget));
        if (table_.size() != n * n) throw UsageError("multiplication table must be " + std::to_string(n) + " x " + std::to_string(n));
        validate();
        auto f = factor(n);
        if (n == 1 || f.size() != 1) throw UsageError("group order " + std::to_string(n) + " is not a prime power");
        p_ = f[0].first;
        a_ = f[0].second;
        for (auto g : gens)
            if (g >= n) throw UsageError("generator out of range");
        gens_ = gens.empty() ? generators_of(all()) : gens;
        if (closure(gens_) != all()) throw UsageError("designated generators do not generate the group");
    }

    template <class F>
    static FiniteGroup from_function(std::string name, std::size_t n, F&& mul) {
        if (n > kGroupBudget) throw ResourceError("group of order " + std::to_string(n) + " exceeds the budget of " + std::to_string(kGroupBudget));
        std::vector<std::uint16_t> t(n * n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) t[a * n + b] = static_cast<std::uint16_t>(mul(a, b));
        return FiniteGroup(std::move(name), n, std::move(t));
    }

    // Closure of permutations of {0..d-1} under composition; (x*y)(i) = x(y(i)).
    static FiniteGroup from_permutations(std::string name, const std::vector<std::vector<std::size_t>>& gens) {
        if (gens.empty()) throw UsageError("no permutation generators");
        std::size_t d = gens[0].size();
        using Perm = std::vector<std::size_t>;
        for (auto& g : gens) {
            if (g.size() != d) throw UsageError("permutation generators of different degrees");
            Perm s = g;
            std::sort(s.begin(), s.end());
            for (std::size_t i = 0; i < d; ++i)
                if (s[i] != i) throw UsageError("generator is not a permutation of 0.." + std::to_string(d - 1));
        }
        auto compose = [](const Perm& x, const Perm& y) {
            Perm r(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[y[i]];
            return r;
        };
        Perm id(d);
        std::iota(id.begin(), id.end(), 0);
        std::vector<Perm> elts{id};
        std::map<Perm, std::size_t> index{{id, 0}};
        for (std::size_t i = 0; i < elts.size(); ++i)
            for (auto& g : gens) {
                Perm y = compose(elts[i], g);
                if (index.emplace(y, elts.size()).second) {
                    elts.push_back(y);
                    if (elts.size() > kGroupBudget)
                        throw ResourceError("permutation group exceeds the budget of " + std::to_string(kGroupBudget) + " elements");
                }
            }
        std::size_t n = elts.size();
        std::vector<std::uint16_t> t(n * n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) t[a * n + b] = static_cast<std::uint16_t>(index.at(compose(elts[a], elts[b])));
        std::vector<std::size_t> gi;
        for (auto& g : gens) gi.push_back(index.at(g));
        return FiniteGroup(std::move(name), n, std::move(t), gi);
    }

    const std::string& name() const { return name_; }
    std::size_t size() const { return n_; }
    u64 p() const { return p_; }
    unsigned log_order() const { return a_; }  // |G| = p^a
    std::size_t identity() const { return e_; }
    std::size_t mul(std::size_t a, std::size_t b) const { return table_[a * n_ + b]; }
    std::size_t inv(std::size_t a) const { return inv_[a]; }
    const std::vector<std::size_t>& generators() const { return gens_; }

    Subset all() const {
        Subset s;
        for (std::size_t i = 0; i < n_; ++i) s.set(i);
        return s;
    }
    Subset trivial() const {
        Subset s;
        s.set(e_);
        return s;
    }

    Subset closure(const std::vector<std::size_t>& gens) const {
        Subset s = trivial();
        std::vector<std::size_t> list{e_};
        for (std::size_t i = 0; i < list.size(); ++i)
            for (auto g : gens) {
                std::size_t y = mul(list[i], g);
                if (!s.test(y)) {
                    s.set(y);
                    list.push_back(y);
                }
            }
        return s;
    }

    std::vector<std::size_t> elements(const Subset& s) const {
        std::vector<std::size_t> r;
        for (std::size_t i = 0; i < n_; ++i)
            if (s.test(i)) r.push_back(i);
        return r;
    }

    // Greedy generating set: smallest element outside the current closure.
    std::vector<std::size_t> generators_of(const Subset& H) const {
        std::vector<std::size_t> g;
        Subset cur = trivial();
        for (std::size_t i = 0; i < n_; ++i)
            if (H.test(i) && !cur.test(i)) {
                g.push_back(i);
                cur = closure(g);
            }
        return g;
    }

    bool is_subgroup(const Subset& s) const {
        if (!s.test(e_)) return false;
        for (auto a : elements(s))
            for (auto b : elements(s))
                if (!s.test(mul(a, inv(b)))) return false;
        return true;
    }

    bool is_normal(const Subset& H) const {
        for (auto g : gens_)
            for (auto h : elements(H))
                if (!H.test(mul(mul(g, h), inv(g)))) return false;
        return true;
    }

    std::size_t order_of(std::size_t g) const {
        std::size_t k = 1;
        for (std::size_t x = g; x != e_; x = mul(x, g)) ++k;
        return k;
    }

    bool is_cyclic() const {
        for (std::size_t g = 0; g < n_; ++g)
            if (order_of(g) == n_) return true;
        return false;
    }

private:
    void validate() {
        for (auto x : table_)
            if (x >= n_) throw UsageError("multiplication table entry out of range");
        bool found = false;
        for (std::size_t e = 0; e < n_ && !found; ++e) {
            bool ok = true;
            for (std::size_t a = 0; a < n_ && ok; ++a) ok = mul(e, a) == a && mul(a, e) == a;
            if (ok) e_ = e, found = true;
        }
        if (!found) throw UsageError("multiplication table has no identity");
        inv_.assign(n_, n_);
        for (std::size_t a = 0; a < n_; ++a)
            for (std::size_t b = 0; b < n_; ++b)
                if (mul(a, b) == e_ && mul(b, a) == e_) inv_[a] = b;
        for (auto x : inv_)
            if (x == n_) throw UsageError("multiplication table has an element without inverse");
        for (std::size_t a = 0; a < n_; ++a)
            for (std::size_t b = 0; b < n_; ++b)
                for (std::size_t c = 0; c < n_; ++c)
                    if (mul(mul(a, b), c) != mul(a, mul(b, c))) throw UsageError("multiplication table is not associative");
    }

    std::string name_;
    std::size_t n_;
    std::vector<std::uint16_t> table_;
    std::vector<std::size_t> inv_;
    std::vector<std::size_t> gens_;
    std::size_t e_ = 0;
    u64 p_ = 0;
    unsigned a_ = 0;
};

// Canonical order on subsets: by size descending, then by element list.
inline bool subset_less(const Subset& a, const Subset& b) {
    if (a.count() != b.count()) return a.count() > b.count();
    for (std::size_t i = 0; i < kGroupBudget; ++i)
        if (a.test(i) != b.test(i)) return a.test(i);
    return false;
}

// Products of cyclic groups "z9", "z4xz2", "z3xz3xz3"; "d4", "q8", "heisenberg3".
inline FiniteGroup builtin_group(const std::string& name) {
    if (name == "d4")
        return FiniteGroup::from_function(name, 8, [](std::size_t x, std::size_t y) {
            // r^a s^b <-> 2a + b
            std::size_t a = x / 2, b = x % 2, c = y / 2, d = y % 2;
            std::size_t r = (b ? a + 4 - c : a + c) % 4;
            return 2 * r + (b ^ d);
        });
    if (name == "q8")
        return FiniteGroup::from_function(name, 8, [](std::size_t x, std::size_t y) {
            // +-{1, i, j, k} <-> 4 sign + unit
            static const int unit[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
            static const int neg[4][4] = {{0, 0, 0, 0}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 0, 1, 1}};
            std::size_t u = x % 4, v = y % 4;
            std::size_t s = (x / 4 + y / 4 + neg[u][v]) % 2;
            return 4 * s + unit[u][v];
        });
    if (name == "heisenberg3")
        return FiniteGroup::from_function(name, 27, [](std::size_t x, std::size_t y) {
            // (a, b, c)(a', b', c') = (a + a', b + b', c + c' + a b')
            std::size_t a = x / 9, b = x / 3 % 3, c = x % 3, a2 = y / 9, b2 = y / 3 % 3, c2 = y % 3;
            return 9 * ((a + a2) % 3) + 3 * ((b + b2) % 3) + (c + c2 + a * b2) % 3;
        });
    std::vector<std::size_t> mods;
    std::size_t pos = 0;
    while (pos < name.size()) {
        if (name[pos] != 'z') throw UsageError("unknown builtin group '" + name + "'");
        std::size_t end = name.find('x', pos);
        std::string num = name.substr(pos + 1, end == std::string::npos ? std::string::npos : end - pos - 1);
        if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos) throw UsageError("unknown builtin group '" + name + "'");
        mods.push_back(std::stoul(num));
        if (mods.back() < 2) throw UsageError("cyclic factor must have order >= 2");
        pos = end == std::string::npos ? name.size() : end + 1;
    }
    std::size_t n = 1;
    for (auto m : mods) {
        n *= m;
        if (n > kGroupBudget) throw ResourceError("group " + name + " exceeds the budget of " + std::to_string(kGroupBudget));
    }
    return FiniteGroup::from_function(name, n, [&](std::size_t x, std::size_t y) {
        std::size_t r = 0, scale = 1;
        for (std::size_t i = mods.size(); i-- > 0;) {
            std::size_t m = mods[i];
            r += ((x % m + y % m) % m) * scale;
            x /= m, y /= m, scale *= m;
        }
        return r;
    });
}

struct SubgroupLattice {
    std::vector<Subset> subgroups;   // canonical order
    std::vector<std::size_t> index;
    std::vector<bool> normal;
};

// Every subgroup, by closure of a subgroup with one more element, deduplicated.
inline std::vector<Subset> all_subgroups(const FiniteGroup& G) {
    std::unordered_set<Subset> seen{G.trivial()};
    std::vector<Subset> out{G.trivial()};
    std::vector<std::vector<std::size_t>> gens{{}};
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t g = 0; g < G.size(); ++g) {
            if (out[i].test(g)) continue;
            auto ng = gens[i];
            ng.push_back(g);
            Subset T = G.closure(ng);
            if (seen.insert(T).second) {
                out.push_back(T);
                gens.push_back(ng);
            }
        }
    std::sort(out.begin(), out.end(), subset_less);
    return out;
}

inline SubgroupLattice subgroups_up_to_index(const FiniteGroup& G, std::size_t bound) {
    SubgroupLattice L;
    for (auto& S : all_subgroups(G)) {
        std::size_t idx = G.size() / S.count();
        if (idx > bound) continue;
        L.subgroups.push_back(S);
        L.index.push_back(idx);
        L.normal.push_back(G.is_normal(S));
    }
    return L;
}

// N_n: intersection of the subgroups of index <= p^n.
inline Subset compute_Nn(const FiniteGroup& G, unsigned n) {
    std::size_t bound = n >= G.log_order() ? G.size() : static_cast<std::size_t>(ipow(G.p(), n));
    Subset N = G.all();
    for (auto& S : subgroups_up_to_index(G, bound).subgroups) N &= S;
    require(G.is_normal(N), "N_n is not normal");
    return N;
}

inline std::string subset_str(const FiniteGroup& G, const Subset& s) {
    std::string r = "{";
    bool first = true;
    for (auto x : G.elements(s)) {
        r += (first ? "" : ",") + std::to_string(x);
        first = false;
    }
    return r + "}";
}

}  // namespace ptower
