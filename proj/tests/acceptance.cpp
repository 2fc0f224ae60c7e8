// Acceptance suite: one pass/fail line per criterion. Exit status 0 iff every criterion passes.
// Criteria 2-9 also hand back their JSON reports so criterion 10 can rerun them with 8 workers
// and compare byte for byte.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>

#include "oracles/brute.hpp"
#include "ptower/cli/commands.hpp"

using namespace ptower;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
    std::vector<std::string> reports;  // rendered JSON, for the determinism check

    void fail(const std::string& why) {
        if (ok) detail.clear();
        ok = false;
        detail += (detail.empty() ? "" : "; ") + why;
    }
};

RunConfig cfg(std::string command, std::string tower, u64 p, unsigned jobs) {
    RunConfig c;
    c.command = std::move(command);
    c.tower = std::move(tower);
    c.p = p;
    c.jobs = jobs;
    return c;
}

bool has_line(const Json& r, const std::string& line) {
    for (auto& l : r["lines"])
        if (l.get<std::string>() == line) return true;
    return false;
}

CommandResult run(const RunConfig& c, Outcome& o) {
    auto r = run_command(c);
    o.reports.push_back(render(r.report, "json"));
    return r;
}

// h^- of the cyclotomic layers Q(mu_{m0 p^n}) by the resultant oracle; empty if not covered.
std::vector<BigInt> oracle_layers(const std::string& tower, u64 p, unsigned levels) {
    i64 m0 = tower == "Qzeta:3" && p == 3 ? 3 : tower == "Qzeta:4" && p == 2 ? 4 : 0;
    std::vector<BigInt> out;
    if (!m0) return out;
    for (unsigned n = 0; n <= levels; ++n) out.push_back(oracle::hminus_prime_power_cyclotomic(m0 * static_cast<i64>(ipow(p, n))));
    return out;
}

const std::vector<std::pair<std::string, u64>> kTowers{{"Qzeta:3", 3}, {"Qzeta:4", 2}, {"Qzeta:4", 3}};

// 1. exact anchors against brute-force Bernoulli sums and reduced forms
Outcome c1(unsigned) {
    Outcome o;
    auto policy = UnitIndexPolicy::parse("auto");
    struct Anchor { std::string k; u64 p; BigInt oracle; };
    for (auto& a : std::vector<Anchor>{{"Qzeta:3", 3, oracle::hminus_prime_power_cyclotomic(3)},
                                       {"Qzeta:4", 2, oracle::hminus_prime_power_cyclotomic(4)},
                                       {"Qzeta:23", 23, oracle::hminus_prime_power_cyclotomic(23)}}) {
        BigInt h = hminus(TowerSpec(parse_field(a.k), a.p), 0, policy);
        o.detail += "h_0^-(" + a.k + ")=" + h.get_str() + " ";
        if (h != a.oracle) o.fail(a.k + ": library " + h.get_str() + " vs oracle " + a.oracle.get_str());
    }
    // Q(mu_3) = Q(sqrt -3), Q(mu_4) = Q(i): cross-check with reduced forms
    if (oracle::class_number_forms(-3) != 1 || oracle::class_number_forms(-4) != 1) o.fail("reduced-form count");
    // #K_2(Z) = w_2(Q) |zeta(-1)| with zeta(-1) = -B_2 / 2
    auto B = oracle::bernoulli(2);
    oracle::Q want = oracle::Q(oracle::w2_quadratic(1)) * B[2] / 2;
    BigInt k2 = k2_order(parse_field("Q"));
    o.detail += "#K_2(Z)=" + k2.get_str();
    if (want.get_den() != 1 || k2 != want.get_num()) o.fail("#K_2(Z) = " + k2.get_str());
    return o;
}

// 2. exact h_n^- equals the p-adic assembly mod p^20, n <= 3
Outcome c2(unsigned jobs) {
    Outcome o;
    for (auto& [k, p] : kTowers) {
        auto c = cfg("hminus", k, p, jobs);
        c.levels = 3;
        c.prec = 20;
        auto r = run(c, o);
        auto orc = oracle_layers(k, p, 3);
        for (auto& row : r.report["levels"]) {
            unsigned n = row["level"];
            if (row["two_path"] != "ok" || row["compared_mod_p"] != 20) o.fail(k + " p=" + std::to_string(p) + " n=" + std::to_string(n) + ": " + row["two_path"].get<std::string>());
            if (!orc.empty() && row["h_minus"] != orc[n].get_str()) o.fail(k + " n=" + std::to_string(n) + " disagrees with the oracle");
        }
    }
    if (o.ok) o.detail = "3 towers x 4 levels agree mod p^20";
    return o;
}

// 3. non-p parts satisfy the congruence ladder, n <= 4
Outcome c3(unsigned jobs) {
    Outcome o;
    std::size_t pairs = 0;
    for (auto& [k, p] : kTowers) {
        auto c = cfg("hminus", k, p, jobs);
        c.levels = 4;
        auto r = run(c, o);
        std::vector<BigInt> u;
        for (auto& row : r.report["levels"]) u.push_back(BigInt(row["non_p_part"].get<std::string>()));
        for (unsigned a = 0; a < u.size(); ++a)
            for (unsigned b = a + 1; b < u.size(); ++b, ++pairs)
                if (mod_floor(u[a] - u[b], big_pow(p, a)) != 0) o.fail(k + " levels " + std::to_string(a) + "," + std::to_string(b));
        for (auto& e : r.report["ladder"])
            if (!e["ok"].get<bool>()) o.fail(k + ": report ladder verdict");
    }
    if (o.ok) o.detail = std::to_string(pairs) + " pairwise congruences";
    return o;
}

// 4. s-independence of script L for chi_12 (p = 5) and chi_8 (p = 3), n <= 4
Outcome c4(unsigned jobs) {
    Outcome o;
    for (auto [ch, p] : std::vector<std::pair<std::string, u64>>{{"quad:12", 5}, {"quad:8", 3}}) {
        auto c = cfg("lvalue", "Q", p, jobs);
        c.character = ch;
        c.levels = 4;
        auto r = run(c, o);
        const Json& S = r.report["script_L"];
        if (r.exit_code != kOk || !S["s_independence"]["ok"].get<bool>()) o.fail(ch + ": s=0 and s=-1 limits differ");
        if (!S["rational_ok"].get<bool>()) o.fail(ch + ": full-orbit product not rational");
        std::size_t levels = 0;
        for (auto& e : S["level_agreement"]) {
            unsigned n = e["level"];
            ++levels;
            if (e["agreement"] != "exact" && e["agreement"].get<i64>() < static_cast<i64>(n)) o.fail(ch + ": level " + std::to_string(n) + " agrees only mod p^" + e["agreement"].dump());
        }
        if (levels < 5) o.fail(ch + ": only " + std::to_string(levels) + " levels computed");
    }
    if (o.ok) o.detail = "chi_12 (p=5), chi_8 (p=3): levels 0..4 agree mod p^n";
    return o;
}

// 5. trivial-character products stabilize, ratio 2, c_p a unit
Outcome c5(unsigned jobs) {
    Outcome o;
    for (u64 p : {2, 3, 5}) {
        LimitOptions lo;
        lo.target = 3;
        lo.env.jobs = jobs;
        auto C = c_p_limit(p, lo);
        o.reports.push_back(to_json(C).dump(2));
        std::string P = "p=" + std::to_string(p);
        if (!C.s0.target_reached || !C.sm1.target_reached) o.fail(P + ": no stabilization");
        if (!C.ratio.ok) o.fail(P + ": ratio != 2");
        if (C.c_p.value.valuation() != 0) o.fail(P + ": c_p not a unit");
        if (o.ok) o.detail += P + ": c_p=" + C.c_p.value.str() + " ";
    }
    return o;
}

// 6. Coleman suite
Outcome c6(unsigned jobs) {
    Outcome o;
    ColemanOptions co{jobs, 0};
    // exact anchors
    auto Z3 = CoeffRing::make(3, 1, 0);
    auto n1 = coleman_norm(TruncSeries::from_ints(Z3, {1, 3}), co);
    if (n1.str() != "19 + 27T") o.fail("N(1+3T) = " + n1.str());
    if (oracle::coleman_norm_p3({1, 3}) != std::vector<oracle::Z>{19, 27}) o.fail("oracle disagrees on 1+3T");
    auto n0 = coleman_norm(TruncSeries::from_ints(Z3, {1, 1}), co);
    if (n0.str() != "1 + T") o.fail("N(1+T) = " + n0.str());
    std::size_t checked = 0;
    for (auto [p, m] : std::vector<std::pair<u64, u64>>{{3, 1}, {2, 3}}) {
        auto R = CoeffRing::make(p, m, 6);
        std::mt19937_64 rng(1000 + p);
        std::vector<TruncSeries> fs;
        for (int i = 0; i < 100; ++i) fs.push_back(random_unit_series(R, 40, rng));
        std::vector<TruncSeries> Ns;
        for (auto& f : fs) {
            Ns.push_back(coleman_norm(f, co));
            if (agreement(compose_phi(Ns.back(), 1), norm_product(f, 1, jobs)) < 6) o.fail("defining identity over " + R->str());
        }
        for (std::size_t i = 0; i + 1 < fs.size(); ++i)
            if (agreement(coleman_norm(fs[i] * fs[i + 1], co), Ns[i] * Ns[i + 1]) < 6) o.fail("multiplicativity over " + R->str());
        checked += fs.size();
        // Lemma-2 rate and Lemma-3 evaluation on a few of them
        for (int i = 0; i < 3; ++i) {
            auto it = coleman_iterate(fs[i], 0, 6, co);
            if (!it.rate_ok || it.certified < 6) o.fail("iterate rate over " + R->str());
            auto L = lemma3_eval(fs[i], it.d, 0, 6, 5, co);
            if (L.agreement.size() < 5 || L.agreement[4] < 4) o.fail("finite products at level 5 over " + R->str());
        }
        RunConfig c = cfg("coleman", "", p, jobs);
        c.random_unit = true;
        c.m = m;
        c.seed = 42;
        if (run(c, o).exit_code != kOk) o.fail("coleman command over " + R->str());
    }
    if (o.ok) o.detail = std::to_string(checked) + " random units; N(1+3T) = 19 + 27T; N(1+T) = 1 + T";
    return o;
}

// 7. identity web for (Q(mu_3), 3) and (Q(mu_4), 2)
Outcome c7(unsigned jobs) {
    Outcome o;
    struct Case { std::string k; u64 p; std::vector<std::string> need; };
    for (auto& cs : std::vector<Case>{{"Qzeta:3", 3, {"example1: h=2*rho_tilde", "example3: -h_minus"}},
                                      {"Qzeta:4", 2, {"example1: h=-rho_tilde", "example3: 3*h_minus"}}}) {
        auto c = cfg("limits", cs.k, cs.p, jobs);
        c.prec = 3;
        auto r = run(c, o);
        std::string T = cs.k + " p=" + std::to_string(cs.p);
        for (auto& id : r.report["limits"]["identities"]) {
            if (id["precision"] != "exact" && id["precision"].get<i64>() < 3) o.fail(T + ": " + id["name"].get<std::string>() + " only mod p^" + id["precision"].dump());
            if (!id["ok"].get<bool>() && id["gating"].get<bool>()) o.fail(T + ": " + id["name"].get<std::string>() + " FAILS (" + id["lhs"].get<std::string>() + " vs " + id["rhs"].get<std::string>() + ")");
        }
        for (auto& n : cs.need)
            if (!has_line(r.report, n + ": ok") && !has_line(r.report, n + ": FAIL")) o.fail(T + ": no '" + n + "' check");
        if (r.exit_code != (o.ok ? kOk : kCheckFailed) && o.ok) o.fail(T + ": exit code " + std::to_string(r.exit_code));
    }
    if (o.ok) o.detail = "all identities hold to p^3";
    return o;
}

// 8. Q(sqrt -11), p = 3: h_infinity^- = 0 exactly, script L(chi omega) = 0
Outcome c8(unsigned jobs) {
    Outcome o;
    auto c = cfg("limits", "Qsqrt:-11", 3, jobs);
    c.prec = 3;
    auto r = run(c, o);
    if (!has_line(r.report, "h_infinity_minus = 0 (exact)")) o.fail("h_infinity^- is not an exact zero");
    const Json& H = r.report["limits"]["h_infinity"];
    if (!H.contains("witness")) o.fail("no witness character");
    bool zero = false;
    for (auto& f : H["factors"])
        if (f["s0"]["value"] == "0 (exact)" && f["s0"]["exact"].get<bool>()) zero = true;
    if (!zero) o.fail("script L(chi omega) is not an exact zero");
    if (r.exit_code != kOk) o.fail("exit code " + std::to_string(r.exit_code));
    if (o.ok) o.detail = "witness " + H["witness"].get<std::string>();
    return o;
}

// 9. fixed-point congruence over the builtin corpus
Outcome c9(unsigned jobs) {
    Outcome o;
    auto c = cfg("groupcong", "", 0, jobs);
    c.builtin = "all";
    c.corpus = "full";
    auto r = run(c, o);
    std::size_t triples = r.report["triples"], orbit = 0, bad = 0;
    for (auto& g : r.report["groups"]) {
        if (g["order"].get<std::size_t>() > 64) o.fail(g["group"].get<std::string>() + " is larger than 64");
        orbit += g["corpus"]["orbit_checks"].get<std::size_t>();
        bad += g["corpus"]["failed"].get<std::size_t>() + g["corpus"]["orbit_mismatches"].get<std::size_t>();
        for (auto l : g["l"])
            if (l == g["p"]) o.fail("l = p in the corpus");
    }
    if (triples < 200) o.fail("only " + std::to_string(triples) + " triples");
    if (bad) o.fail(std::to_string(bad) + " failures");
    if (r.exit_code != kOk) o.fail("exit code " + std::to_string(r.exit_code));
    if (o.ok) o.detail = std::to_string(triples) + " triples, " + std::to_string(orbit) + " orbit counts";
    return o;
}

}  // namespace

int main() {
    using Clock = std::chrono::steady_clock;
    std::vector<std::pair<std::string, std::function<Outcome(unsigned)>>> criteria{
        {"exact anchors", c1},
        {"two-path class numbers mod p^20", c2},
        {"congruence ladder", c3},
        {"s-independence of script L", c4},
        {"c_p: stabilization, ratio 2, unit", c5},
        {"Coleman suite", c6},
        {"identity web and examples", c7},
        {"hypothesis-violation path", c8},
        {"groupcong corpus", c9},
    };
    bool all = true;
    std::vector<std::vector<std::string>> first(criteria.size());
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second(1);
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        first[i] = o.reports;
        all = all && o.ok;
        std::cout << "criterion " << i + 1 << " [" << criteria[i].first << "]: " << (o.ok ? "PASS" : "FAIL") << " (" << static_cast<long>(ms)
                  << " ms) " << o.detail << std::endl;
    }
    // 10. determinism across worker counts
    auto t0 = Clock::now();
    Outcome d;
    std::size_t compared = 0;
    for (std::size_t i = 1; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second(8);
        } catch (const std::exception& e) {
            d.fail("criterion " + std::to_string(i + 1) + " threw with 8 jobs: " + e.what());
            continue;
        }
        if (o.reports != first[i]) d.fail("criterion " + std::to_string(i + 1) + " JSON differs between 1 and 8 jobs");
        compared += o.reports.size();
    }
    if (d.ok) d.detail = std::to_string(compared) + " reports byte-identical with 1 and 8 jobs";
    all = all && d.ok;
    double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    std::cout << "criterion 10 [determinism]: " << (d.ok ? "PASS" : "FAIL") << " (" << static_cast<long>(ms) << " ms) " << d.detail << std::endl;
    return all ? 0 : 1;
}
