#pragma once
// JSON views of library results, and the TSV rendering used for human scanning. Both formats
// carry the same data: TSV lists the verdict lines, then every JSON leaf as "path<TAB>value".

#include <json.hpp>

#include "../coleman/io.hpp"
#include "../groupcong/module.hpp"
#include "../limits/limits.hpp"

namespace ptower {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "ptower 1.0.0";

inline Json digits_json(i64 d) { return d == PadicNumber::INF ? Json("exact") : Json(d); }

inline Json to_json(const LimitCertificate& c) {
    Json ev = Json::array();
    for (auto& e : c.evidence)
        ev.push_back({{"level", e.level}, {"term", e.term}, {"modulus_exp", digits_json(e.modulus_exp)}, {"verified_against", e.verified_against}});
    return {{"name", c.name},           {"value", c.value.str()},
            {"certified", digits_json(c.certified)}, {"exact", c.exact},
            {"target_reached", c.target_reached},    {"provenance", c.provenance},
            {"evidence", ev},                        {"notes", c.notes}};
}

inline std::string verdict_line(const IdentityCheck& c) {
    return c.name + ": " + (c.ok ? "ok" : "FAIL") + (c.gating ? "" : " (non-gating)");
}

inline Json to_json(const IdentityCheck& c) {
    return {{"name", c.name}, {"lhs", c.lhs},     {"rhs", c.rhs},   {"precision", digits_json(c.precision)},
            {"ok", c.ok},     {"gating", c.gating}, {"note", c.note}, {"line", verdict_line(c)}};
}

inline Json to_json(const ScriptL& s) {
    Json lv = Json::array();
    for (auto& [n, a] : s.level_agreement) lv.push_back({{"level", n}, {"agreement", digits_json(a)}});
    Json fam = Json::array();
    for (auto& x : s.family) fam.push_back(x.label());
    return {{"family", fam},
            {"s0", to_json(s.s0)},
            {"s_minus1", to_json(s.sm1)},
            {"s_independence", to_json(s.s_independence)},
            {"level_agreement", lv},
            {"exact_partials", s.exact_partials},
            {"rational_ok", s.rational_ok}};
}

inline Json to_json(const CpLimit& c) {
    return {{"s0", to_json(c.s0)},   {"s_minus1", to_json(c.sm1)},          {"c_p", to_json(c.c_p)},
            {"ratio", to_json(c.ratio)}, {"exact_partials", c.exact_partials}, {"rational_ok", c.rational_ok}};
}

inline Json to_json(const HminusLadder& L) {
    Json h = Json::array();
    for (auto& x : L.h) h.push_back(x.get_str());
    return {{"h_minus", h}, {"certificate", to_json(L.cert)}};
}

inline Json to_json(const TowerConstants& C) {
    Json j = {{"mu_2p_in_k", C.mu_2p}, {"w0", C.w0},       {"unit_index_limit", C.limQ}, {"unit_index_level", C.q_level},
              {"a", to_str(C.a)},      {"b", C.b.str()},   {"euler_odd", to_str(C.euler_odd)}};
    if (C.w2_real) j["w2_real"] = *C.w2_real;
    if (C.mu_2p) j["v0"] = to_str(C.v0);
    Json tp = Json::array();
    for (auto& x : C.two_power.seq) tp.push_back(x.str());
    j["two_power"] = {{"sequence", tp}, {"limit", C.two_power.limit.str()}, {"ok", C.two_power.ok}};
    return j;
}

inline Json to_json(const HInfinity& H) {
    Json f = Json::array();
    for (auto& x : H.factors) f.push_back(to_json(x));
    Json j = {{"branch", H.branch}, {"assembled", to_json(H.assembled)}, {"ladder", to_json(H.ladder)}, {"agree", to_json(H.agree)}, {"factors", f}};
    if (H.cp) j["c_p"] = to_json(*H.cp);
    if (H.witness) j["witness"] = H.witness->label();
    return j;
}

inline Json to_json(const K2Limit& k) {
    Json o = Json::array();
    for (auto& x : k.orders) o.push_back(x.get_str());
    return {{"orders", o}, {"w2_layers", k.w2_layers}, {"w2_growth_ok", k.w2_growth_ok}, {"certificate", to_json(k.cert)}};
}

inline Json to_json(const TowerLimits& L) {
    Json ids = Json::array();
    for (auto& c : L.identities) ids.push_back(to_json(c));
    Json j = {{"tower", L.tower}, {"p", L.p}, {"h_infinity", to_json(L.h)}, {"identities", ids}, {"notes", L.notes}, {"gating_ok", L.gating_ok()}};
    if (L.constants) j["constants"] = to_json(*L.constants);
    if (L.rho) j["rho_tilde"] = to_json(*L.rho);
    if (L.regulator) j["regulator_ratio"] = to_json(*L.regulator);
    if (L.k2) j["k2_limit"] = to_json(*L.k2);
    return j;
}

inline Json to_json(const Prop2Verdict& v) {
    return {{"group", v.group},     {"module", v.module}, {"H", v.H},           {"H_order", v.H_order},
            {"p", v.p},             {"l", v.l},           {"n", v.n},           {"modulus", big_pow(v.p, v.n).get_str()},
            {"dim_A", v.dim_A},     {"dim_AH", v.dim_AH}, {"normal", v.normal}, {"inside_Nn", v.inside_Nn},
            {"congruent", v.congruent}, {"quotient_is_one", v.quotient_is_one}, {"status", v.status}};
}

inline Json to_json(const ChainVerdict& c) {
    return {{"orders", c.orders}, {"dims", c.dims}, {"pairs_checked", c.pairs_checked}, {"valid", c.valid},
            {"ok", c.ok},         {"limit_dim", c.limit_dim}, {"failures", c.failures}};
}

inline void flatten(const Json& j, const std::string& path, std::vector<std::string>& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), path + "/" + it.key(), out);
    } else if (j.is_array()) {
        if (j.empty()) out.push_back(path + "\t[]");
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "/" + std::to_string(i), out);
    } else {
        out.push_back(path + "\t" + (j.is_string() ? j.get<std::string>() : j.dump()));
    }
}

// Report layout: {"lines": [...verdict lines...], everything else}.
inline std::string render(const Json& report, const std::string& format) {
    if (format == "json") return report.dump(2) + "\n";
    std::string s;
    if (report.contains("lines"))
        for (auto& l : report["lines"]) s += l.get<std::string>() + "\n";
    std::vector<std::string> rows;
    flatten(report, "", rows);
    for (auto& r : rows) s += r + "\n";
    return s;
}

}  // namespace ptower
