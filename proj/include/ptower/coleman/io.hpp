#pragma once
// Series <-> JSON:
//   {"ring": {"p": 3, "m": 1, "pN": "3^6" | "exact"}, "coeffs": ["1", "3", ...], "truncation": M,
//    "polynomial": true, "ledger": {...}}
// A coefficient over Z[mu_m], m > 2, is an array of strings in the power basis.

#include <json.hpp>

#include "series.hpp"

namespace ptower {

inline RingPtr ring_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("p")) throw UsageError("series ring needs at least {\"p\": ...}");
    u64 p = j.at("p").get<u64>();
    u64 m = j.value("m", u64{1});
    int N = 0;
    if (j.contains("pN")) {
        std::string s = j.at("pN").is_string() ? j.at("pN").get<std::string>() : std::to_string(j.at("pN").get<long long>());
        if (s != "exact") {
            auto hat = s.find('^');
            if (hat == std::string::npos || std::stoull(s.substr(0, hat)) != p)
                throw UsageError("ring modulus must be written p^N with the ring's p, got '" + s + "'");
            N = std::stoi(s.substr(hat + 1));
            if (N <= 0) throw UsageError("ring modulus exponent must be positive");
        }
    }
    return CoeffRing::make(p, m, N);
}

inline nlohmann::json ring_to_json(const CoeffRing& R) {
    return {{"p", R.p()}, {"m", R.m()}, {"pN", R.exact() ? std::string("exact") : std::to_string(R.p()) + "^" + std::to_string(R.N())}};
}

inline BigInt big_from_json(const nlohmann::json& j) {
    std::string s = j.is_string() ? j.get<std::string>() : std::to_string(j.get<long long>());
    BigInt x;
    if (x.set_str(s, 10) != 0) throw UsageError("not an integer: '" + s + "'");
    return x;
}

inline TruncSeries series_from_json(const nlohmann::json& j) {
    RingPtr R = ring_from_json(j.at("ring"));
    const auto& cs = j.at("coeffs");
    if (!cs.is_array() || cs.empty()) throw UsageError("series needs a non-empty coeffs array");
    std::vector<Coeff> coeffs;
    for (const auto& c : cs) {
        Coeff a;
        if (c.is_array())
            for (const auto& x : c) a.push_back(big_from_json(x));
        else
            a.push_back(big_from_json(c));
        coeffs.push_back(std::move(a));
    }
    std::size_t M = j.value("truncation", coeffs.size());
    if (M < coeffs.size()) throw UsageError("truncation is shorter than the coefficient list");
    coeffs.resize(M, Coeff{0});
    return TruncSeries::make(R, std::move(coeffs), j.value("polynomial", true));
}

inline nlohmann::json coeff_to_json(const Coeff& c) {
    if (c.size() == 1) return c[0].get_str();
    nlohmann::json a = nlohmann::json::array();
    for (auto& x : c) a.push_back(x.get_str());
    return a;
}

inline nlohmann::json ledger_to_json(const PrecisionLedger& L) {
    nlohmann::json d = nlohmann::json::array();
    for (auto x : L.digits) d.push_back(x == PadicNumber::INF ? nlohmann::json("exact") : nlohmann::json(x));
    nlohmann::json losses = nlohmann::json::array();
    for (auto& e : L.losses) losses.push_back({{"op", e.op}, {"degree", e.degree}, {"digits", e.digits}});
    return {{"digits", d}, {"losses", losses}, {"working_digits", L.working_digits}};
}

inline nlohmann::json series_to_json(const TruncSeries& s) {
    nlohmann::json cs = nlohmann::json::array();
    for (auto& c : s.c) cs.push_back(coeff_to_json(c));
    return {{"ring", ring_to_json(*s.ring)}, {"coeffs", cs}, {"truncation", s.M()}, {"polynomial", s.polynomial},
            {"ledger", ledger_to_json(s.ledger)}};
}

}  // namespace ptower
