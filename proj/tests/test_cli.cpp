// Command pipelines run in-process: reports, exit codes, formats and determinism.

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "ptower/cli/commands.hpp"

using namespace ptower;

namespace {

RunConfig cfg(std::string command, std::string tower, u64 p) {
    RunConfig c;
    c.command = std::move(command);
    c.tower = std::move(tower);
    c.p = p;
    return c;
}

bool has_line(const Json& r, const std::string& line) {
    for (auto& l : r["lines"])
        if (l.get<std::string>() == line) return true;
    return false;
}

std::string temp_file(const std::string& name, const std::string& body) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << body;
    return path.string();
}

}  // namespace

TEST_CASE("hminus reports both paths per level", "[cli]") {
    auto c = cfg("hminus", "Qzeta:3", 3);
    c.levels = 4;
    auto r = run_command(c);
    REQUIRE(r.exit_code == kOk);
    REQUIRE(r.report["levels"].size() == 5);
    for (auto& row : r.report["levels"]) REQUIRE(row["two_path"] == "ok");
    REQUIRE(r.report["levels"][3]["h_minus"] == "2593");

    auto c23 = cfg("hminus", "Qzeta:23", 23);
    c23.levels = 0;
    REQUIRE(run_command(c23).report["levels"][0]["h_minus"] == "3");

    auto c2 = cfg("hminus", "Qzeta:4", 2);
    c2.levels = 3;
    auto r2 = run_command(c2);
    REQUIRE(r2.exit_code == kOk);
    REQUIRE(r2.report["ladder"].size() == 6);
}

TEST_CASE("limits reports the identity web", "[cli]") {
    auto c = cfg("limits", "Qzeta:3", 3);
    c.prec = 3;
    auto r = run_command(c);
    REQUIRE(r.exit_code == kOk);
    REQUIRE(has_line(r.report, "example1: h=2*rho_tilde: ok"));
    REQUIRE(r.report["config"]["tower"] == "Qzeta:3");
    REQUIRE(r.report["version"] == kVersion);
    REQUIRE(r.report.contains("cache_hits"));

    auto v = cfg("limits", "Qsqrt:-11", 3);
    auto rv = run_command(v);
    REQUIRE(rv.exit_code == kOk);
    REQUIRE(has_line(rv.report, "h_infinity_minus = 0 (exact)"));
}

TEST_CASE("coleman reports the norm and its checks", "[cli]") {
    auto c = cfg("coleman", "", 0);
    c.series_file = temp_file("ptower_s1.json", R"({"ring":{"p":3,"pN":"exact"},"coeffs":["1","3"]})");
    auto r = run_command(c);
    REQUIRE(r.exit_code == kOk);
    REQUIRE(has_line(r.report, "N(f) = 19 + 27T"));
    c.series_file = temp_file("ptower_s2.json", R"({"ring":{"p":3,"pN":"3^6"},"coeffs":["1","1"]})");
    REQUIRE(has_line(run_command(c).report, "f is a fixed point of N"));
    auto rnd = cfg("coleman", "", 3);
    rnd.random_unit = true;
    rnd.seed = 9;
    rnd.M = 20;
    auto rr = run_command(rnd);
    REQUIRE(rr.exit_code == kOk);
    REQUIRE(has_line(rr.report, "multiplicativity N(fg) = N(f) N(g): ok"));
}

TEST_CASE("groupcong single instances and corpus", "[cli]") {
    auto c = cfg("groupcong", "", 0);
    c.builtin = "heisenberg3";
    c.l_list = "2";
    c.n = 1;
    REQUIRE(run_command(c).exit_code == kOk);
    c.l_list = "3";
    REQUIRE_THROWS_WITH(run_command(c), "l must differ from p");
    auto f = cfg("groupcong", "", 0);
    std::string table = "[";
    for (int a = 0; a < 9; ++a) {
        table += a ? ",[" : "[";
        for (int b = 0; b < 9; ++b) table += (b ? "," : "") + std::to_string((a + b) % 9);
        table += "]";
    }
    f.group_file = temp_file("ptower_z9.json", R"({"name":"z9","table":)" + table + "]}");
    f.l_list = "2";
    f.corpus = "perm";
    auto r = run_command(f);
    REQUIRE(r.exit_code == kOk);
    REQUIRE(r.report["groups"][0]["corpus"]["failed"] == 0);
}

TEST_CASE("lvalue and k2", "[cli]") {
    auto c = cfg("lvalue", "", 0);
    c.character = "quad:-23";
    auto r = run_command(c);
    REQUIRE(r.report["L(0)"] == "3");
    auto k = cfg("k2", "Q", 0);
    REQUIRE(run_command(k).report["k2_order"] == "2");
    auto k5 = cfg("k2", "Qsqrt:5", 0);
    REQUIRE(run_command(k5).report["k2_order"] == "4");
}

TEST_CASE("usage errors", "[cli]") {
    REQUIRE_THROWS_AS(run_command(cfg("hminus", "Qzeta:3", 0)), UsageError);
    REQUIRE_THROWS_AS(run_command(cfg("hminus", "Qsqrt:5", 3)), UsageError);
    REQUIRE_THROWS_AS(run_command(cfg("hminus", "Qsqrt:9", 3)), UsageError);
    REQUIRE_THROWS_AS(run_command(cfg("nothing", "Q", 3)), UsageError);
    auto c = cfg("limits", "Qzeta:3", 3);
    c.hplus = "abc";
    REQUIRE_THROWS_AS(run_command(c), UsageError);
    auto g = cfg("groupcong", "", 0);
    g.builtin = "z512";
    REQUIRE_THROWS_AS(run_command(g), ResourceError);
}

TEST_CASE("TSV carries the same data as JSON", "[cli]") {
    auto c = cfg("hminus", "Qzeta:4", 2);
    c.levels = 2;
    auto r = run_command(c);
    std::string tsv = render(r.report, "tsv");
    std::vector<std::string> leaves;
    flatten(r.report, "", leaves);
    for (auto& l : leaves) REQUIRE(tsv.find(l + "\n") != std::string::npos);
    for (auto& l : r.report["lines"]) REQUIRE(tsv.find(l.get<std::string>() + "\n") != std::string::npos);
    REQUIRE(Json::parse(render(r.report, "json")) == r.report);
}

TEST_CASE("reports do not depend on the worker count", "[cli]") {
    for (auto c : {cfg("hminus", "Qzeta:4", 3), cfg("limits", "Qzeta:3", 3)}) {
        c.jobs = 1;
        auto a = render(run_command(c).report, "json");
        c.jobs = 8;
        auto b = render(run_command(c).report, "json");
        REQUIRE(a == b);
    }
}

TEST_CASE("the cache is reused across runs", "[cli]") {
    auto dir = std::filesystem::temp_directory_path() / "ptower_cli_cache";
    std::filesystem::remove_all(dir);
    auto c = cfg("hminus", "Qzeta:3", 3);
    c.cache_dir = dir.string();
    auto first = run_command(c);
    REQUIRE(first.report["cache_hits"] == 0);
    auto second = run_command(c);
    REQUIRE(second.report["cache_hits"].get<std::size_t>() > 0);
    REQUIRE(first.report["levels"] == second.report["levels"]);
    std::filesystem::remove_all(dir);
}
