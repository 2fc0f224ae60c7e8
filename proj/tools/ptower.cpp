// ptower: p-adic limits along cyclotomic towers, Coleman norms, and p-group congruences.
// Exit codes: 0 every check passed, 1 a check failed, 2 usage error, 3 resource limit.

#include <CLI11.hpp>
#include <iostream>

#include "ptower/cli/commands.hpp"

using namespace ptower;

int main(int argc, char** argv) {
    CLI::App app{"p-adic limits along cyclotomic Z_p-towers"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    RunConfig c;

    auto common = [&](CLI::App* s) {
        s->add_option("--tower", c.tower, "base field: Q, Qzeta:m, Qsqrt:d, or a JSON spec");
        s->add_option("--p", c.p, "the prime p");
        s->add_option("--prec", c.prec, "target precision exponent N (p^N)");
        s->add_option("--levels", c.levels, "highest tower level to compute");
        s->add_option("--mode", c.mode, "exact or modular")->check(CLI::IsMember({"exact", "modular"}));
        s->add_option("--policy", c.policy, "unit-index policy: auto, q=1, q=2, or a table");
        s->add_option("--hplus", c.hplus, "h_infinity^+ as a rational, if known");
        s->add_option("--format", c.format, "json or tsv")->check(CLI::IsMember({"json", "tsv"}));
        s->add_option("--cache-dir", c.cache_dir, "directory for the Bernoulli cache");
        s->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
        s->add_option("--seed", c.seed, "random seed");
    };

    auto* hm = app.add_subcommand("hminus", "relative class numbers along the tower, two ways");
    auto* li = app.add_subcommand("limits", "certified limits and the identity web");
    auto* lv = app.add_subcommand("lvalue", "Bernoulli numbers, L-values, p-adic L-values");
    auto* k2 = app.add_subcommand("k2", "orders of K_2 of rings of integers");
    auto* co = app.add_subcommand("coleman", "Coleman norm operator on a power series");
    auto* gc = app.add_subcommand("groupcong", "fixed-point congruences for finite p-groups");
    for (auto* s : {hm, li, lv, k2, co, gc}) common(s);
    lv->add_option("--char", c.character, "character label, quad:D, omega:p, or trivial");
    co->add_option("--series", c.series_file, "series JSON file");
    co->add_flag("--random-unit", c.random_unit, "use a seeded random unit series");
    co->add_option("--m", c.m, "coefficient ring Z_p[mu_m] for --random-unit");
    co->add_option("--M", c.M, "truncation order for --random-unit");
    co->add_option("--d", c.d, "iterate N^d (default: residue degree)");
    co->add_option("--s", c.s, "evaluation shift s for finite products");
    gc->add_option("--group", c.group_file, "group JSON file (table or permutations)");
    gc->add_option("--builtin", c.builtin, "builtin group name, or 'all'");
    gc->add_option("--corpus", c.corpus, "perm or full")->check(CLI::IsMember({"perm", "full"}));
    gc->add_option("--l", c.l_list, "comma-separated primes l != p");
    gc->add_option("--n", c.n, "level n of N_n");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int r = app.exit(e);
        return r == 0 ? kOk : kUsage;
    }
    c.command = app.get_subcommands().front()->get_name();
    try {
        CommandResult r = run_command(c);
        std::cout << render(r.report, c.format);
        return r.exit_code;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return kResource;
    } catch (const PrecisionError& e) {
        std::cerr << "precision error: " << e.what() << "\n";
        return kResource;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCheckFailed;
    }
}
