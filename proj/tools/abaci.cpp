// abaci: exact lattice-walk counts, 2-adic valuations, abacus sums, and the
// equality-case automata. Subcommands: walks, verify, automaton, crosscheck,
// cache. Exit codes: 0 ok, 1 verification failure/mismatch, 2 usage error,
// 3 resource limit.

#include "CLI11.hpp"
#include "abaci/automaton.hpp"
#include "abaci/io.hpp"
#include "abaci/residue.hpp"
#include "abaci/verify.hpp"
#include "abaci/walks.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>

using namespace abaci;

namespace {

struct CacheSession {
    std::unique_ptr<io::SequenceCache> cache;
    std::string path;

    explicit CacheSession(const std::string& p) : path(p) {
        if (!path.empty()) cache = std::make_unique<io::SequenceCache>(path);
    }
    void flush(walks::Tables& tables) {
        if (!cache) return;
        tables.flush_cache();
        cache->save(path);
    }
};

int run_walks(u32 d, u32 nmax, bool star, const std::string& format, u32 jobs,
              const std::string& cache_path) {
    CacheSession session(cache_path);
    walks::Tables tables(session.cache.get());
    std::cout << verify::render_walk_table(tables, d, nmax, star, format, jobs);
    session.flush(tables);
    return 0;
}

int run_verify(const std::string& scenario_name, u32 nmax, verify::Params prm,
               const std::string& format, const std::string& cache_path) {
    auto scenario = verify::parse_scenario(scenario_name);
    if (!scenario) throw CLI::ValidationError("unknown scenario '" + scenario_name + "'");
    CacheSession session(cache_path);
    walks::Tables tables(session.cache.get());
    auto report = verify::run_scenario(*scenario, prm, nmax, tables);
    std::cout << (format == "json" ? verify::render_report_json(report)
                                   : verify::render_report_tsv(report));
    session.flush(tables);
    return report.failures == 0 ? 0 : 1;
}

int run_automaton(u32 p, u32 r, std::vector<i64> e_entries, const std::string& poly_spec,
                  const std::string& halt_name, const std::string& alphabet_name,
                  bool full_alphabet, bool raw, u64 state_limit, const std::string& format,
                  u32 crosscheck_nmax, const std::string& scenario) {
    ExponentVector e(std::move(e_entries));
    automata::Halt halt;
    if (halt_name == "empty")
        halt = automata::Halt::at_empty;
    else if (halt_name == "single-letter")
        halt = automata::Halt::at_single_letter;
    else
        throw CLI::ValidationError("--halt must be empty or single-letter");
    abacus::AlphabetMode mode;
    if (alphabet_name == "multiset")
        mode = abacus::AlphabetMode::multiset;
    else if (alphabet_name == "digit-sum")
        mode = abacus::AlphabetMode::digit_sum;
    else
        throw CLI::ValidationError("--alphabet must be multiset or digit-sum");

    reduction::SymPoly poly = reduction::SymPoly::constant(p, r, 1, 1);
    if (poly_spec == "sum")
        poly = reduction::SymPoly::linear(p, r, 1, 0, 1);
    else if (poly_spec == "sum1")
        poly = reduction::SymPoly::linear(p, r, 1, 1, 1);
    else if (poly_spec != "1")
        throw CLI::ValidationError("--poly must be 1, sum or sum1");

    automata::Options opt;
    opt.state_limit = state_limit;
    opt.full_alphabet = full_alphabet;
    auto machine = automata::synthesize(p, r, e, poly, halt, mode, opt);
    if (!raw) machine = machine.minimized();
    std::cout << machine.dump(format);

    if (crosscheck_nmax == 0) return 0;
    if (full_alphabet)
        throw CLI::ValidationError("--crosscheck runs on digit words; drop --full-alphabet");

    std::function<bool(const Nat&)> direct;
    walks::Tables tables;
    if (scenario == "prop-odd") {
        auto probe = std::make_shared<verify::OddBinomialSumProbe>(crosscheck_nmax);
        direct = [probe](const Nat& n) {
            return probe->attains_bound(numth::nat_to_u64(n, "n"));
        };
    } else if (scenario == "prop-domb") {
        tables.wstar(4, crosscheck_nmax);
        direct = [&tables](const Nat& n) {
            u32 nn = static_cast<u32>(n);
            return tables.walk_valuation(4, nn).w_star == 2 * numth::digit_sum(n, 2);
        };
    } else if (scenario == "theorem") {
        const u32 d = 2 * r;
        tables.wstar(d, crosscheck_nmax);
        direct = [d, &tables](const Nat& n) {
            u32 nn = static_cast<u32>(n);
            return tables.walk_valuation(d, nn).w == walks::theorem_bound(d, n);
        };
    } else if (scenario == "prop-mult") {
        if (p != 2 || r % 2 != 0) throw CLI::ValidationError("prop-mult needs p=2, r=2k");
        const u32 k = r / 2;
        const Nat nu_k = numth::nu(Nat(k), 2);
        direct = [k, nu_k](const Nat& n) {
            Nat sum = numth::carry_free_multinomial_sum(n, 2, 2 * k);
            return numth::nu(sum, 2) == numth::digit_sum(n, 2) + nu_k;
        };
    } else if (scenario == "prop-tri" || scenario == "prop-prime") {
        if (r % p != 0) throw CLI::ValidationError("prop-prime needs r = kp");
        const Nat nu_k = numth::nu(Nat(r / p), p);
        u32 bound_max = 0;
        for (Nat n = 1; n <= crosscheck_nmax; ++n)
            bound_max = std::max(bound_max,
                                 static_cast<u32>(numth::nonzero_digit_count(n, p) + nu_k));
        auto engine = std::make_shared<reduction::WordSumEngine>(p, r, ExponentVector{-1},
                                                                 bound_max + 2);
        direct = [engine, p, nu_k](const Nat& n) {
            auto res = engine->evaluate(n);
            return res.valuation &&
                   Nat(*res.valuation) == numth::nonzero_digit_count(n, p) + nu_k;
        };
    } else {
        throw CLI::ValidationError("unknown --scenario '" + scenario + "'");
    }

    auto report = automata::cross_check_language(machine, crosscheck_nmax, direct);
    std::cout << "#crosscheck scenario=" << scenario << " checked=" << report.checked
              << " mismatches=" << report.mismatches.size() << "\n";
    for (const Nat& n : report.mismatches) std::cout << "#mismatch n=" << n.str() << "\n";
    return report.mismatches.empty() ? 0 : 1;
}

int run_crosscheck(const std::string& bfile_path, const std::string& kind, u32 d, u32 ga, u32 gb,
                   u32 gc, u32 uk, u32 ul, const std::string& cache_path) {
    auto entries = io::read_bfile(bfile_path);
    CacheSession session(cache_path);
    walks::Tables tables(session.cache.get());

    auto compute = [&](i64 n) -> Int {
        if (n < 0) throw CLI::ValidationError("b-file index must be nonnegative for " + kind);
        u32 nn = static_cast<u32>(n);
        if (kind == "W") return Int(tables.walk_count(d, nn));
        if (kind == "Wstar") return Int(tables.wstar(d, nn));
        if (kind == "Domb") return Int(tables.wstar(4, nn));
        if (kind == "GenDomb") return walks::gen_domb({ga, gb, gc}, nn);
        if (kind == "U") return Int(walks::grid_colorings(uk, ul, nn));
        throw CLI::ValidationError("unknown kind '" + kind + "'");
    };

    u64 mismatches = 0;
    std::cout << "#n\texpected\tcomputed\tstatus\n";
    for (const auto& entry : entries) {
        Int value = compute(entry.n);
        bool ok = value == entry.value;
        if (!ok) ++mismatches;
        std::cout << entry.n << '\t' << entry.value.str() << '\t' << value.str() << '\t'
                  << (ok ? "ok" : "MISMATCH") << '\n';
    }
    std::cout << "#checked " << entries.size() << " mismatches " << mismatches << "\n";
    session.flush(tables);
    return mismatches == 0 ? 0 : 1;
}

int run_cache(const std::string& action, const std::string& cache_path) {
    if (cache_path.empty()) throw CLI::ValidationError("cache command needs --cache PATH");
    if (action == "inspect") {
        io::SequenceCache cache(cache_path);
        std::cout << "#kind\trecords\n";
        for (const auto& [kind, count] : cache.counts_by_kind())
            std::cout << kind << '\t' << count << '\n';
        std::cout << "#total " << cache.size() << "\n";
        return 0;
    }
    if (action == "clear") {
        std::error_code ec;
        std::filesystem::remove(cache_path, ec);
        std::cout << "#cleared " << cache_path << "\n";
        return 0;
    }
    throw CLI::ValidationError("cache action must be inspect or clear");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact lattice-walk counts, 2-adic valuations and abacus-sum automata"};
    app.require_subcommand(1);

    std::string cache_path;
    app.add_option("--cache", cache_path, "sequence cache file (opt-in)")
        ->envname("ABACI_CACHE");

    auto* walks_cmd = app.add_subcommand("walks", "tabulate s_2(n), w_d(n) [, w*_d(n)]");
    u32 w_d = 4, w_nmax = 50, w_jobs = 1;
    bool w_star = false;
    std::string w_format = "tsv";
    walks_cmd->add_option("--d", w_d, "dimension")->check(CLI::PositiveNumber);
    walks_cmd->add_option("--nmax", w_nmax, "rows 1..nmax")->check(CLI::PositiveNumber);
    walks_cmd->add_flag("--star", w_star, "include w*_d(n)");
    walks_cmd->add_option("--format", w_format, "tsv|json");
    walks_cmd->add_option("--jobs", w_jobs, "worker threads")->check(CLI::PositiveNumber);

    auto* verify_cmd = app.add_subcommand("verify", "run a verification scenario");
    std::string v_scenario, v_format = "tsv";
    u32 v_nmax = 50;
    verify::Params v_params;
    verify_cmd->add_option("scenario", v_scenario, "scenario name")->required();
    verify_cmd->add_option("--nmax", v_nmax, "sweep bound")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--d", v_params.d, "dimension (theorem-*)");
    verify_cmd->add_option("--k", v_params.k, "k (prop-mult, prop-prime)");
    verify_cmd->add_option("--e", v_params.e, "exponent (prop-pow)");
    verify_cmd->add_option("--a", v_params.a, "a (prop-gdomb, identity-Wsquare max)");
    verify_cmd->add_option("--b", v_params.b, "b (prop-gdomb, identity-Wsquare max)");
    verify_cmd->add_option("--p", v_params.p, "prime (prop-prime)");
    verify_cmd->add_option("--jobs", v_params.jobs, "worker threads")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--format", v_format, "tsv|json");

    auto* auto_cmd = app.add_subcommand("automaton", "synthesize and dump an automaton");
    u32 a_p = 2, a_r = 2, a_crosscheck = 0;
    std::vector<i64> a_e{-1};
    std::string a_poly = "1", a_halt = "empty", a_alphabet = "multiset", a_format = "tsv";
    std::string a_scenario = "prop-odd";
    bool a_full = false, a_raw = false;
    u64 a_state_limit = 100000;
    auto_cmd->add_option("--p", a_p, "prime")->check(CLI::PositiveNumber);
    auto_cmd->add_option("--r", a_r, "abacus rows")->check(CLI::PositiveNumber);
    auto_cmd->add_option("--e", a_e, "exponent vector, e.g. --e=-4,1")->delimiter(',');
    auto_cmd->add_option("--poly", a_poly, "initial P: 1|sum|sum1");
    auto_cmd->add_option("--halt", a_halt, "empty|single-letter");
    auto_cmd->add_option("--alphabet", a_alphabet, "multiset|digit-sum");
    auto_cmd->add_flag("--full-alphabet", a_full, "synthesize over the whole alphabet");
    auto_cmd->add_flag("--raw", a_raw, "skip minimization");
    auto_cmd->add_option("--state-limit", a_state_limit, "synthesis state bound");
    auto_cmd->add_option("--format", a_format, "tsv|json");
    auto_cmd->add_option("--crosscheck", a_crosscheck, "compare language vs direct up to n");
    auto_cmd->add_option(
        "--scenario", a_scenario,
        "crosscheck family: prop-odd|prop-domb|prop-mult|prop-tri|prop-prime|theorem");

    auto* cross_cmd = app.add_subcommand("crosscheck", "recompute an OEIS b-file");
    std::string c_bfile, c_kind = "Domb";
    u32 c_d = 4, c_a = 2, c_b = 1, c_c = 1, c_k = 2, c_l = 2;
    cross_cmd->add_option("--bfile", c_bfile, "b-file path")->required();
    cross_cmd->add_option("--kind", c_kind, "W|Wstar|Domb|GenDomb|U");
    cross_cmd->add_option("--d", c_d, "dimension for W/Wstar");
    cross_cmd->add_option("--a", c_a, "GenDomb a");
    cross_cmd->add_option("--b", c_b, "GenDomb b");
    cross_cmd->add_option("--c", c_c, "GenDomb c");
    cross_cmd->add_option("--k", c_k, "U rows of one colour");
    cross_cmd->add_option("--l", c_l, "U rows of the other colour");

    auto* cache_cmd = app.add_subcommand("cache", "inspect or clear the sequence cache");
    std::string cache_action;
    cache_cmd->add_option("action", cache_action, "inspect|clear")->required();

    try {
        app.parse(argc, argv);
        if (*walks_cmd) return run_walks(w_d, w_nmax, w_star, w_format, w_jobs, cache_path);
        if (*verify_cmd) return run_verify(v_scenario, v_nmax, v_params, v_format, cache_path);
        if (*auto_cmd)
            return run_automaton(a_p, a_r, a_e, a_poly, a_halt, a_alphabet, a_full, a_raw,
                                 a_state_limit, a_format, a_crosscheck, a_scenario);
        if (*cross_cmd)
            return run_crosscheck(c_bfile, c_kind, c_d, c_a, c_b, c_c, c_k, c_l, cache_path);
        if (*cache_cmd) return run_cache(cache_action, cache_path);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const resource_error& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return 3;
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
