#pragma once
// Scenario runners for the verification sweeps: the theorem parts, the
// proposition families, the two structural identities and the grid-colouring
// bridge. Every row records the directly computed valuation, the claimed
// bound, the equality flag and the predicted flag; a row passes when the
// bound holds and equality matches the prediction.

#include "abaci/automaton.hpp"
#include "abaci/nat.hpp"
#include "abaci/numth.hpp"
#include "abaci/residue.hpp"
#include "abaci/walks.hpp"

#include <atomic>
#include <bit>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace abaci::verify {

enum class Scenario {
    theorem_a,
    theorem_b,
    theorem_c,
    theorem_d,
    prop_odd,
    prop_pow,
    prop_domb,
    prop_gdomb,
    prop_mult,
    prop_tri,
    prop_prime,
    identity_X,
    identity_Wsquare,
    grid_equal,
};

inline const std::vector<std::pair<std::string, Scenario>>& scenario_names() {
    static const std::vector<std::pair<std::string, Scenario>> names = {
        {"theorem-a", Scenario::theorem_a},   {"theorem-b", Scenario::theorem_b},
        {"theorem-c", Scenario::theorem_c},   {"theorem-d", Scenario::theorem_d},
        {"prop-odd", Scenario::prop_odd},     {"prop-pow", Scenario::prop_pow},
        {"prop-domb", Scenario::prop_domb},   {"prop-gdomb", Scenario::prop_gdomb},
        {"prop-mult", Scenario::prop_mult},   {"prop-tri", Scenario::prop_tri},
        {"prop-prime", Scenario::prop_prime}, {"identity-X", Scenario::identity_X},
        {"identity-Wsquare", Scenario::identity_Wsquare}, {"grid-equal", Scenario::grid_equal}};
    return names;
}

inline std::optional<Scenario> parse_scenario(const std::string& name) {
    for (const auto& [n, s] : scenario_names())
        if (n == name) return s;
    return std::nullopt;
}

inline std::string scenario_name(Scenario s) {
    for (const auto& [n, sc] : scenario_names())
        if (sc == s) return n;
    return "?";
}

struct Params {
    u32 d = 4;      // theorem scenarios
    u32 k = 1;      // prop-mult / prop-prime
    u32 e = 2;      // prop-pow
    u32 a = 2;      // prop-gdomb / identity-Wsquare
    u32 b = 1;      // prop-gdomb / identity-Wsquare
    u32 p = 3;      // prop-prime
    u32 jobs = 1;
};

struct Row {
    std::string key;                // "n=12" or "a=4 b=2 n=3"
    std::optional<Nat> valuation;   // nullopt: only ">= precision" certified
    u32 precision = 0;              // nonzero for residue-engine scenarios
    Nat bound = 0;
    bool equal = false;
    bool predicted = false;
    bool ok = false;
    std::string detail;             // identities: rendered lhs/rhs
};

struct Report {
    Scenario scenario;
    std::vector<Row> rows;
    u64 failures = 0;

    void finish() {
        failures = 0;
        for (const auto& r : rows) failures += r.ok ? 0 : 1;
    }
};

// Deterministic parallel sweep: results land in a pre-sized vector by index.
inline void parallel_index_sweep(u64 count, u32 jobs, const std::function<void(u64)>& body) {
    if (jobs <= 1 || count < 2) {
        for (u64 i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<u64> next{0};
    std::vector<std::thread> pool;
    u32 n_threads = std::min<u64>(jobs, count);
    for (u32 t = 0; t < n_threads; ++t)
        pool.emplace_back([&] {
            for (u64 i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

// ---- direct sums used by the proposition scenarios ----

// Sum of the e-th powers of the binomial coefficients in row n.
inline Nat binomial_power_sum(u64 n, u32 e) {
    Nat total = 0, binom = 1;
    for (u64 x = 0; x <= n; ++x) {
        total += pow_nat(binom, e);
        binom = binom * (n - x) / (x + 1);
    }
    return total;
}

// Equality decision nu_2(sum of odd binomials in row n) == s_2(n), done in
// 64-bit residues: odd parts of factorials are units mod 2^64, and a zero
// residue can only mean nu >= 64 > s_2(n).
class OddBinomialSumProbe {
public:
    explicit OddBinomialSumProbe(u64 n_max) {
        theta_.resize(n_max + 1);
        theta_[0] = 1;
        for (u64 m = 1; m <= n_max; ++m) {
            u64 odd = m >> std::countr_zero(m);
            theta_[m] = theta_[m - 1] * odd;
        }
    }

    bool attains_bound(u64 n) const {
        u64 num = theta_[n];
        u64 sum = 0;
        // carry-free x for p = 2 are the submasks of n
        u64 x = n;
        for (;;) {
            sum += num * inv64(theta_[x]) * inv64(theta_[n - x]);
            if (x == 0) break;
            x = (x - 1) & n;
        }
        u32 s = static_cast<u32>(std::popcount(n));
        return sum != 0 && static_cast<u32>(std::countr_zero(sum)) == s;
    }

private:
    static u64 inv64(u64 a) {
        u64 x = a;  // Newton: x *= 2 - a x, doubles correct bits
        for (int i = 0; i < 5; ++i) x *= 2 - a * x;
        return x;
    }
    std::vector<u64> theta_;
};

// Ternary-language predicate of Prop tri: the expansion begins with 1 and
// avoids the subwords 11 and 02.
inline bool tri_equality_language(const Nat& n) {
    if (n == 0) return false;
    auto d = numth::digits(n, 3);
    if (d[0] != 1) return false;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
        if (d[i] == 1 && d[i + 1] == 1) return false;
        if (d[i] == 0 && d[i + 1] == 2) return false;
    }
    return true;
}

// ---- scenario runners ----

inline Report run_theorem(Scenario sc, u32 d, u32 n_max, walks::Tables& tables, u32 jobs) {
    const u32 v2d = static_cast<u32>(numth::nu(Nat(d), 2));
    const u32 expect =
        sc == Scenario::theorem_a ? 0 : sc == Scenario::theorem_b ? 1 : sc == Scenario::theorem_c ? 2 : 3;
    if ((expect < 3 && v2d != expect) || (expect == 3 && v2d < 3))
        throw std::invalid_argument("dimension " + std::to_string(d) + " is not in this theorem part");

    tables.wstar(d, n_max);  // build the triangle once
    Report rep{sc, std::vector<Row>(n_max), 0};
    parallel_index_sweep(n_max, jobs, [&](u64 i) {
        u32 n = static_cast<u32>(i) + 1;
        auto chk = walks::theorem_check(d, n, tables);
        Nat w = tables.walk_valuation(d, n).w;
        Row row;
        row.key = "n=" + std::to_string(n);
        row.valuation = w;
        row.bound = chk.bound;
        row.equal = chk.attained;
        row.predicted = chk.predicted;
        row.ok = w >= chk.bound && chk.attained == chk.predicted;
        rep.rows[i] = std::move(row);
    });
    rep.finish();
    return rep;
}

// Shared shape: exact value, bound, equality predicate.
inline Report run_valuation_sweep(Scenario sc, u32 n_max, u32 jobs,
                                  const std::function<Nat(u32)>& value,
                                  const std::function<Nat(u32)>& bound,
                                  const std::function<bool(u32)>& predicted,
                                  bool equality_everywhere = false) {
    Report rep{sc, std::vector<Row>(n_max), 0};
    parallel_index_sweep(n_max, jobs, [&](u64 i) {
        u32 n = static_cast<u32>(i) + 1;
        Nat val = value(n);
        Row row;
        row.key = "n=" + std::to_string(n);
        Nat nu = numth::nu(val, 2);
        row.valuation = nu;
        row.bound = bound(n);
        row.equal = nu == row.bound;
        row.predicted = predicted(n);
        row.ok = nu >= row.bound && row.equal == row.predicted &&
                 (!equality_everywhere || row.equal);
        rep.rows[i] = std::move(row);
    });
    rep.finish();
    return rep;
}

inline Report run_prop_odd(u32 n_max, u32 jobs) {
    return run_valuation_sweep(
        Scenario::prop_odd, n_max, jobs,
        [](u32 n) { return numth::carry_free_multinomial_sum(n, 2, 2); },
        [](u32 n) { return numth::digit_sum(n, 2); },
        [](u32 n) { return !numth::has_adjacent_ones(n); });
}

inline Report run_prop_pow(u32 e, u32 n_max, u32 jobs) {
    if (e < 2) throw std::invalid_argument("prop-pow needs e >= 2");
    bool even = e % 2 == 0;
    return run_valuation_sweep(
        Scenario::prop_pow, n_max, jobs, [e](u32 n) { return binomial_power_sum(n, e); },
        [](u32 n) { return numth::digit_sum(n, 2); },
        [even](u32 n) { return even || !numth::has_adjacent_ones(n); }, even);
}

inline Report run_prop_domb(u32 n_max, walks::Tables& tables, u32 jobs) {
    tables.wstar(4, n_max);
    return run_valuation_sweep(
        Scenario::prop_domb, n_max, jobs, [&](u32 n) { return tables.wstar(4, n); },
        [](u32 n) { return 2 * numth::digit_sum(n, 2); },
        [](u32 n) { return !numth::has_adjacent_ones(n); });
}

inline Report run_prop_gdomb(u32 a, u32 b, u32 n_max, u32 jobs) {
    if (a + b < 2) throw std::invalid_argument("prop-gdomb needs a + b >= 2");
    bool even = (a + b) % 2 == 0;
    return run_valuation_sweep(
        Scenario::prop_gdomb, n_max, jobs,
        [a, b](u32 n) { return Nat(walks::gen_domb({a, b, b}, n)); },
        [b](u32 n) { return (b + 1) * numth::digit_sum(n, 2); },
        [even](u32 n) { return even || !numth::has_adjacent_ones(n); }, even);
}

inline Report run_prop_mult(u32 k, u32 n_max, u32 jobs) {
    if (k < 1) throw std::invalid_argument("prop-mult needs k >= 1");
    const Nat nu_k = numth::nu(Nat(k), 2);
    return run_valuation_sweep(
        Scenario::prop_mult, n_max, jobs,
        [k](u32 n) { return numth::carry_free_multinomial_sum(n, 2, 2 * k); },
        [nu_k](u32 n) { return numth::digit_sum(n, 2) + nu_k; },
        [k](u32 n) {
            return k % 2 == 1 ? !numth::has_adjacent_ones(n) : numth::ones_before_zeros(n);
        });
}

// Residue-engine sweep shared by prop-tri and prop-prime. The precision is
// bound_max + 2, enough to certify the bound and decide equality everywhere.
inline Report run_carry_free_sweep(Scenario sc, u32 p, u32 r, u32 n_max,
                                   const std::function<Nat(const Nat&)>& bound,
                                   const std::function<bool(const Nat&)>& predicted) {
    u32 bound_max = 0;
    for (Nat n = 1; n <= n_max; ++n) bound_max = std::max(bound_max, static_cast<u32>(bound(n)));
    const u32 K = bound_max + 2;
    reduction::WordSumEngine engine(p, r, ExponentVector{-1}, K);

    Report rep{sc, {}, 0};
    for (Nat n = 1; n <= n_max; ++n) {
        auto res = engine.evaluate(n);
        Row row;
        row.key = "n=" + n.str();
        row.precision = K;
        row.bound = bound(n);
        if (res.valuation) {
            row.valuation = Nat(*res.valuation);
            row.equal = *res.valuation == row.bound;
        } else {
            row.equal = false;  // nu >= K > bound
        }
        row.predicted = predicted(n);
        const bool bound_ok = !res.valuation || Nat(*res.valuation) >= row.bound;
        row.ok = bound_ok && row.equal == row.predicted;
        rep.rows.push_back(std::move(row));
    }
    rep.finish();
    return rep;
}

inline Report run_prop_tri(u32 n_max) {
    return run_carry_free_sweep(
        Scenario::prop_tri, 3, 3, n_max,
        [](const Nat& n) { return numth::nonzero_digit_count(n, 3); }, tri_equality_language);
}

// prop-prime: sum of kp-nomials coprime to p; the prediction is the
// synthesized early-halt automaton (no closed-form description is known).
inline Report run_prop_prime(u32 p, u32 k, u32 n_max) {
    const u32 r = k * p;
    const Nat nu_k = numth::nu(Nat(k), p);
    auto machine = automata::synthesize(p, r, ExponentVector{-1},
                                        reduction::SymPoly::constant(p, r, 1, 1),
                                        automata::Halt::at_single_letter,
                                        abacus::AlphabetMode::digit_sum)
                       .minimized();
    return run_carry_free_sweep(
        Scenario::prop_prime, p, r, n_max,
        [p, nu_k](const Nat& n) { return numth::nonzero_digit_count(n, p) + nu_k; },
        [&machine](const Nat& n) { return machine.accepts(n); });
}

inline Report run_identity_x(u32 n_max, walks::Tables& tables, u32 jobs) {
    tables.wstar(4, n_max);
    Report rep{Scenario::identity_X, std::vector<Row>(n_max + 1), 0};
    parallel_index_sweep(n_max + 1, jobs, [&](u64 i) {
        u32 n = static_cast<u32>(i);
        Int lhs = walks::chan_zudilin_rhs(n);
        Nat rhs = tables.wstar(4, n);
        Row row;
        row.key = "n=" + std::to_string(n);
        row.ok = lhs == Int(rhs);
        row.equal = row.predicted = row.ok;
        row.detail = lhs.str();
        rep.rows[i] = std::move(row);
    });
    rep.finish();
    return rep;
}

inline Report run_identity_wsquare(u32 a_max, u32 b_max, u32 n_max, walks::Tables& tables) {
    Report rep{Scenario::identity_Wsquare, {}, 0};
    for (u32 a = 1; a <= a_max; ++a)
        for (u32 b = 1; b <= b_max; ++b)
            for (u32 n = 0; n <= n_max; ++n) {
                Row row;
                row.key = "a=" + std::to_string(a) + " b=" + std::to_string(b) +
                          " n=" + std::to_string(n);
                row.ok = walks::split_identity_check(a, b, n, tables);
                row.equal = row.predicted = row.ok;
                rep.rows.push_back(std::move(row));
            }
    rep.finish();
    return rep;
}

inline Report run_grid_equal(u32 n_max, walks::Tables& tables) {
    Report rep{Scenario::grid_equal, {}, 0};
    for (u32 n = 0; n <= n_max; ++n) {
        Nat u10 = walks::grid_colorings(1, 0, n);
        Nat u11 = walks::grid_colorings(1, 1, n);
        Nat central = numth::binomial(2 * static_cast<u64>(n), n);
        Row row;
        row.key = "n=" + std::to_string(n) + " U(1,0)=U(1,1)=C(2n,n)";
        row.ok = u10 == central && u11 == central;
        row.equal = row.predicted = row.ok;
        rep.rows.push_back(std::move(row));

        Row row2;
        row2.key = "n=" + std::to_string(n) + " B(2,n)=W_3(n)";
        row2.ok = walks::grid_colorings(2, 2, n) == tables.walk_count(3, n);
        row2.equal = row2.predicted = row2.ok;
        rep.rows.push_back(std::move(row2));
    }
    rep.finish();
    return rep;
}

inline Report run_scenario(Scenario sc, const Params& prm, u32 n_max, walks::Tables& tables) {
    switch (sc) {
        case Scenario::theorem_a:
        case Scenario::theorem_b:
        case Scenario::theorem_c:
        case Scenario::theorem_d:
            return run_theorem(sc, prm.d, n_max, tables, prm.jobs);
        case Scenario::prop_odd:
            return run_prop_odd(n_max, prm.jobs);
        case Scenario::prop_pow:
            return run_prop_pow(prm.e, n_max, prm.jobs);
        case Scenario::prop_domb:
            return run_prop_domb(n_max, tables, prm.jobs);
        case Scenario::prop_gdomb:
            return run_prop_gdomb(prm.a, prm.b, n_max, prm.jobs);
        case Scenario::prop_mult:
            return run_prop_mult(prm.k, n_max, prm.jobs);
        case Scenario::prop_tri:
            return run_prop_tri(n_max);
        case Scenario::prop_prime:
            return run_prop_prime(prm.p, prm.k, n_max);
        case Scenario::identity_X:
            return run_identity_x(n_max, tables, prm.jobs);
        case Scenario::identity_Wsquare:
            return run_identity_wsquare(prm.a, prm.b, n_max, tables);
        case Scenario::grid_equal:
            return run_grid_equal(n_max, tables);
    }
    throw std::invalid_argument("unknown scenario");
}

// ---- language cross-checks (automaton vs direct valuations) ----

struct LanguageScenario {
    std::string name;
    automata::Automaton machine;                     // minimized
    std::function<bool(const Nat&)> direct_equality; // nu == bound, computed directly
};

inline LanguageScenario make_prop_odd_language(u64 n_max) {
    LanguageScenario ls;
    ls.name = "prop-odd";
    ls.machine = automata::synthesize(2, 2, ExponentVector{-1},
                                      reduction::SymPoly::constant(2, 2, 1, 1),
                                      automata::Halt::at_empty, abacus::AlphabetMode::multiset)
                     .minimized();
    auto probe = std::make_shared<OddBinomialSumProbe>(n_max);
    ls.direct_equality = [probe](const Nat& n) {
        return probe->attains_bound(numth::nat_to_u64(n, "prop-odd n"));
    };
    return ls;
}

inline LanguageScenario make_theorem_language(u32 d, walks::Tables& tables) {
    const u32 g = d / 2;
    LanguageScenario ls;
    ls.name = "theorem d=" + std::to_string(d);
    ls.machine = automata::synthesize(2, g, ExponentVector{-4, 1},
                                      reduction::SymPoly::constant(2, g, 1, 1),
                                      automata::Halt::at_single_letter,
                                      abacus::AlphabetMode::multiset)
                     .minimized();
    ls.direct_equality = [d, &tables](const Nat& n) {
        u32 nn = static_cast<u32>(n);
        return tables.walk_valuation(d, nn).w == walks::theorem_bound(d, n);
    };
    return ls;
}

// ---- rendering ----

inline std::string render_report_tsv(const Report& rep) {
    std::ostringstream out;
    out << "# scenario " << scenario_name(rep.scenario) << "\n";
    out << "#key\tvaluation\tbound\tequal\tpredicted\tstatus\n";
    for (const auto& r : rep.rows) {
        out << r.key << '\t';
        if (r.valuation)
            out << r.valuation->str();
        else
            out << ">=" << r.precision;
        out << '\t' << r.bound.str() << '\t' << (r.equal ? 1 : 0) << '\t' << (r.predicted ? 1 : 0)
            << '\t' << (r.ok ? "ok" : "FAIL") << '\n';
    }
    out << "# failures " << rep.failures << "\n";
    return out.str();
}

inline std::string render_report_json(const Report& rep) {
    nlohmann::ordered_json j;
    j["scenario"] = scenario_name(rep.scenario);
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rep.rows) {
        nlohmann::ordered_json row;
        row["key"] = r.key;
        row["valuation"] = r.valuation ? r.valuation->str() : ">=" + std::to_string(r.precision);
        row["bound"] = r.bound.str();
        row["equal"] = r.equal;
        row["predicted"] = r.predicted;
        row["ok"] = r.ok;
        j["rows"].push_back(row);
    }
    j["failures"] = rep.failures;
    return j.dump(2) + "\n";
}

// Walk-table rows (n, s_2, w_d [, w*_d]).
inline std::string render_walk_table(walks::Tables& tables, u32 d, u32 n_max, bool star,
                                     const std::string& format, u32 jobs = 1) {
    tables.wstar(d, n_max);
    std::vector<walks::Valuations> vals(n_max);
    parallel_index_sweep(n_max, jobs,
                         [&](u64 i) { vals[i] = tables.walk_valuation(d, static_cast<u32>(i) + 1); });
    if (format == "json") {
        nlohmann::ordered_json j;
        j["d"] = d;
        j["rows"] = nlohmann::ordered_json::array();
        for (u32 n = 1; n <= n_max; ++n) {
            nlohmann::ordered_json row;
            row["n"] = n;
            row["s2"] = vals[n - 1].s.str();
            row["w"] = vals[n - 1].w.str();
            if (star) row["wstar"] = vals[n - 1].w_star.str();
            j["rows"].push_back(row);
        }
        return j.dump(2) + "\n";
    }
    if (format != "tsv") throw std::invalid_argument("unknown format '" + format + "'");
    std::ostringstream out;
    out << "#n\ts2\tw_" << d << (star ? "\twstar_" + std::to_string(d) : "") << "\n";
    for (u32 n = 1; n <= n_max; ++n) {
        out << n << '\t' << vals[n - 1].s.str() << '\t' << vals[n - 1].w.str();
        if (star) out << '\t' << vals[n - 1].w_star.str();
        out << '\n';
    }
    return out.str();
}

}  // namespace abaci::verify
