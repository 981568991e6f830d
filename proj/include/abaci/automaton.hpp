#pragma once
// Synthesis of the equality-case automata: close the reduction state space
// (fold, P mod p) under reduce_letter, read words right to left, minimize,
// dump transition tables.
//
// halt-empty acceptance: the final residual is odd at the origin, i.e. the
// valuation of the sum equals lambda(T). halt-single-letter acceptance (the
// early-halt construction): the word's leftmost letter is the unit letter
// and the residual before consuming it is nonzero at (0,...,0,1).

#include "abaci/abacus.hpp"
#include "abaci/nat.hpp"
#include "abaci/reduction.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

namespace abaci::automata {

using reduction::Fold;
using reduction::Halt;
using reduction::SymPoly;

struct Options {
    u64 state_limit = 100'000;
    bool full_alphabet = false;  // default: only the letters cf(n)-words use
};

class Automaton {
public:
    struct StateInfo {
        std::string label;
        bool accepting = false;
    };

    abacus::AlphabetRef alphabet;
    std::vector<u32> letter_ids;              // automaton letter -> alphabet letter
    std::vector<std::string> letter_symbols;  // display, e.g. "0", "1"
    std::vector<StateInfo> states;
    std::vector<std::vector<u32>> delta;  // [state][letter]
    u32 initial = 0;
    Halt halt = Halt::at_empty;
    u32 unit_letter = 0;  // letter index with column sum 1 (single-letter mode)

    u32 letter_count() const { return static_cast<u32>(letter_ids.size()); }
    u32 state_count() const { return static_cast<u32>(states.size()); }

    // Letter-index word for the base-p digits of n (restricted alphabets
    // index letters by their column sum).
    std::vector<u32> word_of(const Nat& n) const {
        std::vector<u32> w;
        if (n == 0) return w;
        for (u32 d : numth::digits(n, alphabet->p())) {
            if (d >= letter_count()) throw std::invalid_argument("word_of: digit not in alphabet");
            w.push_back(d);
        }
        return w;
    }

    // Consume the word right to left. In single-letter mode the leftmost
    // letter is not consumed: it must be the unit letter and the state
    // reached must accept.
    bool run(const std::vector<u32>& word) const {
        for (u32 l : word)
            if (l >= letter_count()) throw std::invalid_argument("run: foreign letter");
        u32 s = initial;
        const std::size_t stop = halt == Halt::at_single_letter ? 1 : 0;
        for (std::size_t i = word.size(); i-- > stop;) s = delta[s][word[i]];
        if (halt == Halt::at_single_letter)
            return !word.empty() && word.front() == unit_letter && states[s].accepting;
        return states[s].accepting;
    }

    bool accepts(const Nat& n) const { return run(word_of(n)); }

    // Moore minimization; the result is BFS-canonical from the initial state.
    Automaton minimized() const {
        const u32 n = state_count(), m = letter_count();
        std::vector<u32> cls(n);
        for (u32 s = 0; s < n; ++s) cls[s] = states[s].accepting ? 1 : 0;
        for (;;) {
            std::map<std::vector<u32>, u32> sig_index;
            std::vector<u32> next(n);
            for (u32 s = 0; s < n; ++s) {
                std::vector<u32> sig{cls[s]};
                for (u32 l = 0; l < m; ++l) sig.push_back(cls[delta[s][l]]);
                next[s] = sig_index.emplace(sig, static_cast<u32>(sig_index.size())).first->second;
            }
            if (next == cls) break;
            cls = next;
        }

        Automaton out;
        out.alphabet = alphabet;
        out.letter_ids = letter_ids;
        out.letter_symbols = letter_symbols;
        out.halt = halt;
        out.unit_letter = unit_letter;

        std::map<u32, u32> renumber;  // class -> new state id, BFS order
        std::vector<u32> rep;         // new state id -> representative old state
        std::queue<u32> bfs;
        auto discover = [&](u32 old_state) {
            u32 c = cls[old_state];
            if (renumber.count(c)) return renumber[c];
            u32 id = static_cast<u32>(renumber.size());
            renumber[c] = id;
            rep.push_back(old_state);
            bfs.push(old_state);
            return id;
        };
        out.initial = discover(initial);
        while (!bfs.empty()) {
            u32 s = bfs.front();
            bfs.pop();
            for (u32 l = 0; l < m; ++l) discover(delta[s][l]);
        }
        out.states.resize(rep.size());
        out.delta.assign(rep.size(), std::vector<u32>(m, 0));
        for (u32 id = 0; id < rep.size(); ++id) {
            out.states[id] = states[rep[id]];
            for (u32 l = 0; l < m; ++l) out.delta[id][l] = renumber[cls[delta[rep[id]][l]]];
        }
        out.dedup_labels();
        return out;
    }

    // Structural equality of canonical (BFS-ordered) automata.
    bool isomorphic_to(const Automaton& o) const {
        if (letter_symbols != o.letter_symbols) return false;
        auto key = [](const Automaton& a) {
            std::vector<std::vector<u32>> k;
            for (u32 s = 0; s < a.state_count(); ++s) {
                std::vector<u32> row{a.states[s].accepting ? u32(1) : u32(0)};
                row.insert(row.end(), a.delta[s].begin(), a.delta[s].end());
                k.push_back(row);
            }
            k.push_back({a.initial});
            return k;
        };
        return key(*this) == key(o);
    }

    std::string dump_tsv() const {
        std::string out = "#initial " + states[initial].label + "\n";
        std::string acc;
        for (const auto& st : states)
            if (st.accepting) acc += (acc.empty() ? "" : ", ") + st.label;
        out += "#accepting " + acc + "\n";
        for (u32 s = 0; s < state_count(); ++s) {
            // merge letters sharing a target, in letter order
            std::vector<bool> done(letter_count(), false);
            for (u32 l = 0; l < letter_count(); ++l) {
                if (done[l]) continue;
                std::string syms = letter_symbols[l];
                for (u32 l2 = l + 1; l2 < letter_count(); ++l2)
                    if (delta[s][l2] == delta[s][l]) {
                        done[l2] = true;
                        syms += "," + letter_symbols[l2];
                    }
                out += states[s].label + "\t" + syms + "\t" + states[delta[s][l]].label + "\n";
            }
        }
        return out;
    }

    std::string dump_json() const {
        nlohmann::ordered_json j;
        j["alphabet"] = letter_symbols;
        j["states"] = nlohmann::ordered_json::array();
        for (const auto& st : states)
            j["states"].push_back({{"label", st.label}, {"accepting", st.accepting}});
        j["initial"] = states[initial].label;
        j["transitions"] = nlohmann::ordered_json::array();
        for (u32 s = 0; s < state_count(); ++s)
            for (u32 l = 0; l < letter_count(); ++l)
                j["transitions"].push_back({{"from", states[s].label},
                                            {"letter", letter_symbols[l]},
                                            {"to", states[delta[s][l]].label}});
        return j.dump(2) + "\n";
    }

    std::string dump(const std::string& format) const {
        if (format == "tsv") return dump_tsv();
        if (format == "json") return dump_json();
        throw std::invalid_argument("unknown dump format '" + format + "'");
    }

private:
    void dedup_labels() {
        std::map<std::string, u32> seen;
        for (auto& st : states) {
            u32 k = ++seen[st.label];
            if (k > 1) st.label += " #" + std::to_string(k);
        }
    }
};

// BFS closure of the reduction relation from (fold of e, P mod p).
inline Automaton synthesize(u32 p, u32 r, const ExponentVector& e, const SymPoly& poly,
                            Halt halt, abacus::AlphabetMode mode, Options opt = {}) {
    auto alphabet = mode == abacus::AlphabetMode::multiset ? abacus::Alphabet::multiset(p, r)
                                                           : abacus::Alphabet::digit_sum(p, r);
    Automaton a;
    a.alphabet = alphabet;
    a.halt = halt;

    if (opt.full_alphabet) {
        for (u32 l = 0; l < alphabet->letter_count(); ++l) {
            a.letter_ids.push_back(l);
            a.letter_symbols.push_back(alphabet->render(l));
        }
    } else {
        // the letters occurring in carry-free words: column sums 0..p-1
        for (u32 d = 0; d < p; ++d) {
            u32 best = alphabet->letter_count();
            for (u32 l = 0; l < alphabet->letter_count(); ++l)
                if (alphabet->sum_of(l) == d) {
                    if (mode == abacus::AlphabetMode::multiset) {
                        // the multiset of d ones (exists since d < p <= r+1 in
                        // practice d <= 1 for p = 2)
                        bool units = true;
                        for (u8 v : alphabet->multiset_of(l)) units = units && v <= 1;
                        if (!units) continue;
                    }
                    best = l;
                    break;
                }
            if (best == alphabet->letter_count())
                throw std::invalid_argument("synthesize: no letter with column sum " +
                                            std::to_string(d));
            a.letter_ids.push_back(best);
            a.letter_symbols.push_back(std::to_string(d));
        }
    }
    for (u32 l = 0; l < a.letter_count(); ++l)
        if (alphabet->sum_of(a.letter_ids[l]) == 1) a.unit_letter = l;

    SymPoly start = poly.mod_exp() == 1 ? poly : poly.mod_p();
    if (start.p() != p || start.r() != r) throw std::invalid_argument("synthesize: P arity");
    Fold fold0 = Fold::of(p, e);

    using Key = std::pair<std::array<u32, 3>, std::array<u32, 4>>;
    auto key_of = [](const Fold& f, const SymPoly& q) {
        return Key{f.comp, {q.c0(), q.c1(), q.c2(), q.c11()}};
    };

    std::map<Key, u32> index;
    std::vector<std::pair<Fold, SymPoly>> work{{fold0, start}};
    index[key_of(fold0, start)] = 0;

    for (std::size_t s = 0; s < work.size(); ++s) {
        a.delta.emplace_back(a.letter_count(), 0);
        const auto [fold, q] = work[s];
        Fold next_fold = fold.shifted();
        for (u32 l = 0; l < a.letter_count(); ++l) {
            auto step = reduction::reduce_letter(q, fold, a.letter_ids[l], *alphabet);
            Key k = key_of(next_fold, step.q_hat);
            auto it = index.find(k);
            u32 target;
            if (it == index.end()) {
                target = static_cast<u32>(work.size());
                if (target >= opt.state_limit)
                    throw resource_error("synthesize: state limit " +
                                         std::to_string(opt.state_limit) + " exceeded at " +
                                         std::to_string(target) + " states");
                index.emplace(k, target);
                work.emplace_back(next_fold, step.q_hat);
            } else {
                target = it->second;
            }
            a.delta[s][l] = target;
        }
    }

    for (const auto& [fold, q] : work) {
        Automaton::StateInfo st;
        st.label = q.render();
        if (halt == Halt::at_empty) {
            st.accepting = q.c0() != 0;  // q(0,...,0) != 0 mod p
        } else {
            std::vector<u32> point(r, 0);
            point[r - 1] = 1;
            st.accepting = q.evaluate(point) != 0;
        }
        a.states.push_back(st);
    }
    a.initial = 0;
    // raw automata may repeat labels across folds; keep them unique
    std::map<std::string, u32> seen;
    for (auto& st : a.states) {
        u32 k = ++seen[st.label];
        if (k > 1) st.label += " #" + std::to_string(k);
    }
    return a;
}

// Compare automaton acceptance with a directly computed equality predicate
// for every 1 <= n <= n_max.
struct CrossCheck {
    u64 checked = 0;
    std::vector<Nat> mismatches;
};

template <class DirectEq>
CrossCheck cross_check_language(const Automaton& a, const Nat& n_max, DirectEq&& direct) {
    CrossCheck r;
    for (Nat n = 1; n <= n_max; ++n) {
        ++r.checked;
        if (a.accepts(n) != direct(n)) r.mismatches.push_back(n);
    }
    return r;
}

}  // namespace abaci::automata
