#pragma once
// The abacus formalism: alphabets of column labels, abacus types, vector
// enumeration by type, and the brute-force evaluation of the sums S^e_T(P)
// in Z/p^K — the oracle the symbolic reduction engine is checked against.
//
// An abacus is the r-row matrix of base-p digits of a vector x; its type is
// the left-to-right word of column labels. In multiset mode a label is the
// multiset of the column's digits; in digit-sum mode it is their sum.

#include "abaci/nat.hpp"
#include "abaci/numth.hpp"
#include "abaci/polynomial.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace abaci::abacus {

enum class AlphabetMode { multiset, digit_sum };

class Alphabet;
using AlphabetRef = std::shared_ptr<const Alphabet>;

class Alphabet {
public:
    static AlphabetRef multiset(u32 p, u32 r) {
        return AlphabetRef(new Alphabet(p, r, AlphabetMode::multiset));
    }
    static AlphabetRef digit_sum(u32 p, u32 r) {
        return AlphabetRef(new Alphabet(p, r, AlphabetMode::digit_sum));
    }

    u32 p() const { return p_; }
    u32 r() const { return r_; }
    AlphabetMode mode() const { return mode_; }
    u32 letter_count() const { return static_cast<u32>(orbit_sizes_.size()); }

    // Column digit sum of the letter (both modes).
    u32 sum_of(u32 letter) const {
        check_letter(letter);
        if (mode_ == AlphabetMode::digit_sum) return letter;
        u32 s = 0;
        for (u8 d : multisets_[letter]) s += d;
        return s;
    }

    const std::vector<u8>& multiset_of(u32 letter) const {
        if (mode_ != AlphabetMode::multiset) throw std::invalid_argument("not a multiset alphabet");
        check_letter(letter);
        return multisets_[letter];
    }

    // |rho(letter)|: number of digit columns carrying this label.
    u64 orbit_size(u32 letter) const {
        check_letter(letter);
        return orbit_sizes_[letter];
    }
    bool special(u32 letter) const { return orbit_size(letter) % p_ == 0; }
    u32 lambda(u32 letter) const { return special(letter) ? 1 : 0; }

    bool is_zero_letter(u32 letter) const { return sum_of(letter) == 0; }

    u32 letter_of_column(const std::vector<u8>& column) const {
        if (column.size() != r_) throw std::invalid_argument("column size != r");
        if (mode_ == AlphabetMode::digit_sum) {
            u32 s = 0;
            for (u8 d : column) s += d;
            return s;
        }
        std::vector<u8> sorted = column;
        std::sort(sorted.begin(), sorted.end());
        auto it = std::lower_bound(multisets_.begin(), multisets_.end(), sorted);
        return static_cast<u32>(it - multisets_.begin());
    }

    // All column vectors labelled by the letter, lexicographically.
    void for_each_orbit_vector(u32 letter, const std::function<void(const std::vector<u8>&)>& f) const {
        check_letter(letter);
        if (mode_ == AlphabetMode::multiset) {
            std::vector<u8> v = multisets_[letter];
            do {
                f(v);
            } while (std::next_permutation(v.begin(), v.end()));
            return;
        }
        std::vector<u8> v(r_, 0);
        u32 target = letter;
        std::function<void(u32, u32)> rec = [&](u32 slot, u32 rem) {
            if (slot == r_) {
                if (rem == 0) f(v);
                return;
            }
            for (u32 d = 0; d < p_ && d <= rem; ++d) {
                v[slot] = static_cast<u8>(d);
                rec(slot + 1, rem - d);
            }
            v[slot] = 0;
        };
        rec(0, target);
    }

    std::string render(u32 letter) const {
        check_letter(letter);
        if (mode_ == AlphabetMode::digit_sum) return std::to_string(letter);
        if (p_ == 2 && r_ == 2) {
            static const char* names[] = {"Z", "M", "O"};
            return names[letter];
        }
        if (p_ == 2) return "M" + std::to_string(sum_of(letter));
        std::string s = "[";
        const auto& m = multisets_[letter];
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(m[i]);
        }
        return s + "]";
    }

    std::optional<u32> parse(const std::string& token) const {
        for (u32 l = 0; l < letter_count(); ++l)
            if (render(l) == token) return l;
        return std::nullopt;
    }

private:
    Alphabet(u32 p, u32 r, AlphabetMode mode) : p_(p), r_(r), mode_(mode) {
        numth::require_prime(p);
        if (r < 1) throw std::invalid_argument("alphabet needs r >= 1");
        if (mode_ == AlphabetMode::multiset) {
            std::vector<u8> cur(r, 0);
            std::function<void(u32, u8)> rec = [&](u32 slot, u8 lo) {
                if (slot == r_) {
                    multisets_.push_back(cur);
                    return;
                }
                for (u8 d = lo; d < p_; ++d) {
                    cur[slot] = d;
                    rec(slot + 1, d);
                }
            };
            rec(0, 0);
            for (const auto& m : multisets_) {
                // distinct permutations: r! / prod(mult_v!)
                u64 size = 1;
                for (u32 i = 2; i <= r_; ++i) size *= i;
                u32 run = 1;
                for (std::size_t i = 1; i <= m.size(); ++i) {
                    if (i < m.size() && m[i] == m[i - 1]) {
                        ++run;
                    } else {
                        for (u32 j = 2; j <= run; ++j) size /= j;
                        run = 1;
                    }
                }
                orbit_sizes_.push_back(size);
            }
        } else {
            // letter = column sum in [0, r(p-1)]; orbit = #digit vectors with that sum
            u32 max_sum = r_ * (p_ - 1);
            std::vector<std::vector<u64>> ways(r_ + 1, std::vector<u64>(max_sum + 1, 0));
            ways[0][0] = 1;
            for (u32 slot = 1; slot <= r_; ++slot)
                for (u32 s = 0; s <= max_sum; ++s)
                    for (u32 d = 0; d < p_ && d <= s; ++d) ways[slot][s] += ways[slot - 1][s - d];
            orbit_sizes_ = ways[r_];
        }
    }

    void check_letter(u32 letter) const {
        if (letter >= letter_count()) throw std::invalid_argument("letter out of range");
    }

    u32 p_, r_;
    AlphabetMode mode_;
    std::vector<std::vector<u8>> multisets_;  // multiset mode only, lex order
    std::vector<u64> orbit_sizes_;
};

struct LetterStats {
    u32 letter;
    u64 orbit_size;
    bool special;
    u32 lambda;
};

inline LetterStats letter_stats(u32 letter, const AlphabetRef& a) {
    return {letter, a->orbit_size(letter), a->special(letter), a->lambda(letter)};
}

// Abacus type: word of letters, leftmost = most significant column.
// Canonical form has no leading all-zero letter.
struct Type {
    AlphabetRef alphabet;
    std::vector<u32> word;

    std::size_t length() const { return word.size(); }
    bool empty() const { return word.empty(); }
};

inline u32 lambda(const Type& t) {
    u32 l = 0;
    for (u32 letter : t.word) l += t.alphabet->lambda(letter);
    return l;
}

inline u32 letter_count(const Type& t, u32 letter) {
    u32 c = 0;
    for (u32 w : t.word) c += w == letter ? 1 : 0;
    return c;
}

// Type of the abacus of x (pads rows, strips leading all-zero columns).
inline Type type_of(const std::vector<Nat>& x, const AlphabetRef& a) {
    if (x.size() != a->r()) throw std::invalid_argument("type_of: vector length != r");
    std::vector<std::vector<u32>> rows;
    std::size_t width = 0;
    for (const Nat& xi : x) {
        if (xi < 0) throw std::invalid_argument("type_of: negative component");
        rows.push_back(xi == 0 ? std::vector<u32>{} : numth::digits(xi, a->p()));
        width = std::max(width, rows.back().size());
    }
    Type t{a, {}};
    for (std::size_t col = 0; col < width; ++col) {
        std::vector<u8> column(a->r());
        for (u32 j = 0; j < a->r(); ++j) {
            const auto& row = rows[j];
            std::size_t pad = width - row.size();
            column[j] = col < pad ? 0 : static_cast<u8>(row[col - pad]);
        }
        u32 letter = a->letter_of_column(column);
        if (t.word.empty() && a->is_zero_letter(letter)) continue;  // leading zeroes
        t.word.push_back(letter);
    }
    return t;
}

// cf(n): the carry-free type of n's binary expansion (0 -> M_0, 1 -> M_1).
inline Type cf_type(const Nat& n, const AlphabetRef& a) {
    if (a->p() != 2) throw std::invalid_argument("cf_type is defined for p = 2 only");
    Type t{a, {}};
    if (n == 0) return t;
    for (u32 d : numth::digits(n, 2)) {
        std::vector<u8> column(a->r(), 0);
        if (d) column[a->r() - 1] = 1;
        t.word.push_back(a->letter_of_column(column));
    }
    return t;
}

// Digit word of n as a digit-sum type (the single type carrying all
// carry-free r-part partitionings of n).
inline Type digit_type(const Nat& n, const AlphabetRef& a) {
    if (a->mode() != AlphabetMode::digit_sum)
        throw std::invalid_argument("digit_type needs a digit-sum alphabet");
    Type t{a, {}};
    if (n == 0) return t;
    for (u32 d : numth::digits(n, a->p())) t.word.push_back(d);
    return t;
}

// sigma(T): the common value of x_1 + ... + x_r over abaci of type T.
inline Nat sigma(const Type& t) {
    Nat v = 0;
    for (u32 letter : t.word) v = v * t.alphabet->p() + t.alphabet->sum_of(letter);
    return v;
}

// Exactly the vectors whose abacus has type T, in lexicographic order of the
// digit matrices; their count is the product of the letter orbit sizes.
inline void for_each_vector(const Type& t, const std::function<void(const std::vector<Nat>&)>& f,
                            u64 limit = 10'000'000) {
    const auto& a = *t.alphabet;
    Nat count = 1;
    for (u32 letter : t.word) count *= a.orbit_size(letter);
    if (count > limit) throw resource_error("abacus type enumeration exceeds limit");

    std::vector<Nat> x(a.r(), Nat(0));
    std::function<void(std::size_t)> rec = [&](std::size_t col) {
        if (col == t.word.size()) {
            f(x);
            return;
        }
        a.for_each_orbit_vector(t.word[col], [&](const std::vector<u8>& column) {
            std::vector<Nat> saved = x;
            for (u32 j = 0; j < a.r(); ++j) x[j] = x[j] * a.p() + column[j];
            rec(col + 1);
            x = saved;
        });
    };
    rec(0);
}

inline std::vector<std::vector<Nat>> enumerate_vectors(const Type& t, u64 limit = 10'000'000) {
    std::vector<std::vector<Nat>> out;
    for_each_vector(t, [&](const std::vector<Nat>& x) { out.push_back(x); }, limit);
    return out;
}

// All canonical types T with sigma(T) = n.
inline std::vector<Type> enumerate_types(const Nat& n, const AlphabetRef& a, u32 max_digits = 64) {
    if (n > 0 && numth::digits(n, a->p()).size() > max_digits)
        throw resource_error("enumerate_types: digit length limit");
    const u32 p = a->p();
    const u32 max_sum = a->r() * (p - 1);

    // column-sum words (least significant first), then expansion into letters
    std::vector<std::vector<u32>> sum_words;
    std::vector<u32> cur;
    std::function<void(Nat)> rec = [&](Nat rem) {
        if (rem == 0) {
            sum_words.push_back(cur);
            return;
        }
        u32 first = static_cast<u32>(rem % p);
        for (u32 c = first; c <= max_sum; c += p) {
            if (c > rem) break;
            cur.push_back(c);
            rec((rem - c) / p);
            cur.pop_back();
        }
    };
    rec(n);

    std::vector<Type> out;
    for (const auto& sums_lsf : sum_words) {
        std::vector<std::vector<u32>> letters_per_pos;  // most significant first
        for (auto it = sums_lsf.rbegin(); it != sums_lsf.rend(); ++it) {
            std::vector<u32> options;
            for (u32 l = 0; l < a->letter_count(); ++l)
                if (a->sum_of(l) == *it) options.push_back(l);
            letters_per_pos.push_back(options);
        }
        std::vector<u32> word(letters_per_pos.size());
        std::function<void(std::size_t)> expand = [&](std::size_t pos) {
            if (pos == letters_per_pos.size()) {
                out.push_back(Type{a, word});
                return;
            }
            for (u32 l : letters_per_pos[pos]) {
                word[pos] = l;
                expand(pos + 1);
            }
        };
        expand(0);
    }
    return out;
}

inline std::string render(const Type& t) {
    if (t.empty()) return "eps";
    const bool compact = t.alphabet->mode() == AlphabetMode::multiset && t.alphabet->p() == 2 &&
                         t.alphabet->r() == 2;
    std::string s;
    for (std::size_t i = 0; i < t.word.size(); ++i) {
        if (i && !compact) s += " ";
        s += t.alphabet->render(t.word[i]);
    }
    return s;
}

inline Type parse_type(const std::string& text, const AlphabetRef& a) {
    Type t{a, {}};
    if (text == "eps" || text.empty()) return t;
    const bool compact = a->mode() == AlphabetMode::multiset && a->p() == 2 && a->r() == 2;
    std::vector<std::string> tokens;
    if (compact) {
        for (char c : text) tokens.emplace_back(1, c);
    } else {
        std::istringstream in(text);
        std::string tok;
        while (in >> tok) tokens.push_back(tok);
    }
    for (const auto& tok : tokens) {
        auto l = a->parse(tok);
        if (!l) throw std::invalid_argument("unknown letter '" + tok + "'");
        t.word.push_back(*l);
    }
    return t;
}

// ---- Direct evaluation of S^e_T(P) in Z/p^K ----

struct SumResult {
    Nat residue;                   // S mod p^K, in [0, p^K)
    u32 precision;                 // K
    std::optional<Nat> valuation;  // nu_p(S) when certified (< K); nullopt means ">= K"
};

// Brute-force oracle: sums F(x) = P(x) * prod_i (psi_i(x_1)...psi_i(x_r))^{e_i}
// over all vectors of type T, with psi_i(x) = Theta_p((p^i x)!). Negative e_i
// use modular inverses (psi values are coprime to p).
inline SumResult sum_direct(const ExponentVector& e, const Type& t, const Polynomial& poly, u32 K,
                            u64 enum_limit = 10'000'000) {
    const auto& a = *t.alphabet;
    const u32 p = a.p();
    if (poly.vars() != a.r()) throw std::invalid_argument("sum_direct: polynomial arity != r");
    if (K < 1) throw std::invalid_argument("sum_direct: K must be >= 1");
    const Nat pk = pow_nat(p, K);

    std::map<u64, Nat> theta_memo;
    auto theta_fact = [&](u64 m) -> const Nat& {
        auto it = theta_memo.find(m);
        if (it == theta_memo.end())
            it = theta_memo.emplace(m, numth::theta_factorial_mod(m, p, pk)).first;
        return it->second;
    };

    Nat total = 0;
    for_each_vector(t, [&](const std::vector<Nat>& x) {
        Nat term = poly.evaluate_mod(x, pk);
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            Nat prod = 1;
            for (const Nat& xj : x) {
                u64 m = numth::nat_to_u64(xj, "sum_direct argument") * pow_u64(p, static_cast<u32>(i));
                if (m > 50'000'000) throw resource_error("sum_direct: factorial argument too large");
                prod = prod * theta_fact(m) % pk;
            }
            u64 exp = static_cast<u64>(e[i] < 0 ? -e[i] : e[i]);
            Nat f = 1, b = e[i] < 0 ? numth::mod_inverse(prod, pk) : prod;
            while (exp) {
                if (exp & 1) f = f * b % pk;
                b = b * b % pk;
                exp >>= 1;
            }
            term = term * f % pk;
        }
        total = (total + term) % pk;
    }, enum_limit);

    SumResult res{total, K, std::nullopt};
    if (total != 0) res.valuation = numth::nu(total, p);
    return res;
}

}  // namespace abaci::abacus
