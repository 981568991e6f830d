#pragma once
// The counting sequences: closed lattice walks W_d(n), Abelian squares
// W*_d(n) (Domb numbers at d = 4), generalized Domb sums, the Chan-Zudilin
// right-hand side, the product identity over factor splittings, balanced
// grid colourings, and the theorem's valuation bound checker.

#include "abaci/io.hpp"
#include "abaci/nat.hpp"
#include "abaci/numth.hpp"

#include <functional>
#include <map>
#include <mutex>
#include <vector>

namespace abaci::walks {

// Ordered compositions of n into k nonnegative parts.
inline void for_each_composition(u64 n, u32 k, const std::function<void(const std::vector<u64>&)>& f) {
    std::vector<u64> parts(k, 0);
    std::function<void(u32, u64)> rec = [&](u32 slot, u64 rem) {
        if (slot + 1 == k) {
            parts[slot] = rem;
            f(parts);
            return;
        }
        for (u64 v = 0; v <= rem; ++v) {
            parts[slot] = v;
            rec(slot + 1, rem - v);
        }
    };
    if (k == 0) {
        if (n == 0) f(parts);
        return;
    }
    rec(0, n);
}

// Direct summation of (W*): sum over x_1+...+x_d = n of multinomial(n; x)^2.
inline Nat abelian_square_direct(u32 d, u32 n) {
    Nat total = 0;
    for_each_composition(n, d, [&](const std::vector<u64>& parts) {
        Nat m = numth::factorial(n);
        for (u64 x : parts) m /= numth::factorial(x);
        total += m * m;
    });
    return total;
}

// Direct summation of the bipartite convolution form for even d = 2g:
// sum over y_1+...+y_g = n of multinomial(n; y)^2 * prod C(2y_i, y_i).
inline Nat abelian_square_bipartite(u32 g, u32 n) {
    Nat total = 0;
    for_each_composition(n, g, [&](const std::vector<u64>& parts) {
        Nat m = numth::factorial(n);
        for (u64 y : parts) m /= numth::factorial(y);
        Nat term = m * m;
        for (u64 y : parts) term *= numth::binomial(2 * y, y);
        total += term;
    });
    return total;
}

// Direct summation of (W): sum of multinomial(2n; x_1,x_1,...,x_d,x_d).
inline Nat walk_count_direct(u32 d, u32 n) {
    Nat total = 0;
    for_each_composition(n, d, [&](const std::vector<u64>& parts) {
        Nat m = numth::factorial(2 * static_cast<u64>(n));
        for (u64 x : parts) {
            m /= numth::factorial(x);
            m /= numth::factorial(x);
        }
        total += m;
    });
    return total;
}

struct Valuations {
    Nat w;       // nu_2(W_d(n))
    Nat w_star;  // nu_2(W*_d(n))
    Nat s;       // s_2(n); w = s + w_star
};

// Memoized W*_d(n) triangle built with the convolution
// W*_{a+1}(n) = sum_x C(n,x)^2 W*_a(x), optionally backed by a sequence
// cache. Synchronized; values returned by copy.
class Tables {
public:
    explicit Tables(io::SequenceCache* cache = nullptr) : cache_(cache) {}

    Nat wstar(u32 d, u32 n) {
        if (d < 1) throw std::invalid_argument("wstar: dimension >= 1");
        std::lock_guard<std::mutex> lock(mutex_);
        ensure(d, n);
        return rows_[d][n];
    }

    Nat walk_count(u32 d, u32 n) { return numth::binomial(2 * static_cast<u64>(n), n) * wstar(d, n); }

    Valuations walk_valuation(u32 d, u32 n) {
        if (d < 1) throw std::invalid_argument("walk_valuation: dimension >= 1");
        if (n == 0) return {0, 0, 0};  // W_d(0) = 1
        Nat ws = numth::nu(wstar(d, n), 2);
        Nat s = numth::digit_sum(n, 2);
        return {s + ws, ws, s};
    }

    // Write every memoized W* value into the attached cache.
    void flush_cache() {
        if (!cache_) return;
        std::lock_guard<std::mutex> lock(mutex_);
        for (u32 d = 1; d < rows_.size(); ++d)
            for (u32 n = 0; n < rows_[d].size(); ++n)
                cache_->store("Wstar", "d=" + std::to_string(d), n, rows_[d][n]);
    }

private:
    void ensure(u32 d, u32 n) {
        if (rows_.size() <= d) rows_.resize(d + 1);
        for (u32 a = 1; a <= d; ++a) {
            auto& row = rows_[a];
            if (row.size() > n) continue;
            u32 from = static_cast<u32>(row.size());
            row.resize(n + 1);
            for (u32 m = from; m <= n; ++m) {
                if (cache_) {
                    auto hit = cache_->lookup("Wstar", "d=" + std::to_string(a), m);
                    if (hit) {
                        row[m] = *hit;
                        continue;
                    }
                }
                if (a == 1) {
                    row[m] = 1;
                } else {
                    // C(m, x) built incrementally along the convolution
                    Nat binom = 1, total = 0;
                    for (u32 x = 0; x <= m; ++x) {
                        total += binom * binom * rows_[a - 1][x];
                        binom = binom * (m - x) / (x + 1);
                    }
                    row[m] = total;
                }
            }
        }
    }

    std::vector<std::vector<Nat>> rows_;
    io::SequenceCache* cache_;
    std::mutex mutex_;
};

struct GenDombParams {
    u32 a = 0, b = 0, c = 0;
};

// D_{a,b,c}(n) = sum_{x+y=n} C(n;x,y)^a C(2x,x)^b C(2y,y)^c.
// D_{2,1,1}(n) is the Domb number W*_4(n).
inline Int gen_domb(GenDombParams params, u32 n) {
    Int total = 0;
    for (u64 x = 0; x <= n; ++x) {
        u64 y = n - x;
        Int term = 1;
        Nat binom = numth::binomial(n, x);
        for (u32 i = 0; i < params.a; ++i) term *= binom;
        Nat bx = numth::binomial(2 * x, x), by = numth::binomial(2 * y, y);
        for (u32 i = 0; i < params.b; ++i) term *= bx;
        for (u32 i = 0; i < params.c; ++i) term *= by;
        total += term;
    }
    return total;
}

// Right-hand side of the Chan-Zudilin identity (X):
// sum_{x+y=n} (-1)^x C(2x,x) C(3x+y; x,x,x,y) 2^{4y}; equals W*_4(n).
inline Int chan_zudilin_rhs(u32 n) {
    Int total = 0;
    for (u64 x = 0; x <= n; ++x) {
        u64 y = n - x;
        Nat multi = numth::factorial(3 * x + y) /
                    (numth::factorial(x) * numth::factorial(x) * numth::factorial(x) *
                     numth::factorial(y));
        Int term = Int(numth::binomial(2 * x, x) * multi) << (4 * y);
        total += x % 2 == 0 ? term : -term;
    }
    return total;
}

// Identity (W#) for d = ab:
// W_d(n) = sum_{x_1+...+x_b=n} C(2n; 2x_1,...,2x_b) prod W_a(x_i).
inline bool split_identity_check(u32 a, u32 b, u32 n, Tables& tables) {
    if (a < 1 || b < 1) throw std::invalid_argument("split_identity_check: factors >= 1");
    Nat rhs = 0;
    for_each_composition(n, b, [&](const std::vector<u64>& parts) {
        Nat term = numth::factorial(2 * static_cast<u64>(n));
        for (u64 x : parts) term /= numth::factorial(2 * x);
        for (u64 x : parts) term *= tables.wstar(a, static_cast<u32>(x)) *
                                    numth::binomial(2 * x, x);
        rhs += term;
    });
    return tables.walk_count(a * b, n) == rhs;
}

// U_{k,l}(n): colourings of a 2n x (k+l) grid where every row has k cells of
// one colour and l of the other, and every column is balanced. Row-by-row DP
// on the multiset of per-column black counts (rows act symmetrically on
// columns, so sorting the count vector is sound).
inline Nat grid_colorings(u32 k, u32 l, u32 n, u64 state_limit = 2'000'000) {
    const u32 cols = k + l;
    if (cols < 1) throw std::invalid_argument("grid_colorings: k + l >= 1");

    std::vector<u32> row_weights;  // admissible per-row black counts
    row_weights.push_back(k);
    if (l != k) row_weights.push_back(l);

    using State = std::vector<u32>;  // sorted descending column counts
    std::map<State, Nat> dp;
    dp[State(cols, 0)] = 1;

    std::vector<u32> subset;
    for (u32 row = 0; row < 2 * n; ++row) {
        std::map<State, Nat> next;
        for (const auto& [state, ways] : dp) {
            for (u32 w : row_weights) {
                // choose which w columns get a black cell
                subset.assign(w, 0);
                std::function<void(u32, u32)> choose = [&](u32 idx, u32 from) {
                    if (idx == w) {
                        State s = state;
                        bool ok = true;
                        for (u32 c : subset) {
                            if (++s[c] > n) ok = false;
                        }
                        if (!ok) return;
                        std::sort(s.begin(), s.end(), std::greater<u32>());
                        next[s] += ways;
                        return;
                    }
                    for (u32 c = from; c < cols; ++c) {
                        subset[idx] = c;
                        choose(idx + 1, c + 1);
                    }
                };
                choose(0, 0);
            }
            if (next.size() > state_limit) throw resource_error("grid_colorings: state limit");
        }
        dp = std::move(next);
    }
    State goal(cols, n);
    auto it = dp.find(goal);
    return it == dp.end() ? Nat(0) : it->second;
}

// ---- Theorem checker ----

// Lower bound for w_d(n) by nu_2(d): s, 2s, 3s, 3s + nu_2(d) - 2.
inline Nat theorem_bound(u32 d, const Nat& n) {
    Nat s = numth::digit_sum(n, 2);
    u32 v = static_cast<u32>(numth::nu(Nat(d), 2));
    if (v == 0) return s;
    if (v == 1) return 2 * s;
    if (v == 2) return 3 * s;
    return 3 * s + v - 2;
}

// The part-specific binary predicate for equality.
inline bool theorem_equality_predicted(u32 d, const Nat& n) {
    u32 v = static_cast<u32>(numth::nu(Nat(d), 2));
    if (v <= 1) return true;
    if (v == 2) return !numth::has_adjacent_ones(n);
    return numth::ones_before_zeros(n);
}

struct TheoremCheck {
    Nat bound;
    bool attained;
    bool predicted;
};

// For parts (a),(b) attained must always hold; for (c),(d) attained must
// coincide with the binary-expansion predicate.
inline TheoremCheck theorem_check(u32 d, u32 n, Tables& tables) {
    if (n < 1) throw std::domain_error("theorem_check: n >= 1");
    TheoremCheck c{theorem_bound(d, n), false, theorem_equality_predicted(d, n)};
    c.attained = tables.walk_valuation(d, n).w == c.bound;
    return c;
}

}  // namespace abaci::walks
