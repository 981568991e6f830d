#pragma once
// Reductions at precision p^K. Everything here works in the graded truncated
// algebra: after the substitution x -> px + a every polynomial in play has
// its degree-t coefficients divisible by p^t, so monomials of total degree
// >= K are identically 0 mod p^K and can be dropped. No divisions by
// p^lambda are performed, which keeps the grading intact; the residue of
// S^e_T(P) itself comes out at the end as R(0,...,0).
//
// Two consumers: the exact single-step Q_I used to check the reduction
// identities against the enumeration oracle, and a fast engine that sweeps
// S^e_T(1) over the digit words of all n <= p^m (the Prop tri/prime sums,
// far beyond the reach of enumeration).

#include "abaci/abacus.hpp"
#include "abaci/nat.hpp"
#include "abaci/numth.hpp"
#include "abaci/polynomial.hpp"
#include "abaci/reduction.hpp"

#include <map>
#include <optional>
#include <vector>

namespace abaci::reduction {

// ---- univariate truncated series mod p^M ----

inline std::vector<Nat> series_mul(const std::vector<Nat>& a, const std::vector<Nat>& b,
                                   const Nat& pM, u32 maxdeg) {
    std::vector<Nat> c(maxdeg, Nat(0));
    for (std::size_t i = 0; i < a.size() && i < maxdeg; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size() && i + j < maxdeg; ++j)
            c[i + j] = (c[i + j] + a[i] * b[j]) % pM;
    }
    return c;
}

// Inverse of a unit series whose positive-degree coefficients are divisible
// by p: f = c (1 - d), inverse = c^{-1} (1 + d + d^2 + ...), d nilpotent.
inline std::vector<Nat> series_inverse(const std::vector<Nat>& f, u32 p, const Nat& pM,
                                       u32 maxdeg) {
    if (f.empty() || f[0] % p == 0) throw std::invalid_argument("series_inverse: not a unit");
    const Nat inv_c = numth::mod_inverse(f[0], pM);
    std::vector<Nat> d(maxdeg, Nat(0));  // d = 1 - c^{-1} f, no constant term
    for (std::size_t i = 1; i < f.size() && i < maxdeg; ++i)
        d[i] = (pM - inv_c * f[i] % pM) % pM;
    std::vector<Nat> acc(maxdeg, Nat(0)), power(maxdeg, Nat(0));
    acc[0] = power[0] = 1;
    for (u32 t = 1; t < maxdeg; ++t) {
        power = series_mul(power, d, pM, maxdeg);
        bool zero = true;
        for (const Nat& x : power) zero = zero && x == 0;
        if (zero) break;
        for (u32 i = 0; i < maxdeg; ++i) acc[i] = (acc[i] + power[i]) % pM;
    }
    for (u32 i = 0; i < maxdeg; ++i) acc[i] = acc[i] * inv_c % pM;
    return acc;
}

inline std::vector<Nat> series_int_pow(std::vector<Nat> base, i64 e, u32 p, const Nat& pM,
                                       u32 maxdeg) {
    if (e < 0) {
        base = series_inverse(base, p, pM, maxdeg);
        e = -e;
    }
    std::vector<Nat> acc(maxdeg, Nat(0));
    acc[0] = 1;
    u64 k = static_cast<u64>(e);
    while (k) {
        if (k & 1) acc = series_mul(acc, base, pM, maxdeg);
        base = series_mul(base, base, pM, maxdeg);
        k >>= 1;
    }
    return acc;
}

// prod_i Psi_{level+i, digit}(x)^{e_i} mod p^M, truncated.
inline std::vector<Nat> psi_weight(u32 level, u32 digit, u32 p, const ExponentVector& e,
                                   const Nat& pM, u32 maxdeg) {
    std::vector<Nat> w(maxdeg, Nat(0));
    w[0] = 1;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        auto psi = psi_truncated(level + static_cast<u32>(i), digit, p, pM, maxdeg);
        w = series_mul(w, series_int_pow(psi, e[i], p, pM, maxdeg), pM, maxdeg);
    }
    return w;
}

// ---- exact one-letter reduction at precision p^K ----
//
// Q_I = p^{-lambda(I)} sum_{a in rho(I)} P(px + a) Psi^e_a(x), returned with
// coefficients in [0, p^K). Used to verify the one-step identity numerically: the
// identity S^e_{TI}(P) = p^{lambda} S^{shift e}_T(Q_I) holds mod p^K.
inline Polynomial reduce_letter_exact(const Polynomial& poly, const ExponentVector& e, u32 letter,
                                      const abacus::Alphabet& alphabet, u32 K) {
    const u32 p = alphabet.p();
    const u32 r = alphabet.r();
    if (poly.vars() != r) throw std::invalid_argument("reduce_letter_exact: arity");
    const u32 lam = alphabet.lambda(letter);
    const u32 work_prec = K + lam;
    const Nat pW = pow_nat(p, work_prec);
    const u32 maxdeg = work_prec + poly.degree();

    Polynomial sum(r);
    alphabet.for_each_orbit_vector(letter, [&](const std::vector<u8>& a) {
        std::vector<u32> av(a.begin(), a.end());
        Polynomial term = poly.compose_px_plus_a(p, av);
        for (u32 j = 0; j < r; ++j) {
            auto w = psi_weight(0, a[j], p, e, pW, maxdeg);
            std::vector<Int> coeffs(w.begin(), w.end());
            term = term * Polynomial::from_univariate(r, j, coeffs);
            term.truncate_degree(maxdeg);
            term.reduce_mod(pW);
        }
        sum = sum + term;
    });
    sum.reduce_mod(pW);

    const Nat pl = pow_nat(p, lam);
    Polynomial q(r);
    for (const auto& [m, c] : sum.terms()) {
        if (c % pl != 0) throw std::logic_error("reduce_letter_exact: inexact division (engine bug)");
        q.add_term(m, c / pl);
    }
    q.reduce_mod(pow_nat(p, K));
    return q;
}

// ---- sweep engine: S^e_T(1) mod p^K over digit words ----
//
// State: symmetric polynomial in the orbit basis (partitions of < K into at
// most r parts), coefficients mod p^K in 64-bit. One matrix per (digit,
// level) maps P to sum_{a in rho(digit)} P(px + a) Psi-weights; a word is a
// chain of matrix applications, and the final value is the coefficient of
// the empty orbit.
class WordSumEngine {
public:
    WordSumEngine(u32 p, u32 r, ExponentVector e, u32 K)
        : p_(p), r_(r), K_(K), e_(std::move(e)) {
        numth::require_prime(p);
        if (K < 1) throw std::invalid_argument("WordSumEngine: K >= 1");
        Nat pk = pow_nat(p, K);
        if (pk > Nat(u64(1) << 62)) throw std::invalid_argument("WordSumEngine: p^K too large");
        pK_ = static_cast<u64>(pk);
        build_orbits();
    }

    u32 precision() const { return K_; }

    // S^e_T(1) mod p^K where T is the digit-sum word (most significant first,
    // digits < p).
    u64 word_sum(const std::vector<u32>& word) {
        std::vector<u64> v(orbits_.size(), 0);
        v[empty_orbit_] = 1;
        u32 level = 0;
        for (auto it = word.rbegin(); it != word.rend(); ++it, ++level) {
            const auto& m = matrix(*it, level);
            std::vector<u64> nv(orbits_.size(), 0);
            for (std::size_t d = 0; d < orbits_.size(); ++d) {
                if (v[d] == 0) continue;
                for (std::size_t u = 0; u < orbits_.size(); ++u)
                    nv[u] = addm(nv[u], mulm(m[u][d], v[d]));
            }
            v = std::move(nv);
        }
        return v[empty_orbit_];
    }

    struct Result {
        u64 residue;                   // mod p^K
        std::optional<u32> valuation;  // nullopt: residue 0, i.e. nu >= K
    };

    Result evaluate(const Nat& n) {
        std::vector<u32> word = n == 0 ? std::vector<u32>{} : numth::digits(n, p_);
        u64 res = word_sum(word);
        if (res == 0) return {0, std::nullopt};
        u32 v = 0;
        u64 t = res;
        while (t % p_ == 0) {
            t /= p_;
            ++v;
        }
        return {res, v};
    }

private:
    u64 addm(u64 a, u64 b) const { return (a + b) % pK_; }
    u64 mulm(u64 a, u64 b) const {
        return static_cast<u64>(static_cast<unsigned __int128>(a) * b % pK_);
    }
    u64 powm(u64 b, u64 e) const {
        u64 acc = 1;
        b %= pK_;
        while (e) {
            if (e & 1) acc = mulm(acc, b);
            b = mulm(b, b);
            e >>= 1;
        }
        return acc;
    }

    void build_orbits() {
        // partitions (descending) of total <= K-1 into at most r parts
        std::vector<u32> cur;
        std::function<void(u32, u32)> rec = [&](u32 remaining, u32 maxpart) {
            orbit_index_[cur] = static_cast<u32>(orbits_.size());
            orbits_.push_back(cur);
            if (cur.size() == r_) return;
            for (u32 v = 1; v <= std::min(remaining, maxpart); ++v) {
                cur.push_back(v);
                rec(remaining - v, v);
                cur.pop_back();
            }
        };
        rec(K_ - 1, K_ - 1);
        empty_orbit_ = orbit_index_.at({});
    }

    // [x^out] ((px + b)^ddeg * W_b(x)) mod p^K
    std::vector<std::vector<std::vector<u64>>> slot_table(u32 level) {
        std::vector<std::vector<std::vector<u64>>> f(
            p_, std::vector<std::vector<u64>>(K_, std::vector<u64>(K_, 0)));
        for (u32 b = 0; b < p_; ++b) {
            const Nat pk(pK_);
            auto w_nat = psi_weight(level, b, p_, e_, pk, K_);
            std::vector<u64> w(K_, 0);
            for (u32 i = 0; i < K_; ++i) w[i] = static_cast<u64>(w_nat[i]);
            for (u32 ddeg = 0; ddeg < K_; ++ddeg) {
                // (px + b)^ddeg = sum_m C(ddeg, m) p^m b^{ddeg-m} x^m
                std::vector<u64> sub(K_, 0);
                for (u32 m = 0; m <= ddeg && m < K_; ++m) {
                    u64 c = static_cast<u64>(numth::binomial(ddeg, m) % pK_);
                    c = mulm(c, powm(p_, m));
                    c = mulm(c, powm(b, ddeg - m));
                    sub[m] = c;
                }
                for (u32 out = 0; out < K_; ++out) {
                    u64 acc = 0;
                    for (u32 m = 0; m <= out; ++m)
                        if (sub[m]) acc = addm(acc, mulm(sub[m], w[out - m]));
                    f[b][ddeg][out] = acc;
                }
            }
        }
        return f;
    }

    const std::vector<std::vector<u64>>& matrix(u32 digit, u32 level) {
        if (digit >= p_) throw std::invalid_argument("WordSumEngine: digit out of range");
        auto key = std::make_pair(digit, level);
        auto it = matrices_.find(key);
        if (it != matrices_.end()) return it->second;

        auto f = slot_tables_.find(level);
        if (f == slot_tables_.end()) f = slot_tables_.emplace(level, slot_table(level)).first;
        const auto& slots = f->second;

        const std::size_t m = orbits_.size();
        std::vector<std::vector<u64>> mat(m, std::vector<u64>(m, 0));
        for (std::size_t src = 0; src < m; ++src) {
            // distinct values of the source partition padded with zeros
            std::vector<u32> values;
            std::vector<u32> counts;
            u32 zeros = r_;
            for (std::size_t i = 0; i < orbits_[src].size();) {
                std::size_t j = i;
                while (j < orbits_[src].size() && orbits_[src][j] == orbits_[src][i]) ++j;
                values.push_back(orbits_[src][i]);
                counts.push_back(static_cast<u32>(j - i));
                zeros -= static_cast<u32>(j - i);
                i = j;
            }
            values.push_back(0);
            counts.push_back(zeros);

            for (std::size_t dst = 0; dst < m; ++dst) {
                std::vector<u32> target = orbits_[dst];
                target.resize(r_, 0);
                mat[dst][src] = image_coefficient(slots, digit, values, counts, target);
            }
        }
        return matrices_.emplace(key, std::move(mat)).first->second;
    }

    // Coefficient of the representative monomial x^target in
    // sum_{a} m_src(px + a) * prod_j W_{a_j}(x_j), via a DP over slots with
    // state (remaining digit budget, remaining source-exponent multiset).
    u64 image_coefficient(const std::vector<std::vector<std::vector<u64>>>& slots, u32 digit,
                          const std::vector<u32>& values, const std::vector<u32>& counts,
                          const std::vector<u32>& target) {
        const std::size_t nv = values.size();
        std::vector<u32> radix(nv);
        u32 states = 1;
        for (std::size_t i = 0; i < nv; ++i) {
            radix[i] = counts[i] + 1;
            states *= radix[i];
        }
        auto encode = [&](const std::vector<u32>& rem) {
            u32 code = 0;
            for (std::size_t i = nv; i-- > 0;) code = code * radix[i] + rem[i];
            return code;
        };

        const u32 budget = digit;
        std::vector<std::vector<u64>> dp(budget + 1, std::vector<u64>(states, 0));
        dp[budget][encode(counts)] = 1;

        std::vector<u32> rem(nv);
        for (u32 j = 0; j < r_; ++j) {
            std::vector<std::vector<u64>> next(budget + 1, std::vector<u64>(states, 0));
            const u32 out = target[j];
            for (u32 c = 0; c <= budget; ++c)
                for (u32 code = 0; code < states; ++code) {
                    u64 cur = dp[c][code];
                    if (cur == 0) continue;
                    u32 t = code;
                    for (std::size_t i = 0; i < nv; ++i) {
                        rem[i] = t % radix[i];
                        t /= radix[i];
                    }
                    for (u32 b = 0; b < p_ && b <= c; ++b)
                        for (std::size_t i = 0; i < nv; ++i) {
                            if (rem[i] == 0) continue;
                            u64 w = slots[b][values[i]][out];
                            if (w == 0) continue;
                            rem[i]--;
                            next[c - b][encode(rem)] = addm(next[c - b][encode(rem)], mulm(cur, w));
                            rem[i]++;
                        }
                }
            dp = std::move(next);
        }
        std::vector<u32> done(nv, 0);
        return dp[0][encode(done)];
    }

    u32 p_, r_, K_;
    u64 pK_ = 0;
    ExponentVector e_;
    std::vector<std::vector<u32>> orbits_;
    std::map<std::vector<u32>, u32> orbit_index_;
    u32 empty_orbit_ = 0;
    std::map<std::pair<u32, u32>, std::vector<std::vector<u64>>> matrices_;
    std::map<u32, std::vector<std::vector<std::vector<u64>>>> slot_tables_;
};

}  // namespace abaci::reduction
