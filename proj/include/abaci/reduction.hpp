#pragma once
// The symbolic reduction engine: folds of exponent vectors, the Psi cofactor
// polynomials mod p^2, and the one-letter step (P, e, I) -> Q_I that peels
// the rightmost abacus column off a sum S^e_T(P). Everything the automaton
// synthesis needs is the pair (fold, P mod p).

#include "abaci/abacus.hpp"
#include "abaci/nat.hpp"
#include "abaci/numth.hpp"
#include "abaci/polynomial.hpp"

#include <array>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace abaci::reduction {

// ---- Folds ----
//
// The fold of e is the finite summary sufficient to evaluate psi products
// mod p^2. For p = 2 the groups are levels {0}, {1}, {>=2} with period 2
// (Psi_j^2 = 1 mod 4); for odd p they are {0}, {odd}, {even >= 2} with
// period p^2 - p (Euler).
struct Fold {
    u32 p = 2;
    std::array<u32, 3> comp{0, 0, 0};

    static u32 period(u32 p) { return p == 2 ? 2 : p * p - p; }

    static Fold of(u32 p, const ExponentVector& e) {
        numth::require_prime(p);
        const i64 per = period(p);
        auto norm = [&](i64 v) { return static_cast<u32>(((v % per) + per) % per); };
        Fold f;
        f.p = p;
        std::array<i64, 3> acc{0, 0, 0};
        for (std::size_t i = 0; i < e.size(); ++i) {
            std::size_t g;
            if (p == 2)
                g = i >= 2 ? 2 : i;
            else
                g = i == 0 ? 0 : (i % 2 == 1 ? 1 : 2);
            acc[g] = (acc[g] + e[i] % per) % per;
        }
        for (int g = 0; g < 3; ++g) f.comp[g] = norm(acc[g]);
        return f;
    }

    // Fold of (shift e), computed on the fold alone.
    Fold shifted() const {
        Fold f = *this;
        const u32 per = period(p);
        if (p == 2) {
            f.comp = {0, comp[0], (comp[1] + comp[2]) % per};
        } else {
            f.comp = {0, (comp[0] + comp[2]) % per, comp[1]};
        }
        return f;
    }

    bool operator==(const Fold& o) const { return p == o.p && comp == o.comp; }
    bool operator<(const Fold& o) const { return comp < o.comp; }
};

// ---- Psi polynomials mod p^2 ----

// Affine univariate c0 + c1*x mod p^2; c1 is always divisible by p here.
struct Affine1 {
    u32 c0 = 1, c1 = 0;
};

// Psi_{i,a}(x) = prod_{j=1}^{a p^i} (p^{i+1-nu_p(j)} x + Theta_p(j)) mod p^2,
// by direct expansion (quadratic and higher terms vanish mod p^2).
inline Affine1 psi_poly_raw(u32 i, u32 a, u32 p) {
    numth::require_prime(p);
    if (a >= p) throw std::invalid_argument("psi_poly: digit out of range");
    const u64 p2 = static_cast<u64>(p) * p;
    u64 c0 = 1, c1 = 0;
    const u64 count = static_cast<u64>(a) * pow_u64(p, i);
    for (u64 j = 1; j <= count; ++j) {
        u64 m = j;
        u32 v = 0;
        while (m % p == 0) {
            m /= p;
            ++v;
        }
        // factor: p^{i+1-v} x + m; slope vanishes mod p^2 unless v = i
        u64 slope = i + 1 - v >= 2 ? 0 : pow_u64(p, i + 1 - v) % p2;
        u64 theta = m % p2;
        u64 n0 = c0 * theta % p2;
        u64 n1 = (c0 * slope + c1 * theta) % p2;
        c0 = n0;
        c1 = n1;
    }
    return {static_cast<u32>(c0), static_cast<u32>(c1)};
}

// Level collapse: for p = 2, Psi_i = Psi_2 mod 4 for every i >= 2 (while
// Psi_0 = Psi_1 = 2x+1); for odd p, Psi_{i+2} = Psi_i mod p^2 for i >= 1.
inline u32 psi_level(u32 i, u32 p) {
    if (i <= 2) return i;
    if (p == 2) return 2;
    return i % 2 == 1 ? 1 : 2;
}

inline Affine1 psi_poly(u32 i, u32 a, u32 p) {
    static std::map<std::array<u32, 3>, Affine1> memo;
    static std::mutex mtx;
    const u32 level = psi_level(i, p);
    std::array<u32, 3> key{p, level, a};
    std::lock_guard<std::mutex> lock(mtx);
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(key, psi_poly_raw(level, a, p)).first;
    return it->second;
}

// Psi_{i,a} mod p^M as a degree-truncated coefficient vector. Valid inside
// the graded algebra: the degree-t coefficient is divisible by p^t, so any
// monomial of degree >= maxdeg that we drop is 0 mod p^M when maxdeg >= M.
inline std::vector<Nat> psi_truncated(u32 i, u32 a, u32 p, const Nat& pM, u32 maxdeg) {
    std::vector<Nat> c(maxdeg, Nat(0));
    c[0] = 1;
    const u64 count = static_cast<u64>(a) * pow_u64(p, i);
    for (u64 j = 1; j <= count; ++j) {
        u64 m = j;
        u32 v = 0;
        while (m % p == 0) {
            m /= p;
            ++v;
        }
        Nat slope = pow_nat(p, i + 1 - v) % pM;
        Nat theta = Nat(m) % pM;
        for (std::size_t d = c.size(); d-- > 0;) {
            Nat t = c[d] * theta % pM;
            if (d > 0) t = (t + c[d - 1] * slope) % pM;
            c[d] = t;
        }
    }
    return c;
}

// ---- Symmetric polynomials mod p or p^2 ----
//
// Orbit basis up to total degree 2 (cap 1 plus a guard degree):
//   c0 + c1*sum(x_i) + c2*sum(x_i^2) + c11*sum_{i<j}(x_i x_j)
class SymPoly {
public:
    SymPoly(u32 p, u32 r, u32 mod_exp) : p_(p), r_(r), mod_exp_(mod_exp) {
        if (mod_exp != 1 && mod_exp != 2) throw std::invalid_argument("mod_exp must be 1 or 2");
    }

    static SymPoly constant(u32 p, u32 r, u32 mod_exp, u32 c) {
        SymPoly s(p, r, mod_exp);
        s.c0_ = c % s.modulus();
        return s;
    }
    static SymPoly linear(u32 p, u32 r, u32 mod_exp, u32 c0, u32 c1) {
        SymPoly s(p, r, mod_exp);
        s.c0_ = c0 % s.modulus();
        s.c1_ = c1 % s.modulus();
        return s;
    }
    static SymPoly quadratic(u32 p, u32 r, u32 mod_exp, u32 c0, u32 c1, u32 c2, u32 c11) {
        SymPoly s(p, r, mod_exp);
        const u32 m = s.modulus();
        s.c0_ = c0 % m;
        s.c1_ = c1 % m;
        s.c2_ = c2 % m;
        s.c11_ = r >= 2 ? c11 % m : 0;
        return s;
    }

    u32 p() const { return p_; }
    u32 r() const { return r_; }
    u32 mod_exp() const { return mod_exp_; }
    u32 modulus() const { return mod_exp_ == 1 ? p_ : p_ * p_; }
    u32 c0() const { return c0_; }
    u32 c1() const { return c1_; }
    u32 c2() const { return c2_; }
    u32 c11() const { return c11_; }

    bool is_zero() const { return c0_ == 0 && c1_ == 0 && c2_ == 0 && c11_ == 0; }
    u32 degree() const { return c2_ || c11_ ? 2 : (c1_ ? 1 : 0); }

    u32 evaluate(const std::vector<u32>& point) const {
        if (point.size() != r_) throw std::invalid_argument("SymPoly::evaluate arity");
        const u64 m = modulus();
        u64 s1 = 0, s2 = 0;
        for (u32 v : point) {
            s1 += v;
            s2 += static_cast<u64>(v) * v;
        }
        u64 e2 = 0;
        for (std::size_t i = 0; i < point.size(); ++i)
            for (std::size_t j = i + 1; j < point.size(); ++j)
                e2 += static_cast<u64>(point[i]) * point[j];
        return static_cast<u32>((c0_ + c1_ * (s1 % m) + c2_ * (s2 % m) + c11_ * (e2 % m)) % m);
    }

    SymPoly mod_p() const {
        return quadratic(p_, r_, 1, c0_ % p_, c1_ % p_, c2_ % p_, c11_ % p_);
    }

    Polynomial to_polynomial() const {
        Polynomial q = Polynomial::constant(r_, Int(c0_));
        q = q + Polynomial::sum_of_vars(r_).scaled(Int(c1_));
        q = q + Polynomial::sum_of_squares(r_).scaled(Int(c2_));
        if (r_ >= 2) q = q + Polynomial::pair_products(r_).scaled(Int(c11_));
        return q;
    }

    // Display label for transition-table dumps (fold omitted).
    std::string render() const {
        if (is_zero()) return "0";
        std::vector<std::string> parts;
        auto coef = [](u32 c, const std::string& body) {
            return c == 1 ? body : std::to_string(c) + body;
        };
        if (c2_) parts.push_back(coef(c2_, sum_body() + "^2"));
        if (c11_) parts.push_back(coef(c11_, r_ == 2 ? "xy" : "Σx_ix_j"));
        if (c1_) parts.push_back(c1_ == 1 ? sum_plain() : std::to_string(c1_) + sum_body());
        if (c0_) parts.push_back(std::to_string(c0_));
        std::string s = parts[0];
        for (std::size_t i = 1; i < parts.size(); ++i) s += " + " + parts[i];
        return s;
    }

    bool operator==(const SymPoly& o) const {
        return p_ == o.p_ && r_ == o.r_ && mod_exp_ == o.mod_exp_ && c0_ == o.c0_ &&
               c1_ == o.c1_ && c2_ == o.c2_ && c11_ == o.c11_;
    }
    bool operator<(const SymPoly& o) const {
        return std::array<u32, 4>{c0_, c1_, c2_, c11_} <
               std::array<u32, 4>{o.c0_, o.c1_, o.c2_, o.c11_};
    }

private:
    std::string sum_body() const { return r_ == 2 ? "(x + y)" : "Σx_i"; }
    std::string sum_plain() const { return r_ == 2 ? "x + y" : "Σx_i"; }

    u32 p_, r_, mod_exp_;
    u32 c0_ = 0, c1_ = 0, c2_ = 0, c11_ = 0;
};

// ---- Psi products and the one-letter reduction ----

// Multivariate affine mod p^2: c + sum_j slope[j] * x_j, slopes divisible by p.
struct AffineMulti {
    u32 c = 1;
    std::vector<u32> slope;
};

// Psi^e_a(x) = prod_j prod_i Psi_{i,a_j}(x_j)^{e_i} mod p^2, from the fold.
inline AffineMulti psi_product(const Fold& fold, const std::vector<u8>& a, u32 r) {
    if (a.size() != r) throw std::invalid_argument("psi_product: digit vector arity");
    const u32 p = fold.p;
    const u64 p2 = static_cast<u64>(p) * p;
    auto mul1 = [&](Affine1 u, Affine1 v) {
        return Affine1{static_cast<u32>(static_cast<u64>(u.c0) * v.c0 % p2),
                       static_cast<u32>((static_cast<u64>(u.c0) * v.c1 +
                                         static_cast<u64>(u.c1) * v.c0) % p2)};
    };
    auto pow1 = [&](Affine1 b, u32 e) {
        Affine1 acc{1, 0};
        while (e) {
            if (e & 1) acc = mul1(acc, b);
            b = mul1(b, b);
            e >>= 1;
        }
        return acc;
    };

    std::vector<Affine1> row(r);
    for (u32 j = 0; j < r; ++j) {
        Affine1 u{1, 0};
        for (u32 g = 0; g < 3; ++g)
            if (fold.comp[g]) u = mul1(u, pow1(psi_poly(g, a[j], p), fold.comp[g]));
        row[j] = u;
    }
    AffineMulti out;
    out.slope.assign(r, 0);
    u64 c = 1;
    for (u32 j = 0; j < r; ++j) c = c * row[j].c0 % p2;
    out.c = static_cast<u32>(c);
    for (u32 j = 0; j < r; ++j) {
        u64 s = row[j].c1;
        for (u32 l = 0; l < r; ++l)
            if (l != j) s = s * row[l].c0 % p2;
        out.slope[j] = static_cast<u32>(s);
    }
    return out;
}

struct ReduceOutput {
    SymPoly q_hat;  // Q_I mod p
    u32 lambda;     // lambda(I), the valuation emitted by this step
};

// One reduction step: Q_I = p^{-lambda(I)} sum_{a in rho(I)} P(px+a) Psi^e_a(x),
// carried out mod p^2 and returned mod p. Determined by (fold, P mod p).
// The division by p^{lambda(I)} must be exact; a failure is an engine bug.
inline ReduceOutput reduce_letter(const SymPoly& p_hat, const Fold& fold, u32 letter,
                                  const abacus::Alphabet& alphabet) {
    if (p_hat.mod_exp() != 1) throw std::invalid_argument("reduce_letter consumes P mod p");
    const u32 p = alphabet.p();
    const u32 r = alphabet.r();
    if (p_hat.p() != p || p_hat.r() != r || fold.p != p)
        throw std::invalid_argument("reduce_letter: mismatched p/r");
    if (alphabet.mode() == abacus::AlphabetMode::digit_sum && alphabet.sum_of(letter) >= p &&
        alphabet.special(letter))
        throw std::invalid_argument(
            "reduce_letter: digit-sum reduction is supported for letters with sum < p");
    const u64 p2 = static_cast<u64>(p) * p;
    const u32 lam = alphabet.lambda(letter);

    u64 s_const = 0;
    std::vector<u64> s_slope(r, 0);
    alphabet.for_each_orbit_vector(letter, [&](const std::vector<u8>& a) {
        u64 s1 = 0, s2 = 0;
        for (u8 d : a) {
            s1 += d;
            s2 += static_cast<u64>(d) * d;
        }
        const u64 e2 = (s1 * s1 - s2) / 2;
        // P-hat lifted to [0,p) and substituted at px + a, kept mod p^2:
        //   P(px+a) = P(a) + p * sum_j dP_j(a) x_j   (higher terms carry p^2)
        const u64 value = (p_hat.c0() + p_hat.c1() * s1 + p_hat.c2() * s2 + p_hat.c11() * e2) % p2;
        AffineMulti psi = psi_product(fold, a, r);
        s_const = (s_const + value * psi.c) % p2;
        for (u32 j = 0; j < r; ++j) {
            const u64 deriv =
                (p_hat.c1() + 2 * p_hat.c2() * a[j] + p_hat.c11() * (s1 - a[j])) % p;
            s_slope[j] = (s_slope[j] + value * psi.slope[j] + p * deriv % p2 * psi.c) % p2;
        }
    });

    u32 c0, c1;
    if (lam == 0) {
        c0 = static_cast<u32>(s_const % p);
        c1 = 0;
        for (u32 j = 0; j < r; ++j)
            if (s_slope[j] % p != 0) throw std::logic_error("reduce_letter: slope not p-divisible");
    } else {
        if (s_const % p != 0)
            throw std::logic_error("reduce_letter: inexact division by p^lambda (engine bug)");
        c0 = static_cast<u32>(s_const / p % p);
        c1 = static_cast<u32>(s_slope[0] / p % p);
        for (u32 j = 1; j < r; ++j)
            if (s_slope[j] / p % p != c1)
                throw std::logic_error("reduce_letter: asymmetric Q_I (engine bug)");
    }
    ReduceOutput out{SymPoly::linear(p, r, 1, c0, c1), lam};
    if (out.q_hat.degree() > std::max<u32>(1, p_hat.degree()))
        throw std::logic_error("reduce_letter: degree cap violated");
    return out;
}

// ---- Word reduction ----

enum class Halt { at_empty, at_single_letter };

struct WordReduction {
    SymPoly residual;  // R mod p
    u32 lambda;        // lambda(T) (at_empty) or lambda(tail) (at_single_letter)
    std::optional<u32> leading_sum;       // single-letter mode: h of the leading letter
    std::optional<u32> residual_at_unit;  // R evaluated at a rho(leading) representative, mod p
};

// Iterate reduce_letter from the rightmost column. at_empty consumes the
// whole word, leaving S^e_T(P) = p^lambda * R(0,...,0)-unit structure;
// at_single_letter halts before the leftmost letter M_h (h >= 1), reporting
// R(M_h) mod p, which carries the constant term of the valuation bound.
inline WordReduction reduce_word(const SymPoly& p_mod_p, const ExponentVector& e,
                                 const abacus::Type& t, Halt halt) {
    const auto& alphabet = *t.alphabet;
    Fold fold = Fold::of(alphabet.p(), e);
    SymPoly cur = p_mod_p;
    u32 lam = 0;

    const std::size_t stop = halt == Halt::at_empty ? 0 : 1;
    if (halt == Halt::at_single_letter) {
        if (t.empty()) throw std::invalid_argument("reduce_word: empty type in single-letter mode");
        if (alphabet.sum_of(t.word[0]) == 0)
            throw std::invalid_argument("reduce_word: leading letter must be nonzero");
    }
    for (std::size_t idx = t.word.size(); idx-- > stop;) {
        ReduceOutput step = reduce_letter(cur, fold, t.word[idx], alphabet);
        cur = step.q_hat;
        lam += step.lambda;
        fold = fold.shifted();
    }

    WordReduction out{cur, lam, std::nullopt, std::nullopt};
    if (halt == Halt::at_single_letter) {
        const u32 leading = t.word[0];
        const u32 h = alphabet.sum_of(leading);
        out.leading_sum = h;
        std::vector<u32> point(alphabet.r(), 0);
        if (alphabet.mode() == abacus::AlphabetMode::multiset) {
            const auto& m = alphabet.multiset_of(leading);
            for (u32 j = 0; j < alphabet.r(); ++j) point[j] = m[j];
        } else {
            if (h >= alphabet.p())
                throw std::invalid_argument("reduce_word: digit-sum leading letter must be < p");
            point[alphabet.r() - 1] = h;
        }
        out.residual_at_unit = cur.evaluate(point);
    }
    return out;
}

}  // namespace abaci::reduction
