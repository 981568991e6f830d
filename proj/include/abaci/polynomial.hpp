#pragma once
// Exact sparse multivariate integer polynomials. Used by the brute-force
// abacus sum oracle and by tests that need symbolic reductions at precision
// higher than the mod-p^2 automaton engine.

#include "abaci/nat.hpp"

#include <map>
#include <vector>

namespace abaci {

// The exponent vector e = (e_0, ..., e_k) of the psi product; components may
// be negative. shift e = (0, e_0, ..., e_k).
struct ExponentVector {
    std::vector<i64> entries;

    ExponentVector() = default;
    ExponentVector(std::initializer_list<i64> init) : entries(init) {}
    explicit ExponentVector(std::vector<i64> v) : entries(std::move(v)) {}

    std::size_t size() const { return entries.size(); }
    i64 operator[](std::size_t i) const { return i < entries.size() ? entries[i] : 0; }

    ExponentVector shifted() const {
        std::vector<i64> v;
        v.reserve(entries.size() + 1);
        v.push_back(0);
        v.insert(v.end(), entries.begin(), entries.end());
        return ExponentVector(std::move(v));
    }
};

class Polynomial {
public:
    using Monomial = std::vector<u32>;  // exponent per variable, length = vars

    explicit Polynomial(u32 vars) : vars_(vars) {}

    static Polynomial constant(u32 vars, Int c) {
        Polynomial p(vars);
        p.add_term(Monomial(vars, 0), std::move(c));
        return p;
    }
    static Polynomial sum_of_vars(u32 vars) {
        Polynomial p(vars);
        for (u32 j = 0; j < vars; ++j) {
            Monomial m(vars, 0);
            m[j] = 1;
            p.add_term(m, 1);
        }
        return p;
    }
    static Polynomial sum_of_squares(u32 vars) {
        Polynomial p(vars);
        for (u32 j = 0; j < vars; ++j) {
            Monomial m(vars, 0);
            m[j] = 2;
            p.add_term(m, 1);
        }
        return p;
    }
    // elementary symmetric e_2 = sum_{i<j} x_i x_j
    static Polynomial pair_products(u32 vars) {
        Polynomial p(vars);
        for (u32 i = 0; i < vars; ++i)
            for (u32 j = i + 1; j < vars; ++j) {
                Monomial m(vars, 0);
                m[i] = m[j] = 1;
                p.add_term(m, 1);
            }
        return p;
    }
    // univariate coeffs c[0] + c[1] x_j + ... placed on variable j
    static Polynomial from_univariate(u32 vars, u32 j, const std::vector<Int>& coeffs) {
        Polynomial p(vars);
        for (std::size_t d = 0; d < coeffs.size(); ++d) {
            if (coeffs[d] == 0) continue;
            Monomial m(vars, 0);
            m[j] = static_cast<u32>(d);
            p.add_term(m, coeffs[d]);
        }
        return p;
    }

    u32 vars() const { return vars_; }
    const std::map<Monomial, Int>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    u32 degree() const {
        u32 d = 0;
        for (const auto& [m, c] : terms_) {
            u32 t = 0;
            for (u32 e : m) t += e;
            d = std::max(d, t);
        }
        return d;
    }

    void add_term(const Monomial& m, Int c) {
        if (c == 0) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(m, std::move(c));
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Polynomial operator+(const Polynomial& o) const {
        Polynomial r = *this;
        for (const auto& [m, c] : o.terms_) r.add_term(m, c);
        return r;
    }

    Polynomial operator*(const Polynomial& o) const {
        Polynomial r(vars_);
        for (const auto& [m1, c1] : terms_)
            for (const auto& [m2, c2] : o.terms_) {
                Monomial m(vars_);
                for (u32 j = 0; j < vars_; ++j) m[j] = m1[j] + m2[j];
                r.add_term(m, c1 * c2);
            }
        return r;
    }

    Polynomial scaled(const Int& c) const {
        Polynomial r(vars_);
        if (c == 0) return r;
        for (const auto& [m, coef] : terms_) r.add_term(m, coef * c);
        return r;
    }

    // P(p*x + a): substitution used by one reduction step.
    Polynomial compose_px_plus_a(u32 p, const std::vector<u32>& a) const {
        Polynomial r(vars_);
        for (const auto& [m, c] : terms_) {
            Polynomial term = Polynomial::constant(vars_, c);
            for (u32 j = 0; j < vars_; ++j)
                for (u32 e = 0; e < m[j]; ++e) {
                    std::vector<Int> lin = {Int(a[j]), Int(p)};
                    term = term * Polynomial::from_univariate(vars_, j, lin);
                }
            r = r + term;
        }
        return r;
    }

    Int evaluate(const std::vector<Int>& point) const {
        Int total = 0;
        for (const auto& [m, c] : terms_) {
            Int t = c;
            for (u32 j = 0; j < vars_; ++j)
                for (u32 e = 0; e < m[j]; ++e) t *= point[j];
            total += t;
        }
        return total;
    }

    Nat evaluate_mod(const std::vector<Nat>& point, const Nat& mod) const {
        Nat total = 0;
        for (const auto& [m, c] : terms_) {
            Nat t = ((c % mod) + mod) % mod;
            for (u32 j = 0; j < vars_; ++j)
                for (u32 e = 0; e < m[j]; ++e) t = t * (point[j] % mod) % mod;
            total = (total + t) % mod;
        }
        return total % mod;
    }

    // Coefficient-wise reduction into [0, mod).
    void reduce_mod(const Nat& mod) {
        for (auto it = terms_.begin(); it != terms_.end();) {
            it->second = ((it->second % mod) + mod) % mod;
            it = it->second == 0 ? terms_.erase(it) : std::next(it);
        }
    }

    // Drop every monomial of total degree > maxdeg. Exact in the p-graded
    // truncated algebra where degree-t coefficients carry p^t.
    void truncate_degree(u32 maxdeg) {
        for (auto it = terms_.begin(); it != terms_.end();) {
            u32 t = 0;
            for (u32 e : it->first) t += e;
            it = t > maxdeg ? terms_.erase(it) : std::next(it);
        }
    }

    bool operator==(const Polynomial& o) const { return vars_ == o.vars_ && terms_ == o.terms_; }

private:
    u32 vars_;
    std::map<Monomial, Int> terms_;
};

}  // namespace abaci
