#pragma once
// Base-p digit machinery, valuations and exact multinomial coefficients.
// Digit order is most-significant first everywhere.

#include "abaci/nat.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <vector>

namespace abaci::numth {

inline bool is_prime(u32 p) {
    if (p < 2) return false;
    for (u32 d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

inline void require_prime(u32 p) {
    if (!is_prime(p)) throw std::invalid_argument("base must be prime, got " + std::to_string(p));
}

// Base-p digits of n, most significant first; {0} for n = 0.
inline std::vector<u32> digits(Nat n, u32 p) {
    require_prime(p);
    if (n == 0) return {0};
    std::vector<u32> d;
    while (n > 0) {
        d.push_back(static_cast<u32>(n % p));
        n /= p;
    }
    std::reverse(d.begin(), d.end());
    return d;
}

inline Nat from_digits(const std::vector<u32>& d, u32 p) {
    Nat n = 0;
    for (u32 v : d) n = n * p + v;
    return n;
}

inline Nat digit_sum(const Nat& n, u32 p) {
    require_prime(p);
    Nat s = 0, m = n;
    while (m > 0) {
        s += m % p;
        m /= p;
    }
    return s;
}

inline Nat nonzero_digit_count(const Nat& n, u32 p) {
    require_prime(p);
    Nat s = 0, m = n;
    while (m > 0) {
        if (m % p != 0) ++s;
        m /= p;
    }
    return s;
}

// Exponent of p in n; n = 0 has no finite valuation.
inline Nat nu(const Nat& n, u32 p) {
    require_prime(p);
    if (n == 0) throw std::domain_error("nu(0) is infinite");
    Nat e = 0, m = n;
    while (m % p == 0) {
        m /= p;
        ++e;
    }
    return e;
}

// p-free part of n: n = p^nu(n) * theta(n).
inline Nat theta(const Nat& n, u32 p) {
    require_prime(p);
    if (n == 0) throw std::domain_error("theta(0) undefined");
    Nat m = n;
    while (m % p == 0) m /= p;
    return m;
}

// Memoized exact factorials. Synchronized; values returned by copy.
inline Nat factorial(u64 n) {
    static std::vector<Nat> table{Nat(1)};
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    while (table.size() <= n) table.push_back(table.back() * Nat(table.size()));
    return table[static_cast<std::size_t>(n)];
}

inline Nat binomial(u64 n, u64 k) {
    if (k > n) return 0;
    return factorial(n) / (factorial(k) * factorial(n - k));
}

inline u64 nat_to_u64(const Nat& n, const char* what) {
    if (n < 0 || n > Nat(UINT64_MAX)) throw std::invalid_argument(std::string(what) + " out of range");
    return static_cast<u64>(n);
}

// n! / prod(parts_i!); requires sum(parts) = n.
inline Nat multinomial(const Nat& n, const std::vector<Nat>& parts) {
    Nat sum = 0;
    for (const Nat& x : parts) {
        if (x < 0) throw std::invalid_argument("multinomial: negative part");
        sum += x;
    }
    if (sum != n) throw std::invalid_argument("multinomial: parts do not sum to n");
    Nat r = factorial(nat_to_u64(n, "multinomial n"));
    for (const Nat& x : parts) r /= factorial(nat_to_u64(x, "multinomial part"));
    return r;
}

// Kummer/Legendre: nu_p of the multinomial equals the carry count,
// (sum_i s_p(parts_i) - s_p(n)) / (p - 1).
inline Nat multinomial_valuation(const Nat& n, const std::vector<Nat>& parts, u32 p) {
    require_prime(p);
    Nat sum = 0, s = 0;
    for (const Nat& x : parts) {
        sum += x;
        s += digit_sum(x, p);
    }
    if (sum != n) throw std::invalid_argument("multinomial_valuation: parts do not sum to n");
    return (s - digit_sum(n, p)) / (p - 1);
}

inline bool is_carry_free(const Nat& n, const std::vector<Nat>& parts, u32 p) {
    return multinomial_valuation(n, parts, p) == 0;
}

// Binary-expansion predicates for the equality characterizations.
inline bool has_adjacent_ones(const Nat& n) { return (n & (n >> 1)) != 0; }

// True iff n = 1^a 0^b in binary, a >= 1.
inline bool ones_before_zeros(const Nat& n) {
    if (n == 0) return false;
    Nat t = n;
    while ((t & 1) == 0) t >>= 1;
    return (t & (t + 1)) == 0;
}

// ---- Carry-free partitionings ----
//
// A partitioning x_1 + ... + x_r = n is carry-free in base p iff each digit
// column of the abacus sums to the corresponding digit of n. Enumeration
// walks the digit columns, assigning a composition of each digit of n.

// Number of carry-free r-part partitionings of n: product over digits c of
// #(compositions of c into r parts each < p). For p = 2 this is r^{s_2(n)}.
inline Nat carry_free_count(const Nat& n, u32 p, u32 r) {
    require_prime(p);
    Nat total = 1;
    for (u32 c : digits(n, p)) {
        Nat ways = 0;
        std::function<void(u32, u32)> rec = [&](u32 slot, u32 rem) {
            if (slot == r) {
                if (rem == 0) ++ways;
                return;
            }
            for (u32 v = 0; v < p && v <= rem; ++v) rec(slot + 1, rem - v);
        };
        rec(0, c);
        total *= ways;
    }
    return total;
}

// Visit every carry-free partitioning of n into r ordered parts.
inline void for_each_carry_free(const Nat& n, u32 p, u32 r,
                                const std::function<void(const std::vector<Nat>&)>& visit) {
    require_prime(p);
    std::vector<u32> dig = n == 0 ? std::vector<u32>{} : digits(n, p);
    std::vector<Nat> parts(r, Nat(0));
    std::function<void(std::size_t, u32, u32)> rec = [&](std::size_t col, u32 slot, u32 rem) {
        if (col == dig.size()) {
            visit(parts);
            return;
        }
        if (slot == r) {
            if (rem == 0) rec(col + 1, 0, col + 1 < dig.size() ? dig[col + 1] : 0);
            return;
        }
        // digits of the remaining slots cannot exceed rem
        for (u32 v = 0; v < p && v <= rem; ++v) {
            Nat save = parts[slot];
            parts[slot] = parts[slot] * p + v;
            rec(col, slot + 1, rem - v);
            parts[slot] = save;
        }
    };
    if (dig.empty())
        visit(parts);
    else
        rec(0, 0, dig[0]);
}

// Exact sum of the multinomials over all carry-free r-part partitionings of n;
// these are exactly the r-nomial coefficients with n at the top that are
// coprime to p. Throws resource_error when the term count exceeds max_terms.
inline Nat carry_free_multinomial_sum(const Nat& n, u32 p, u32 r, u64 max_terms = 100'000'000) {
    if (carry_free_count(n, p, r) > max_terms)
        throw resource_error("carry_free_multinomial_sum: too many partitionings");
    Nat total = 0;
    const Nat nfact = factorial(nat_to_u64(n, "carry_free sum n"));
    for_each_carry_free(n, p, r, [&](const std::vector<Nat>& parts) {
        Nat denom = 1;
        for (const Nat& x : parts) denom *= factorial(nat_to_u64(x, "carry_free part"));
        total += nfact / denom;
    });
    return total;
}

// ---- Theta_p(m!) ----

// Exact p-free part of m!.
inline Nat theta_factorial(u64 m, u32 p) {
    Nat f = factorial(m);
    while (f % p == 0) f /= p;
    return f;
}

// Theta_p(m!) mod p^K without materializing m!:
// Theta_p(m!) = (prod of non-multiples of p in [1, m]) * Theta_p(floor(m/p)!).
inline Nat theta_factorial_mod(u64 m, u32 p, const Nat& pk) {
    Nat r = 1;
    while (m > 0) {
        Nat block = 1;
        for (u64 j = 1; j <= m; ++j) {
            if (j % p == 0) continue;
            block = block * j % pk;
        }
        r = r * block % pk;
        m /= p;
    }
    return r;
}

// Modular inverse mod m (m need not be prime; requires gcd(a, m) = 1).
inline Nat mod_inverse(const Nat& a, const Nat& m) {
    Int t = 0, new_t = 1;
    Int r = m, new_r = ((a % m) + m) % m;
    while (new_r != 0) {
        Int q = r / new_r;
        Int tmp = t - q * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - q * new_r;
        r = new_r;
        new_r = tmp;
    }
    if (r != 1) throw std::domain_error("mod_inverse: not invertible");
    return Nat(((t % m) + m) % m);
}

}  // namespace abaci::numth
