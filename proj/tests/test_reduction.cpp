#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "abaci/reduction.hpp"
#include "abaci/residue.hpp"

#include <random>

using namespace abaci;
using namespace abaci::abacus;
using namespace abaci::reduction;

TEST_CASE("psi polynomials mod p^2") {
    // p = 2: Psi_0 = Psi_1 = 2x+1, Psi_i = 2x+3 for i >= 2
    CHECK(psi_poly(0, 1, 2).c0 == 1);
    CHECK(psi_poly(0, 1, 2).c1 == 2);
    CHECK(psi_poly(1, 1, 2).c0 == 1);
    CHECK(psi_poly(1, 1, 2).c1 == 2);
    CHECK(psi_poly(2, 1, 2).c0 == 3);
    CHECK(psi_poly(2, 1, 2).c1 == 2);
    // a = 0 gives the empty product
    CHECK(psi_poly(0, 0, 5).c0 == 1);
    CHECK(psi_poly(0, 0, 5).c1 == 0);
    // p = 3 hand values: Psi_{0,1} = 3x+1, Psi_{0,2} = 2, Psi_{1,1} = 6x+2
    CHECK(psi_poly(0, 1, 3).c0 == 1);
    CHECK(psi_poly(0, 1, 3).c1 == 3);
    CHECK(psi_poly(0, 2, 3).c0 == 2);
    CHECK(psi_poly(0, 2, 3).c1 == 0);
    CHECK(psi_poly(1, 1, 3).c0 == 2);
    CHECK(psi_poly(1, 1, 3).c1 == 6);
}

TEST_CASE("level collapse matches the raw products") {
    for (u32 p : {2u, 3u, 5u})
        for (u32 a = 0; a < p; ++a)
            for (u32 i = 0; i <= 6; ++i) {
                auto fast = psi_poly(i, a, p);
                auto raw = psi_poly_raw(i, a, p);
                CHECK(fast.c0 == raw.c0);
                CHECK(fast.c1 == raw.c1);
            }
}

TEST_CASE("Psi periodicity for odd p, and the p = 2 exception") {
    for (u32 p : {3u, 5u})
        for (u32 a = 1; a < p; ++a)
            for (u32 i = 1; i <= 4; ++i) {
                auto lo = psi_poly_raw(i, a, p);
                auto hi = psi_poly_raw(i + 2, a, p);
                CHECK(lo.c0 == hi.c0);
                CHECK(lo.c1 == hi.c1);
            }
    // p = 2 collapses only from i = 2 on: Psi_1 = 2x+1 while Psi_3 = 2x+3
    CHECK(psi_poly_raw(1, 1, 2).c0 != psi_poly_raw(3, 1, 2).c0);
    CHECK(psi_poly_raw(2, 1, 2).c0 == psi_poly_raw(4, 1, 2).c0);
}

TEST_CASE("Euler period: Psi^{p^2-p} = 1 mod p^2 for odd p") {
    for (u32 p : {3u, 5u})
        for (u32 a = 1; a < p; ++a)
            for (u32 i = 0; i <= 3; ++i) {
                auto base = psi_poly(i, a, p);
                const u64 p2 = p * p;
                u64 c0 = 1, c1 = 0;
                for (u32 t = 0; t < p * p - p; ++t) {
                    u64 n0 = c0 * base.c0 % p2;
                    u64 n1 = (c0 * base.c1 + c1 * base.c0) % p2;
                    c0 = n0;
                    c1 = n1;
                }
                CHECK(c0 == 1);
                CHECK(c1 == 0);
            }
}

TEST_CASE("fold-of-shift equals shift-of-fold") {
    std::mt19937 rng(31337);
    for (u32 p : {2u, 3u, 5u})
        for (int iter = 0; iter < 200; ++iter) {
            std::vector<i64> entries(rng() % 6);
            for (auto& v : entries) v = static_cast<i64>(rng() % 21) - 10;
            ExponentVector e(entries);
            CHECK(Fold::of(p, e).shifted() == Fold::of(p, e.shifted()));
        }
}

TEST_CASE("fold normalizes negative components") {
    Fold f2 = Fold::of(2, ExponentVector{-1});
    CHECK(f2.comp == std::array<u32, 3>{1, 0, 0});
    Fold f3 = Fold::of(3, ExponentVector{-1});
    CHECK(f3.comp == std::array<u32, 3>{5, 0, 0});
    Fold f24 = Fold::of(2, ExponentVector{-4, 1});
    CHECK(f24.comp == std::array<u32, 3>{0, 1, 0});
}

TEST_CASE("odd-sum automaton single steps") {
    auto a = Alphabet::multiset(2, 2);
    u32 M = a->parse("M").value(), Z = a->parse("Z").value();
    SymPoly one = SymPoly::constant(2, 2, 1, 1);
    Fold f = Fold::of(2, ExponentVector{-1});

    auto step1 = reduce_letter(one, f, M, *a);
    CHECK(step1.lambda == 1);
    CHECK(step1.q_hat.render() == "x + y + 1");

    auto step2 = reduce_letter(step1.q_hat, f.shifted(), M, *a);
    CHECK(step2.q_hat.render() == "0");

    auto step3 = reduce_letter(step1.q_hat, f.shifted(), Z, *a);
    CHECK(step3.lambda == 0);
    CHECK(step3.q_hat.render() == "1");
}

TEST_CASE("fold sufficiency: equal folds give identical reductions") {
    auto a = Alphabet::multiset(2, 2);
    SymPoly p_hat = SymPoly::linear(2, 2, 1, 1, 1);
    ExponentVector e1{-1};
    ExponentVector e2{1, 2, 4, 2};  // same fold (1, 0, 0)
    REQUIRE(Fold::of(2, e1) == Fold::of(2, e2));
    for (u32 letter = 0; letter < a->letter_count(); ++letter) {
        auto q1 = reduce_letter(p_hat, Fold::of(2, e1), letter, *a);
        auto q2 = reduce_letter(p_hat, Fold::of(2, e2), letter, *a);
        CHECK(q1.q_hat == q2.q_hat);
    }
}

TEST_CASE("reduce_word at-empty: odd-binomial rows") {
    auto a = Alphabet::multiset(2, 2);
    SymPoly one = SymPoly::constant(2, 2, 1, 1);

    auto r5 = reduce_word(one, ExponentVector{-1}, cf_type(5, a), Halt::at_empty);
    CHECK(r5.lambda == 2);
    CHECK(r5.residual.evaluate({0, 0}) % 2 == 1);  // equality at n = 5

    auto r3 = reduce_word(one, ExponentVector{-1}, cf_type(3, a), Halt::at_empty);
    CHECK(r3.lambda == 2);
    CHECK(r3.residual.evaluate({0, 0}) % 2 == 0);  // strict at n = 3
}

TEST_CASE("reduce_word at-single-letter") {
    auto a = Alphabet::multiset(2, 2);
    SymPoly one = SymPoly::constant(2, 2, 1, 1);
    auto r = reduce_word(one, ExponentVector{-4, 1}, cf_type(1, a), Halt::at_single_letter);
    CHECK(r.lambda == 0);
    REQUIRE(r.leading_sum.has_value());
    CHECK(*r.leading_sum == 1);
    REQUIRE(r.residual_at_unit.has_value());
    CHECK(*r.residual_at_unit == 1);  // consistent with w*_4(1) = 2

    CHECK_THROWS_AS(reduce_word(one, ExponentVector{-1}, Type{a, {}}, Halt::at_single_letter),
                    std::invalid_argument);
}

namespace {

Polynomial random_poly(std::mt19937& rng, u32 r) {
    switch (rng() % 3) {
        case 0: return Polynomial::constant(r, 1);
        case 1: return Polynomial::sum_of_vars(r) + Polynomial::constant(r, rng() % 3);
        default:
            return Polynomial::sum_of_squares(r).scaled(1 + rng() % 2) +
                   Polynomial::pair_products(r).scaled(rng() % 3) +
                   Polynomial::constant(r, rng() % 5);
    }
}

SymPoly poly_mod_p(const Polynomial& poly, u32 p, u32 r) {
    auto coeff_of = [&](const Polynomial::Monomial& m) {
        auto it = poly.terms().find(m);
        return it == poly.terms().end() ? u32(0)
                                        : static_cast<u32>(((it->second % p) + p) % p);
    };
    Polynomial::Monomial c0(r, 0), c1(r, 0), c2(r, 0), c11(r, 0);
    c1[0] = 1;
    c2[0] = 2;
    if (r >= 2) {
        c11[0] = 1;
        c11[1] = 1;
    }
    return SymPoly::quadratic(p, r, 1, coeff_of(c0), coeff_of(c1), coeff_of(c2),
                              r >= 2 ? coeff_of(c11) : 0);
}

}  // namespace

TEST_CASE("randomized engine-vs-oracle: gdiv bound, gred step, full word") {
    std::mt19937 rng(424242);
    int done = 0;
    while (done < 80) {
        const u32 p = rng() % 2 == 0 ? 2 : 3;
        const u32 r = rng() % 2 == 0 ? 2 : 3;
        auto a = Alphabet::multiset(p, r);

        std::vector<i64> entries(1 + rng() % 3);
        for (auto& v : entries) v = static_cast<i64>(rng() % 9) - 4;
        ExponentVector e(entries);

        Polynomial poly = random_poly(rng, r);
        Nat n = rng() % 24 + 1;
        auto types = enumerate_types(n, a);
        const Type& t = types[rng() % types.size()];
        const u32 lam = abacus::lambda(t);
        const u32 K = lam + 4;

        // divisibility bound: nu_p(S) >= lambda(T)
        auto direct = abacus::sum_direct(e, t, poly, K);
        if (direct.valuation) CHECK(*direct.valuation >= lam);

        // full-word engine consistency: S = p^lam * R(0..0) mod p^{lam+1}
        auto word = reduce_word(poly_mod_p(poly, p, r), e, t, Halt::at_empty);
        CHECK(word.lambda == lam);
        auto low = abacus::sum_direct(e, t, poly, lam + 1);
        Nat expect = pow_nat(p, lam) * word.residual.evaluate(std::vector<u32>(r, 0)) %
                     pow_nat(p, lam + 1);
        CHECK(low.residue == expect);

        // one-step identity: append a random letter I
        u32 letter = rng() % a->letter_count();
        Type ti = t;
        ti.word.push_back(letter);
        auto lhs = abacus::sum_direct(e, ti, poly, K);
        Polynomial q_exact = reduce_letter_exact(poly, e, letter, *a, K);
        auto rhs = abacus::sum_direct(e.shifted(), t, q_exact, K);
        const Nat pk = pow_nat(p, K);
        CHECK(lhs.residue == rhs.residue * pow_nat(p, a->lambda(letter)) % pk);

        // the mod-p engine agrees with the exact reduction mod p
        auto q_hat = reduce_letter(poly_mod_p(poly, p, r), Fold::of(p, e), letter, *a);
        Polynomial q_exact_mod = q_exact;
        q_exact_mod.reduce_mod(p);
        Polynomial diff = q_exact_mod + q_hat.q_hat.to_polynomial().scaled(-1);
        diff.reduce_mod(p);
        CHECK(diff.is_zero());

        ++done;
    }
}

TEST_CASE("SymPoly rendering and symmetry") {
    CHECK(SymPoly::constant(2, 2, 1, 1).render() == "1");
    CHECK(SymPoly::constant(2, 2, 1, 0).render() == "0");
    CHECK(SymPoly::linear(2, 2, 1, 1, 1).render() == "x + y + 1");
    CHECK(SymPoly::linear(2, 4, 1, 0, 1).render() == "Σx_i");
    CHECK(SymPoly::linear(2, 4, 1, 1, 1).render() == "Σx_i + 1");
    CHECK(SymPoly::linear(3, 3, 1, 1, 2).render() == "2Σx_i + 1");

    std::mt19937 rng(5);
    SymPoly q = SymPoly::quadratic(5, 3, 1, 3, 1, 4, 2);
    for (int iter = 0; iter < 20; ++iter) {
        std::vector<u32> pt{static_cast<u32>(rng() % 5), static_cast<u32>(rng() % 5),
                            static_cast<u32>(rng() % 5)};
        std::vector<u32> perm = pt;
        std::shuffle(perm.begin(), perm.end(), rng);
        CHECK(q.evaluate(pt) == q.evaluate(perm));
    }
}

TEST_CASE("word-sum engine matches the enumeration oracle") {
    for (u32 p : {2u, 3u, 5u}) {
        const u32 r = p == 5 ? 5 : 2 * p;  // r = kp shapes
        const u32 K = 6;
        WordSumEngine engine(p, r, ExponentVector{-1}, K);
        auto a = Alphabet::digit_sum(p, r);
        for (u64 n = 1; n <= 40; ++n) {
            auto fast = engine.evaluate(n);
            auto slow = abacus::sum_direct(ExponentVector{-1}, digit_type(n, a),
                                           Polynomial::constant(r, 1), K);
            CHECK(Nat(fast.residue) == slow.residue);
        }
    }
}

TEST_CASE("word-sum engine reproduces exact carry-free sums") {
    // S(n) = Theta_p(n!) * S^(-1)_T(1) where T is the digit word of n
    for (u32 p : {2u, 3u}) {
        const u32 r = p;
        const u32 K = 7;
        WordSumEngine engine(p, r, ExponentVector{-1}, K);
        const Nat pk = pow_nat(p, K);
        for (u64 n = 1; n <= 60; ++n) {
            Nat exact = numth::carry_free_multinomial_sum(n, p, r);
            Nat theta = numth::theta_factorial_mod(n, p, pk);
            CHECK(exact % pk == theta * engine.evaluate(n).residue % pk);
        }
    }
}

TEST_CASE("psi_truncated agrees with psi_poly mod p^2") {
    for (u32 p : {2u, 3u, 5u})
        for (u32 a = 0; a < p; ++a)
            for (u32 i = 0; i <= 3; ++i) {
                auto tr = psi_truncated(i, a, p, Nat(p * p), 4);
                auto ref = psi_poly_raw(i, a, p);
                CHECK(tr[0] == ref.c0);
                CHECK(tr[1] == ref.c1);
            }
}
