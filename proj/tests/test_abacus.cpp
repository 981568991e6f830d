#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "abaci/abacus.hpp"

#include <random>
#include <set>

using namespace abaci;
using namespace abaci::abacus;

namespace {
AlphabetRef p2r2() {
    static AlphabetRef a = Alphabet::multiset(2, 2);
    return a;
}
u32 L(const AlphabetRef& a, const std::string& tok) { return a->parse(tok).value(); }
}  // namespace

TEST_CASE("p=2 r=2 alphabet has letters Z, M, O") {
    auto a = p2r2();
    REQUIRE(a->letter_count() == 3);
    CHECK(a->render(0) == "Z");
    CHECK(a->render(1) == "M");
    CHECK(a->render(2) == "O");
    CHECK(a->orbit_size(L(a, "M")) == 2);
    CHECK(a->special(L(a, "M")));
    CHECK(!a->special(L(a, "Z")));
    CHECK(!a->special(L(a, "O")));
}

TEST_CASE("letter stats") {
    auto s1 = letter_stats(L(p2r2(), "M"), p2r2());
    CHECK(s1.orbit_size == 2);
    CHECK(s1.special);
    CHECK(s1.lambda == 1);

    auto a32 = Alphabet::multiset(3, 2);
    // multiset {1,2}: orbit 2, 3 does not divide 2
    u32 letter12 = a32->letter_of_column({1, 2});
    CHECK(a32->orbit_size(letter12) == 2);
    CHECK(!a32->special(letter12));

    auto a24 = Alphabet::multiset(2, 4);
    u32 letter0011 = a24->letter_of_column({0, 0, 1, 1});
    CHECK(a24->orbit_size(letter0011) == 6);
    CHECK(a24->special(letter0011));
}

TEST_CASE("digit-sum alphabet orbit sizes") {
    auto a = Alphabet::digit_sum(3, 3);
    REQUIRE(a->letter_count() == 7);  // sums 0..6
    CHECK(a->orbit_size(0) == 1);
    CHECK(a->orbit_size(1) == 3);
    CHECK(a->orbit_size(2) == 6);
    CHECK(a->orbit_size(3) == 7);
    CHECK(a->orbit_size(4) == 6);
    CHECK(a->orbit_size(6) == 1);
    CHECK(a->special(1));
    CHECK(a->special(2));
    CHECK(!a->special(3));
    CHECK(!a->special(0));
}

TEST_CASE("type_of") {
    CHECK(render(type_of({5, 2}, p2r2())) == "MMM");
    CHECK(render(type_of({3, 0}, p2r2())) == "MM");
    CHECK(render(type_of({1, 1}, p2r2())) == "O");
    CHECK(render(type_of({0, 0}, p2r2())) == "eps");
    CHECK_THROWS_AS(type_of({1, 2, 3}, p2r2()), std::invalid_argument);
}

TEST_CASE("cf types") {
    CHECK(render(cf_type(5, p2r2())) == "MZM");
    CHECK(render(cf_type(3, p2r2())) == "MM");
    auto a24 = Alphabet::multiset(2, 4);
    CHECK(render(cf_type(8, a24)) == "M1 M0 M0 M0");
    CHECK_THROWS_AS(cf_type(3, Alphabet::multiset(3, 2)), std::invalid_argument);
}

TEST_CASE("sigma") {
    CHECK(sigma(parse_type("MO", p2r2())) == 4);
    CHECK(sigma(Type{p2r2(), {}}) == 0);
    CHECK(sigma(cf_type(13, p2r2())) == 13);
}

TEST_CASE("type render round-trips") {
    auto a = Alphabet::multiset(2, 3);
    std::mt19937 rng(7);
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<Nat> x{rng() % 64, rng() % 64, rng() % 64};
        Type t = type_of(x, a);
        CHECK(parse_type(render(t), a).word == t.word);
    }
    auto d = Alphabet::digit_sum(5, 4);
    Type t = digit_type(137, d);
    CHECK(parse_type(render(t), d).word == t.word);
}

TEST_CASE("enumerate_vectors matches the orbit-product count law") {
    auto a = p2r2();
    auto vecs = enumerate_vectors(parse_type("MM", a));
    std::set<std::pair<Nat, Nat>> got;
    for (const auto& v : vecs) got.insert({v[0], v[1]});
    CHECK(got == std::set<std::pair<Nat, Nat>>{{3, 0}, {2, 1}, {1, 2}, {0, 3}});

    CHECK(enumerate_vectors(parse_type("O", a)) ==
          std::vector<std::vector<Nat>>{{1, 1}});

    auto a23 = Alphabet::multiset(2, 3);
    auto unit = enumerate_vectors(cf_type(1, a23));
    CHECK(unit.size() == 3);

    std::mt19937 rng(11);
    for (int iter = 0; iter < 40; ++iter) {
        Nat n = rng() % 64 + 1;
        for (const auto& t : enumerate_types(n, a)) {
            Nat expect = 1;
            for (u32 l : t.word) expect *= t.alphabet->orbit_size(l);
            CHECK(Nat(enumerate_vectors(t).size()) == expect);
        }
    }
}

TEST_CASE("enumerate_types partitions the compositions of n") {
    auto check_alphabet = [](const AlphabetRef& a, u32 n_max) {
        for (Nat n = 0; n <= n_max; ++n) {
            auto types = enumerate_types(n, a);
            std::set<std::vector<Nat>> all;
            Nat total = 0;
            for (const auto& t : types) {
                CHECK(sigma(t) == n);
                if (!t.word.empty()) CHECK(!t.alphabet->is_zero_letter(t.word.front()));
                for (const auto& v : enumerate_vectors(t)) {
                    CHECK(all.insert(v).second);  // disjointness
                    CHECK(type_of(v, a).word == t.word);
                    ++total;
                }
            }
            // compositions of n into r parts
            u64 r = a->r();
            Nat expect = numth::multinomial(Nat(n) + r - 1, {Nat(n), Nat(r - 1)});
            CHECK(total == expect);
        }
    };
    check_alphabet(p2r2(), 64);
    check_alphabet(Alphabet::multiset(2, 3), 64);
    check_alphabet(Alphabet::digit_sum(3, 2), 30);
}

TEST_CASE("enumerate_types examples") {
    auto a = p2r2();
    auto t2 = enumerate_types(2, a);
    std::set<std::string> names;
    for (const auto& t : t2) names.insert(render(t));
    CHECK(names == std::set<std::string>{"MZ", "O"});

    CHECK(enumerate_types(1, a).size() == 1);
    CHECK(render(enumerate_types(1, a)[0]) == "M");

    // every pair x+y=3 has type MM; the only type of sigma 3
    auto t3 = enumerate_types(3, a);
    REQUIRE(t3.size() == 1);
    CHECK(render(t3[0]) == "MM");
}

TEST_CASE("sigma of type_of recovers the component sum") {
    std::mt19937 rng(2024);
    auto a = Alphabet::multiset(3, 3);
    for (int iter = 0; iter < 10'000; ++iter) {
        std::vector<Nat> x{rng() % 1000, rng() % 1000, rng() % 1000};
        CHECK(sigma(type_of(x, a)) == x[0] + x[1] + x[2]);
    }
}

TEST_CASE("sum_direct examples") {
    auto a = p2r2();
    Polynomial one = Polynomial::constant(2, 1);

    // S^(-1)_{cf(3)}(1) = 8/3: the odd binomials in row 3 sum to 8 = 2^3
    auto r1 = abacus::sum_direct(ExponentVector{-1}, cf_type(3, a), one, 10);
    REQUIRE(r1.valuation.has_value());
    CHECK(*r1.valuation == 3);

    // empty exponent vector over type O: the single vector (1,1), F = 1
    auto r2 = abacus::sum_direct(ExponentVector{}, parse_type("O", a), one, 5);
    CHECK(r2.residue == 1);

    // e = (-4, 1) over cf(1): S = 2, nu = 1 = alpha_M
    auto r3 = abacus::sum_direct(ExponentVector{-4, 1}, cf_type(1, a), one, 10);
    REQUIRE(r3.valuation.has_value());
    CHECK(*r3.valuation == 1);
}

TEST_CASE("sum_direct certifies valuations against exact rationals") {
    // S^(-1)_{cf(5)}(1) = (sum of odd binomials in row 5) / Theta_2(5!)
    // = 12/15, nu_2 = 2
    auto r = abacus::sum_direct(ExponentVector{-1}, cf_type(5, p2r2()),
                                Polynomial::constant(2, 1), 12);
    REQUIRE(r.valuation.has_value());
    CHECK(*r.valuation == 2);
}

TEST_CASE("exponent reduction precision: e and e mod 2^i agree mod 2^{i+2}") {
    auto a = p2r2();
    Polynomial one = Polynomial::constant(2, 1);
    for (u32 i = 1; i <= 4; ++i) {
        ExponentVector full{-1};
        ExponentVector reduced{static_cast<i64>((u64(1) << i) - 1)};  // -1 mod 2^i
        for (Nat n : {Nat(3), Nat(5), Nat(11)}) {
            for (const auto& t : enumerate_types(n, a)) {
                auto lhs = abacus::sum_direct(full, t, one, i + 2);
                auto rhs = abacus::sum_direct(reduced, t, one, i + 2);
                CHECK(lhs.residue == rhs.residue);
            }
        }
    }
}

TEST_CASE("resource limits") {
    auto a = Alphabet::multiset(2, 3);
    Type t = cf_type(255, a);  // 3^8 vectors
    CHECK_THROWS_AS(enumerate_vectors(t, 10), resource_error);
}

TEST_CASE("precision too small reports an undetermined valuation") {
    // S^(-1)_{cf(3)}(1) = 8/3 has nu_2 = 3; mod 2^2 the residue vanishes
    auto r = abacus::sum_direct(ExponentVector{-1}, cf_type(3, p2r2()),
                                Polynomial::constant(2, 1), 2);
    CHECK(r.residue == 0);
    CHECK(!r.valuation.has_value());
}
