#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qwreath/snplus.hpp"

using namespace qwreath;

namespace {

SnPlusElement u(int N, int i, int j) { return SnPlusElement::generator(N, i, j); }

SnPlusElement random_element(int N, std::mt19937_64& rng, int max_terms, int max_len) {
    SnPlusElement x(N);
    std::uniform_int_distribution<int> idx(1, N), len(0, max_len), num(-3, 3), den(1, 4);
    int terms = 1 + int(rng() % max_terms);
    for (int t = 0; t < terms; ++t) {
        UWord w;
        int L = len(rng);
        for (int s = 0; s < L; ++s) w.push_back({idx(rng), idx(rng)});
        Rational c(num(rng), den(rng));
        c.canonicalize();
        if (c == 0) c = 1;
        x.add_term(w, c);
    }
    return x;
}

}  // namespace

TEST_CASE("local monomial reductions") {
    auto x = u(4, 1, 1) * u(4, 1, 1);
    CHECK(x == u(4, 1, 1));                 // projection
    CHECK((u(4, 1, 1) * u(4, 1, 2)).is_zero());  // same row
    CHECK((u(4, 1, 1) * u(4, 2, 1)).is_zero());  // same column
    auto y = u(4, 1, 1) * u(4, 2, 2);
    CHECK(y.terms().size() == 1);
    CHECK(y.terms().begin()->first.size() == 2);
}

TEST_CASE("star is involutive and antimultiplicative on samples") {
    std::mt19937_64 rng(12345);
    for (int t = 0; t < 50; ++t) {
        auto x = random_element(4, rng, 3, 3);
        auto y = random_element(4, rng, 3, 3);
        CHECK(x.star().star() == x);
        CHECK((x * y).star() == y.star() * x.star());
    }
}

TEST_CASE("haar of elements is linear and unital") {
    CHECK(haar(SnPlusElement::unit(4)) == 1);
    auto x = u(4, 1, 1) * rat(1, 2) + u(4, 2, 2) * rat(1, 2);
    CHECK(haar(x) == rat(1, 4));
}

TEST_CASE("row conditional expectation") {
    int N = 4;
    SECTION("unital") {
        auto e = cond_expect_row(1, SnPlusElement::unit(N));
        SnPlusElement want(N);
        for (int j = 1; j <= N; ++j) want.add_term({ULetter{1, j}}, 1);
        CHECK(e == want);
    }
    SECTION("identity on the row algebra") {
        CHECK(cond_expect_row(1, u(N, 1, 1)) == u(N, 1, 1));
        auto p = u(N, 1, 2) + u(N, 1, 4);
        CHECK(cond_expect_row(1, p) == p);
    }
    SECTION("off-row projection: E_1(u22) = (1 - u12)/3") {
        auto e = cond_expect_row(1, u(N, 2, 2));
        SnPlusElement want(N);
        want.add_term({ULetter{1, 1}}, rat(1, 3));
        want.add_term({ULetter{1, 3}}, rat(1, 3));
        want.add_term({ULetter{1, 4}}, rat(1, 3));
        CHECK(e == want);
    }
    SECTION("idempotent and haar-preserving on samples") {
        std::mt19937_64 rng(777);
        for (int t = 0; t < 25; ++t) {
            auto x = random_element(N, rng, 2, 3);
            auto e = cond_expect_row(2, x);
            CHECK(cond_expect_row(2, e) == e);
            CHECK(haar(e) == haar(x));
        }
    }
    SECTION("L_i bimodule map on samples") {
        std::mt19937_64 rng(778);
        for (int t = 0; t < 15; ++t) {
            auto x = random_element(N, rng, 2, 2);
            auto a = u(N, 1, 1) + u(N, 1, 3) * rat(2);
            auto b = u(N, 1, 2) * rat(1, 2);
            CHECK(cond_expect_row(1, a * x * b) == a * cond_expect_row(1, x) * b);
        }
    }
    CHECK_THROWS_AS(cond_expect_row(0, SnPlusElement::unit(4)), error);
}

TEST_CASE("haar is positive on x*x samples") {
    for (int N : {3, 4}) {
        std::mt19937_64 rng(999 + N);
        int max_len = (N <= 3) ? 4 : 3;
        for (int t = 0; t < 40; ++t) {
            auto x = random_element(N, rng, 3, max_len);
            CHECK(haar(x.star() * x) >= 0);
        }
    }
}

TEST_CASE("printing is canonical") {
    auto x = u(4, 2, 2) * rat(-1, 2) + SnPlusElement::unit(4) * rat(1, 3);
    CHECK(x.str() == "1/3 - 1/2*u(2,2)");
    CHECK(SnPlusElement(4).str() == "0");
}
