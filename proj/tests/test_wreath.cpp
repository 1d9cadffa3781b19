#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qwreath/wreath.hpp"

using namespace qwreath;

namespace {

struct Setup {
    WreathAlgebra alg;
    GroupElement a;  // generator of the group
    Setup(int N, GroupSpecPtr spec, Subgroup lam = Subgroup::trivial())
        : alg(N, spec, std::move(lam)), a(spec->generator(0)) {}
};

WreathElement random_word(const WreathAlgebra& alg, std::mt19937_64& rng, int max_nu, int max_sep) {
    const auto& spec = alg.group();
    int n = int(rng() % (max_nu + 1));
    auto rand_u = [&](int count) {
        WreathElement s = alg.one();
        for (int t = 0; t < count; ++t)
            s = s * alg.u(1 + int(rng() % alg.n()), 1 + int(rng() % alg.n()));
        return s;
    };
    auto rand_g = [&] {
        RawWord w{{int(rng() % spec->num_generators()), (long long)(rng() % 5) - 2}};
        return spec->normalize(w);
    };
    WreathElement x = rand_u(int(rng() % (max_sep + 1)));
    for (int t = 0; t < n; ++t) {
        x = x * alg.nu(1 + int(rng() % alg.n()), rand_g());
        x = x * rand_u(int(rng() % (max_sep + 1)));
    }
    return x;
}

WreathElement random_element(const WreathAlgebra& alg, std::mt19937_64& rng, int terms, int max_nu,
                             int max_sep) {
    WreathElement x(&alg);
    for (int t = 0; t < terms; ++t) {
        Rational c(long(rng() % 5) - 2, long(rng() % 3) + 1);
        c.canonicalize();
        if (c == 0) c = 1;
        x = x + random_word(alg, rng, max_nu, max_sep) * c;
    }
    return x;
}

WreathElement from_snplus(const WreathAlgebra& alg, const SnPlusElement& s) {
    WreathElement x(&alg);
    for (const auto& [w, c] : s.terms()) {
        WreathMonomial m;
        m.h0 = alg.group()->identity();
        m.seps = {w};
        x.add_term(m, c);
    }
    return x;
}

// a reduced word: group letters outside the subgroup, separators at
// equal-index adjacencies projected off the row algebra
WreathElement random_reduced_word(const WreathAlgebra& alg, std::mt19937_64& rng, int nu_count) {
    const auto& spec = alg.group();
    auto rand_g = [&]() -> GroupElement {
        for (int tries = 0; tries < 128; ++tries) {
            RawWord w{{int(rng() % spec->num_generators()), (long long)(rng() % 5) - 2}};
            auto g = spec->normalize(w);
            if (!alg.lambda().contains(*spec, g)) return g;
        }
        throw error("could not sample a non-subgroup element");
    };
    WreathElement x = alg.nu(1 + int(rng() % alg.n()), rand_g());
    int last = x.terms().begin()->first.letters.back().index;
    for (int t = 1; t < nu_count; ++t) {
        int idx = 1 + int(rng() % alg.n());
        SnPlusElement sep = SnPlusElement::unit(alg.n());
        int len = int(rng() % 3);
        for (int s = 0; s < len; ++s)
            sep = sep * SnPlusElement::generator(alg.n(), 1 + int(rng() % alg.n()),
                                                 1 + int(rng() % alg.n()));
        if (idx == last) {
            SnPlusElement cleared = sep - cond_expect_row(idx, sep);
            if (cleared.is_zero()) {
                idx = (idx % alg.n()) + 1;  // change copies instead
                x = x * from_snplus(alg, sep) * alg.nu(idx, rand_g());
            } else {
                x = x * from_snplus(alg, cleared) * alg.nu(idx, rand_g());
            }
        } else {
            x = x * from_snplus(alg, sep) * alg.nu(idx, rand_g());
        }
        last = idx;
    }
    return x;
}

}  // namespace

TEST_CASE("wreath normal form applies the defining relations") {
    Setup s(4, GroupSpec::cyclic(3));
    auto g = s.a;

    SECTION("nu_i(g) commutes with row-i entries") {
        auto lhs = s.alg.nu(1, g) * s.alg.u(1, 2);
        auto rhs = s.alg.u(1, 2) * s.alg.nu(1, g);
        CHECK(lhs == rhs);
        CHECK((lhs - rhs).is_zero());
        // different row: no relation
        CHECK_FALSE(s.alg.nu(1, g) * s.alg.u(2, 2) == s.alg.u(2, 2) * s.alg.nu(1, g));
    }
    SECTION("copies multiply") {
        auto p = s.alg.nu(1, g) * s.alg.nu(1, s.alg.group()->inverse(g));
        CHECK(p == s.alg.one());
    }
    SECTION("nu of the identity is the unit") {
        CHECK(s.alg.nu(2, s.alg.group()->identity()) == s.alg.one());
    }
    SECTION("star reverses") {
        auto x = s.alg.nu(1, g) * s.alg.u(2, 3);
        auto want = s.alg.u(2, 3) * s.alg.nu(1, s.alg.group()->inverse(g));
        CHECK(x.star() == want);
        CHECK(x.star().star() == x);
    }
}

TEST_CASE("subgroup content sweeps to the central factor") {
    auto c6 = GroupSpec::cyclic(6);
    Setup s(3, c6, Subgroup::cyclic(c6, c6->power(c6->generator(0), 3)));
    auto a = s.a;
    // nu(a^3) is central: same element wherever it is inserted
    auto x = s.alg.nu(1, c6->power(a, 3)) * s.alg.nu(2, a);
    auto y = s.alg.nu(2, a) * s.alg.nu(1, c6->power(a, 3));
    CHECK(x == y);
    CHECK(x == s.alg.nu(2, c6->power(a, 4)));
    CHECK(s.alg.haar(x * x.star()) == 1);
}

TEST_CASE("haar evaluator on worked examples") {
    SECTION("magic unitary entries") {
        for (int N : {2, 3, 4, 5}) {
            WreathAlgebra alg(N, GroupSpec::cyclic(3));
            CHECK(alg.haar(alg.u(1, 1)) == rat(1, N));
            CHECK(alg.haar(alg.one()) == 1);
        }
    }
    SECTION("reduced word vanishes") {
        Setup s(4, GroupSpec::cyclic(3));
        auto x = s.alg.nu(1, s.a) * s.alg.u(1, 2) * s.alg.nu(2, s.alg.group()->inverse(s.a));
        CHECK(s.alg.haar(x) == 0);
    }
    SECTION("splitting recursion: nu_1(g) u22 nu_1(g^-1) at N=4") {
        Setup s(4, GroupSpec::cyclic(3));
        auto x = s.alg.nu(1, s.a) * s.alg.u(2, 2) * s.alg.nu(1, s.alg.group()->inverse(s.a));
        CHECK(s.alg.haar(x) == rat(1, 4));
        auto b = s.alg.expect_onto_base(x);
        REQUIRE(b.parts.size() == 1);
        const auto& [h, part] = *b.parts.begin();
        CHECK(s.alg.group()->is_identity(h));
        SnPlusElement want(4);
        want.add_term({ULetter{1, 1}}, rat(1, 3));
        want.add_term({ULetter{1, 3}}, rat(1, 3));
        want.add_term({ULetter{1, 4}}, rat(1, 3));
        CHECK(part == want);
    }
    SECTION("base expectation kills reduced words and fixes base words") {
        Setup s(4, GroupSpec::cyclic(3));
        auto red = s.alg.nu(1, s.a) * s.alg.u(1, 2) * s.alg.nu(2, s.alg.group()->inverse(s.a));
        CHECK(s.alg.expect_onto_base(red).is_zero());
        auto base = s.alg.u(1, 2) * s.alg.u(3, 3);
        auto e = s.alg.expect_onto_base(base);
        REQUIRE(e.parts.size() == 1);
        CHECK(e.parts.begin()->second ==
              SnPlusElement::generator(4, 1, 2) * SnPlusElement::generator(4, 3, 3));
    }
}

TEST_CASE("haar properties on random elements") {
    std::mt19937_64 rng(4242);
    auto c3 = GroupSpec::cyclic(3);
    Setup s(4, c3);

    SECTION("state normalization and conjugation symmetry") {
        CHECK(s.alg.haar(s.alg.one()) == 1);
        for (int t = 0; t < 30; ++t) {
            auto x = random_element(s.alg, rng, 2, 2, 2);
            CHECK(s.alg.haar(x.star()) == s.alg.haar(x));
        }
    }
    SECTION("traciality") {
        for (int t = 0; t < 30; ++t) {
            auto x = random_element(s.alg, rng, 2, 2, 1);
            auto y = random_element(s.alg, rng, 2, 2, 1);
            CHECK(s.alg.haar(x * y) == s.alg.haar(y * x));
        }
    }
    SECTION("positivity") {
        for (int t = 0; t < 30; ++t) {
            auto x = random_element(s.alg, rng, 2, 2, 1);
            CHECK(s.alg.haar(x.star() * x) >= 0);
        }
    }
    SECTION("base factorization") {
        for (int t = 0; t < 30; ++t) {
            auto x = random_element(s.alg, rng, 2, 2, 2);
            CHECK(s.alg.haar(x) == s.alg.base_haar(s.alg.expect_onto_base(x)));
        }
    }
}

TEST_CASE("random reduced words evaluate to zero") {
    std::mt19937_64 rng(777);
    for (int N : {2, 3, 4}) {
        for (auto spec : {GroupSpec::cyclic(2), GroupSpec::cyclic(3), GroupSpec::free_group(2)}) {
            WreathAlgebra alg(N, spec);
            for (int t = 0; t < 25; ++t) {
                auto x = random_reduced_word(alg, rng, 1 + int(rng() % 4));
                CHECK(alg.haar(x) == 0);
            }
        }
    }
    auto c6 = GroupSpec::cyclic(6);
    WreathAlgebra alg(3, c6, Subgroup::cyclic(c6, c6->power(c6->generator(0), 3)));
    for (int t = 0; t < 25; ++t) {
        auto x = random_reduced_word(alg, rng, 1 + int(rng() % 4));
        CHECK(alg.haar(x) == 0);
    }
}

TEST_CASE("N=2 semidirect oracle") {
    std::mt19937_64 rng(31415);
    SECTION("anchors") {
        WreathAlgebra alg(2, GroupSpec::cyclic(2));
        CHECK(alg.haar_semidirect_n2(alg.u(1, 1)) == rat(1, 2));
        auto g = alg.group()->generator(0);
        CHECK(alg.haar_semidirect_n2(alg.nu(1, g) * alg.nu(2, g)) == 0);
        // nu_1(g) u12 nu_1(g): the group part cancels, chi_12 has trace 1/2
        auto x = alg.nu(1, g) * alg.u(1, 2) * alg.nu(1, g);
        CHECK(alg.haar_semidirect_n2(x) == rat(1, 2));
        CHECK(alg.haar(x) == rat(1, 2));
    }
    SECTION("agreement with the haar evaluator") {
        std::vector<std::pair<GroupSpecPtr, Subgroup>> cases;
        cases.push_back({GroupSpec::cyclic(2), Subgroup::trivial()});
        cases.push_back({GroupSpec::cyclic(6), Subgroup::trivial()});
        auto c6 = GroupSpec::cyclic(6);
        cases.push_back({c6, Subgroup::cyclic(c6, c6->power(c6->generator(0), 3))});
        cases.push_back({GroupSpec::free_group(1), Subgroup::trivial()});
        for (auto& [spec, lam] : cases) {
            WreathAlgebra alg(2, spec, lam);
            int nonzero = 0;
            for (int t = 0; t < 60; ++t) {
                auto x = random_word(alg, rng, 4, 2);
                auto h = alg.haar(x);
                CHECK(h == alg.haar_semidirect_n2(x));
                if (h != 0) ++nonzero;
            }
            CHECK(nonzero > 0);
        }
    }
}

TEST_CASE("pure nu-words match the free product group haar") {
    // words on nu indices {1,2} inside N=4: haar only sees the doubled group
    auto c6 = GroupSpec::cyclic(6);
    auto lam = Subgroup::cyclic(c6, c6->power(c6->generator(0), 3));
    WreathAlgebra alg(4, c6, lam);
    auto dbl = GroupSpec::amalgam(c6, c6, 2, c6->power(c6->generator(0), 3),
                                  c6->power(c6->generator(0), 3));
    std::mt19937_64 rng(555);
    for (int t = 0; t < 120; ++t) {
        int n = 1 + int(rng() % 4);
        WreathElement x = alg.one();
        GroupElement w = dbl->identity();
        for (int s = 0; s < n; ++s) {
            int idx = 1 + int(rng() % 2);
            auto g = c6->power(c6->generator(0), rng() % 6);
            x = x * alg.nu(idx, g);
            w = dbl->multiply(w, dbl->embed(idx - 1, g));
        }
        Rational want = dbl->is_identity(w) ? 1 : 0;
        CHECK(alg.haar(x) == want);
    }
}

TEST_CASE("multiplication is associative on samples") {
    std::mt19937_64 rng(9090);
    auto c6 = GroupSpec::cyclic(6);
    for (auto lam : {Subgroup::trivial(), Subgroup::cyclic(c6, c6->power(c6->generator(0), 3))}) {
        WreathAlgebra alg(3, c6, lam);
        for (int t = 0; t < 40; ++t) {
            auto x = random_word(alg, rng, 1, 1);
            auto y = random_word(alg, rng, 1, 1);
            auto z = random_word(alg, rng, 1, 1);
            CHECK((x * y) * z == x * (y * z));
        }
    }
}

TEST_CASE("k0 generator traces") {
    CHECK(k0_generator_trace(8, 2, K0Generator::Unit) == 1);
    CHECK(k0_generator_trace(8, 2, K0Generator::UEntry, 3, 0, 5) == rat(1, 8));
    CHECK(k0_generator_trace(8, 2, K0Generator::NuDeltaU, 2, 1, 7) == rat(1, 16));
    CHECK(k0_generator_trace(4, 3, K0Generator::NuDeltaU, 1, 2, 1) == rat(1, 12));
    CHECK_THROWS_AS(k0_generator_trace(4, 2, K0Generator::NuDeltaU, 1, 5, 1), error);
}

TEST_CASE("resource bounds reject oversized words") {
    Setup s(4, GroupSpec::cyclic(3));
    auto grow = [&] {
        WreathElement x = s.alg.one();
        for (int t = 0; t < 20; ++t) x = x * s.alg.u(1, 1) * s.alg.u(2, 2);
    };
    CHECK_THROWS_AS(grow(), error);
}
