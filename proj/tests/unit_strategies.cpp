#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "belleff/strategies.hpp"
#include "test_support.hpp"

using namespace belleff;
using testsupport::brute_force_max;
using testsupport::random_functional;
using testsupport::xor_dist;

TEST_CASE("strategy counts at the 2x2x2x2 shape") {
    StrategyShape s{2, 2, 2, 2};
    REQUIRE(strategy_count(StrategyClass::no_abort, s) == 16);
    REQUIRE(strategy_count(StrategyClass::alice_abort, s) == 36);
    REQUIRE(strategy_count(StrategyClass::both_abort, s) == 81);
    StrategyShape t{3, 2, 2, 3};
    REQUIRE(strategy_count(StrategyClass::no_abort, t) == 8 * 9);
    REQUIRE(strategy_count(StrategyClass::alice_abort, t) == 27 * 9);
    REQUIRE(strategy_count(StrategyClass::both_abort, t) == 27 * 16);
}

TEST_CASE("enumeration yields each strategy exactly once, conforming") {
    StrategyShape shape{2, 2, 2, 2};
    for (StrategyClass cls :
         {StrategyClass::no_abort, StrategyClass::alice_abort, StrategyClass::both_abort}) {
        std::set<DetStrategy> seen;
        enumerate(cls, shape, 1'000'000, [&](const DetStrategy& s) {
            require_conforming(s, shape);
            REQUIRE(s.cls == cls);
            REQUIRE(seen.insert(s).second);
        });
        REQUIRE(Int(static_cast<long long>(seen.size())) == strategy_count(cls, shape));
    }
}

TEST_CASE("enumeration respects the cap") {
    StrategyShape shape{4, 4, 4, 4};
    // both_abort has 5^4 * 5^4 = 390625 members
    REQUIRE_THROWS_AS(
        enumerate(StrategyClass::both_abort, shape, 1000, [](const DetStrategy&) {}),
        too_large_error);
    try {
        enumerate(StrategyClass::both_abort, shape, 1000, [](const DetStrategy&) {});
    } catch (const too_large_error& e) {
        REQUIRE(std::string(e.what()).find("390625") != std::string::npos);
        REQUIRE(std::string(e.what()).find("--colgen") != std::string::npos);
    }
}

TEST_CASE("evaluate and strategy_value fixtures") {
    DetStrategy s;
    s.alice = {0, kAbort};
    s.bob = {1, 0};
    s.cls = StrategyClass::both_abort;
    REQUIRE(evaluate(s, 0, 0, 0, 1) == 1);
    REQUIRE(evaluate(s, 0, 0, 0, 0) == 0);
    REQUIRE(evaluate(s, 1, 0, 0, 1) == 0); // aborted x=1 never matches

    // functional with a single entry hit by (x,y)=(0,1)
    BellFunctional f = zero_functional(2, 2, 2, 2);
    set_coeff(f, 0, 1, 0, 0, Rat(5));
    REQUIRE(strategy_value(f, s) == 5);
    set_coeff(f, 1, 0, 1, 1, Rat(7)); // alice aborts x=1: not collected
    REQUIRE(strategy_value(f, s) == 5);
    set_coeff(f, 0, 0, 0, 1, make_rat(-1, 3));
    REQUIRE(strategy_value(f, s) == 5 - make_rat(1, 3));
}

TEST_CASE("class name round trip") {
    for (StrategyClass cls :
         {StrategyClass::no_abort, StrategyClass::alice_abort, StrategyClass::both_abort})
        REQUIRE(strategy_class_from_name(strategy_class_name(cls)) == cls);
    REQUIRE_THROWS_AS(strategy_class_from_name("bothabort"), input_error);
}

TEST_CASE("max_bell_value fixtures") {
    SECTION("zero functional") {
        BellFunctional f = zero_functional(2, 2, 2, 2);
        for (StrategyClass cls :
             {StrategyClass::no_abort, StrategyClass::alice_abort, StrategyClass::both_abort}) {
            BellMax m = max_bell_value(f, cls);
            REQUIRE(m.value == 0);
            require_conforming(m.witness, StrategyShape{2, 2, 2, 2});
        }
    }
    SECTION("single positive entry") {
        BellFunctional f = zero_functional(2, 3, 2, 2);
        set_coeff(f, 1, 2, 0, 1, Rat(5));
        BellMax m = max_bell_value(f, StrategyClass::both_abort);
        REQUIRE(m.value == 5);
        REQUIRE(m.witness.alice[1] == 0);
        REQUIRE(m.witness.bob[2] == 1);
        REQUIRE(strategy_value(f, m.witness) == 5);
    }
    SECTION("chsh achieves 1 over every class") {
        BellFunctional f = chsh_half();
        for (StrategyClass cls :
             {StrategyClass::no_abort, StrategyClass::alice_abort, StrategyClass::both_abort}) {
            BellMax m = max_bell_value(f, cls);
            REQUIRE(m.value == 1);
            REQUIRE(strategy_value(f, m.witness) == 1);
        }
    }
    SECTION("strictly negative functional: abort wins where allowed") {
        BellFunctional f = zero_functional(2, 2, 2, 2);
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) set_coeff(f, x, y, a, b, Rat(-1));
        REQUIRE(max_bell_value(f, StrategyClass::no_abort).value == -4);
        BellMax m = max_bell_value(f, StrategyClass::both_abort);
        REQUIRE(m.value == 0);
        REQUIRE(strategy_value(f, m.witness) == 0);
    }
}

TEST_CASE("max_bell_value matches the brute-force oracle") {
    std::mt19937 gen(20250819);
    const std::vector<std::array<int, 4>> shapes = {{2, 2, 2, 2}, {3, 2, 2, 3}, {2, 3, 3, 2}};
    for (const auto& sh : shapes) {
        for (int trial = 0; trial < 8; ++trial) {
            BellFunctional f = random_functional(gen, sh[0], sh[1], sh[2], sh[3]);
            for (StrategyClass cls :
                 {StrategyClass::no_abort, StrategyClass::alice_abort,
                  StrategyClass::both_abort}) {
                BellMax m = max_bell_value(f, cls);
                REQUIRE(m.value == brute_force_max(f, cls));
                require_conforming(m.witness, StrategyShape{sh[0], sh[1], sh[2], sh[3]});
                REQUIRE(strategy_value(f, m.witness) == m.value);
            }
        }
    }
}

TEST_CASE("class maxima are monotone and agree for nonnegative functionals") {
    std::mt19937 gen(99);
    for (int trial = 0; trial < 10; ++trial) {
        BellFunctional f = random_functional(gen, 2, 2, 2, 2);
        const Rat no = max_bell_value(f, StrategyClass::no_abort).value;
        const Rat al = max_bell_value(f, StrategyClass::alice_abort).value;
        const Rat bo = max_bell_value(f, StrategyClass::both_abort).value;
        REQUIRE(no <= al);
        REQUIRE(al <= bo);

        BellFunctional g = random_functional(gen, 2, 2, 2, 2, 0, 4);
        REQUIRE(max_bell_value(g, StrategyClass::no_abort).value ==
                max_bell_value(g, StrategyClass::both_abort).value);
    }
}

TEST_CASE("min_bell_value is -max of the negation") {
    std::mt19937 gen(3);
    BellFunctional f = random_functional(gen, 2, 2, 2, 2);
    BellMax mn = min_bell_value(f, StrategyClass::no_abort);
    REQUIRE(mn.value == -max_bell_value(negate(f), StrategyClass::no_abort).value);
    REQUIRE(strategy_value(f, mn.witness) == mn.value);
    // with aborts, min is never above 0 (the all-abort strategy collects 0)
    REQUIRE(min_bell_value(f, StrategyClass::both_abort).value <= 0);
}

TEST_CASE("max_bell_value respects its evaluation cap") {
    BellFunctional f = zero_functional(8, 8, 8, 8);
    REQUIRE_THROWS_AS(max_bell_value(f, StrategyClass::both_abort, 1000), too_large_error);
}

TEST_CASE("offset representation agrees with the dense one") {
    std::mt19937 gen(41);
    BellFunctional dense = random_functional(gen, 2, 2, 2, 2);
    // same functional via offset + corrections
    BellFunctional off = zero_functional(2, 2, 2, 2);
    off.offsets[0] = make_rat(1, 3);
    off.offsets[3] = Rat(-2);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) set_coeff(off, x, y, a, b, dense.coeff(x, y, a, b));
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    REQUIRE(off.coeff(x, y, a, b) == dense.coeff(x, y, a, b));
    for (StrategyClass cls :
         {StrategyClass::no_abort, StrategyClass::alice_abort, StrategyClass::both_abort})
        REQUIRE(max_bell_value(off, cls).value == max_bell_value(dense, cls).value);
}

TEST_CASE("bell_value fixtures") {
    BellFunctional f = chsh_half();
    SECTION("pr box scores 2") { REQUIRE(bell_value(f, pr_box()) == 2); }
    SECTION("xor distribution scores -1") {
        // independent direct summation
        Dist p = xor_dist();
        Rat direct = 0;
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        direct += f.coeff(x, y, a, b) * p.prob(x, y, a, b);
        REQUIRE(direct == -1);
        REQUIRE(bell_value(f, p) == -1);
    }
    SECTION("zero functional scores 0 on anything") {
        std::mt19937 gen(5);
        REQUIRE(bell_value(zero_functional(2, 2, 2, 2), testsupport::random_dist(gen, 2, 2, 2, 2)) ==
                0);
    }
    SECTION("pure-offset functional scores the offset sum") {
        std::mt19937 gen(6);
        BellFunctional g = zero_functional(2, 2, 2, 2);
        g.offsets = {make_rat(1, 2), Rat(-1), Rat(3), make_rat(-1, 7)};
        const Rat want = make_rat(1, 2) - 1 + 3 - make_rat(1, 7);
        REQUIRE(bell_value(g, testsupport::random_dist(gen, 2, 2, 2, 2)) == want);
    }
    SECTION("shape mismatch throws") {
        REQUIRE_THROWS_AS(bell_value(f, uniform_dist(2, 3, 2, 2)), input_error);
    }
    SECTION("negate and scale") {
        Dist p = pr_box();
        REQUIRE(bell_value(negate(f), p) == -2);
        REQUIRE(bell_value(scale_functional(f, make_rat(3, 4)), p) == make_rat(3, 2));
    }
}

TEST_CASE("max_bell_value enumerates the smaller side") {
    // nx=1 vs ny=6: alice has 3 maps, bob has 2^6; term count must reflect alice
    BellFunctional f = zero_functional(1, 6, 2, 2);
    BellMax m = max_bell_value(f, StrategyClass::both_abort);
    // alice maps = (2+1)^1 = 3, terms = 3 * ny * (nb+1) * nx = 3*6*3*1 = 54
    REQUIRE(m.evaluated_terms == 54);
}
