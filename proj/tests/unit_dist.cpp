#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "belleff/dist.hpp"
#include "belleff/quantum.hpp"
#include "test_support.hpp"

using namespace belleff;
using testsupport::xor_dist;

TEST_CASE("boolean-function distributions have the forced support") {
    // f = XOR: p(a,b|x,y) = 1/2 iff a^b = x^y
    Dist p = xor_dist();
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const Rat want = (a ^ b) == (x ^ y) ? make_rat(1, 2) : Rat(0);
                    REQUIRE(p.prob(x, y, a, b) == want);
                }
    // f = 0: equal outputs
    Dist q = from_boolean_function({0, 0, 0, 0}, 2, 2);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    REQUIRE(q.prob(x, y, a, b) == (a == b ? make_rat(1, 2) : Rat(0)));
}

TEST_CASE("boolean-function distributions have uniform marginals") {
    Dist p = from_boolean_function({1, 0, 0, 1, 1, 0}, 2, 3);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 3; ++y)
            for (int a = 0; a < 2; ++a) {
                Rat alice = p.prob(x, y, a, 0) + p.prob(x, y, a, 1);
                Rat bob = p.prob(x, y, 0, a) + p.prob(x, y, 1, a);
                REQUIRE(alice == make_rat(1, 2));
                REQUIRE(bob == make_rat(1, 2));
            }
}

TEST_CASE("every boolean function on small grids gives a nonsignaling dist") {
    // exhaustive over all truth tables with nx*ny <= 8
    for (auto [nx, ny] : {std::pair{2, 2}, std::pair{2, 4}, std::pair{4, 2}}) {
        const int cells = nx * ny;
        for (int mask = 0; mask < (1 << cells); ++mask) {
            std::vector<int> truth(static_cast<std::size_t>(cells));
            for (int i = 0; i < cells; ++i) truth[static_cast<std::size_t>(i)] = (mask >> i) & 1;
            REQUIRE(is_nonsignaling(from_boolean_function(truth, nx, ny)));
        }
    }
    // spot checks on the biggest desk-scale grid
    std::mt19937 gen(7);
    std::uniform_int_distribution<int> bit(0, 1);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<int> truth(64);
        for (auto& t : truth) t = bit(gen);
        REQUIRE(is_nonsignaling(from_boolean_function(truth, 8, 8)));
    }
}

TEST_CASE("pr box fixture") {
    Dist p = pr_box();
    REQUIRE(p.prob(0, 0, 0, 0) == make_rat(1, 2));
    REQUIRE(p.prob(1, 1, 0, 1) == make_rat(1, 2));
    REQUIRE(p.prob(1, 1, 0, 0) == 0);
    REQUIRE(is_nonsignaling(p));
    REQUIRE(p.metadata.source == "pr_box");
}

TEST_CASE("construction validates exactly") {
    auto labels2 = default_labels(2);
    SECTION("negative entry") {
        std::vector<SparseBlock> blocks(4);
        for (auto& b : blocks) b = {{0, Rat(2)}, {1, Rat(-1)}};
        REQUIRE_THROWS_AS(make_dist(labels2, labels2, labels2, labels2, blocks), input_error);
    }
    SECTION("wrong sum") {
        std::vector<SparseBlock> blocks(4);
        for (auto& b : blocks) b = {{0, make_rat(1, 2)}};
        REQUIRE_THROWS_AS(make_dist(labels2, labels2, labels2, labels2, blocks), input_error);
    }
    SECTION("duplicate labels") {
        std::vector<SparseBlock> blocks(4);
        for (auto& b : blocks) b = {{0, Rat(1)}};
        REQUIRE_THROWS_AS(
            make_dist({"0", "0"}, labels2, labels2, labels2, blocks), input_error);
    }
    SECTION("wrong block count") {
        std::vector<SparseBlock> blocks(3);
        REQUIRE_THROWS_AS(make_dist(labels2, labels2, labels2, labels2, blocks), input_error);
    }
    SECTION("duplicate keys in a block are merged before validation") {
        std::vector<SparseBlock> blocks(4);
        for (auto& b : blocks) b = {{0, make_rat(1, 2)}, {0, make_rat(1, 2)}};
        Dist d = make_dist(labels2, labels2, labels2, labels2, blocks);
        REQUIRE(d.prob(0, 0, 0, 0) == 1);
    }
}

TEST_CASE("dense constructor matches sparse accessor") {
    std::vector<Rat> dense(16, Rat(0));
    // p(a,b|x,y) = 1 at a=b=0 for every input pair
    for (int xy = 0; xy < 4; ++xy) dense[static_cast<std::size_t>(xy * 4)] = 1;
    Dist d = dist_from_dense(default_labels(2), default_labels(2), default_labels(2),
                             default_labels(2), dense);
    REQUIRE(d.prob(1, 0, 0, 0) == 1);
    REQUIRE(d.prob(1, 0, 1, 1) == 0);
}

TEST_CASE("l1 distance is the max over input pairs") {
    REQUIRE(l1_distance(pr_box(), pr_box()) == 0);
    REQUIRE(l1_distance(pr_box(), xor_dist()) == 2);
    Dist p00 = deterministic_dist({0, 0}, {0, 0}, 2, 2);
    Dist p01 = deterministic_dist({0, 0}, {1, 1}, 2, 2);
    REQUIRE(l1_distance(p00, p01) == 2);
    // differs on one input pair only: max picks that one
    Dist almost = mix_dists({{make_rat(1, 2), pr_box()}, {make_rat(1, 2), pr_box()}});
    REQUIRE(l1_distance(pr_box(), almost) == 0);
}

TEST_CASE("l1 distance rejects mismatched shapes") {
    REQUIRE_THROWS_AS(l1_distance(pr_box(), uniform_dist(2, 2, 3, 2)), input_error);
}

TEST_CASE("signaling is detected") {
    // Alice's output copies Bob's input: a = y, b = 0
    std::vector<Rat> dense(16, Rat(0));
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            const int a = y, b = 0;
            dense[static_cast<std::size_t>(((x * 2 + y) * 2 + a) * 2 + b)] = 1;
        }
    Dist d = dist_from_dense(default_labels(2), default_labels(2), default_labels(2),
                             default_labels(2), dense);
    REQUIRE_FALSE(is_nonsignaling(d));
}

TEST_CASE("mixtures stay normalized and nonsignaling") {
    Dist m = mix_dists({{make_rat(1, 3), pr_box()},
                        {make_rat(1, 3), xor_dist()},
                        {make_rat(1, 3), uniform_dist(2, 2, 2, 2)}});
    REQUIRE(is_nonsignaling(m));
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            Rat sum = 0;
            for (const auto& [k, v] : m.block(x, y)) {
                (void)k;
                sum += v;
            }
            REQUIRE(sum == 1);
        }
    REQUIRE_THROWS_AS(mix_dists({{make_rat(1, 2), pr_box()}}), input_error);
}

TEST_CASE("random test distributions are valid by construction") {
    std::mt19937 gen(99);
    for (int i = 0; i < 10; ++i) {
        Dist d = testsupport::random_dist(gen, 2, 2, 2, 2);
        for (const auto& blk : d.blocks) {
            Rat sum = 0;
            for (const auto& [k, v] : blk) {
                (void)k;
                REQUIRE(v > 0);
                sum += v;
            }
            REQUIRE(sum == 1);
        }
        Dist ns = testsupport::random_nonsignaling(gen);
        REQUIRE(is_nonsignaling(ns));
    }
}

// --- quantum bridge -------------------------------------------------------

namespace {

std::vector<Amplitude> real_vec(std::initializer_list<long double> xs) {
    std::vector<Amplitude> v;
    for (long double x : xs) v.emplace_back(x, 0.0L);
    return v;
}

std::vector<std::vector<Amplitude>> rotated_basis(long double theta) {
    return {real_vec({std::cos(theta), std::sin(theta)}),
            real_vec({-std::sin(theta), std::cos(theta)})};
}

} // namespace

TEST_CASE("quantum: maximally entangled state in computational bases") {
    QuantumSetup s;
    const long double r = std::sqrt(0.5L);
    s.state = real_vec({r, 0.0L, 0.0L, r});
    s.alice_bases = {rotated_basis(0.0L)};
    s.bob_bases = {rotated_basis(0.0L)};
    Dist d = from_quantum(s);
    REQUIRE(d.metadata.approximate);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            REQUIRE(d.prob(0, 0, a, b) == (a == b ? make_rat(1, 2) : Rat(0)));
}

TEST_CASE("quantum: product state gives a point mass") {
    QuantumSetup s;
    s.state = real_vec({1.0L, 0.0L, 0.0L, 0.0L});
    s.alice_bases = {rotated_basis(0.0L)};
    s.bob_bases = {rotated_basis(0.0L)};
    Dist d = from_quantum(s);
    REQUIRE(d.prob(0, 0, 0, 0) == 1);
}

TEST_CASE("quantum: tsirelson-angle bases give the (2 +- sqrt2)/8 pattern") {
    const long double pi = std::acos(-1.0L);
    QuantumSetup s;
    const long double r = std::sqrt(0.5L);
    s.state = real_vec({r, 0.0L, 0.0L, r});
    s.alice_bases = {rotated_basis(0.0L), rotated_basis(pi / 4)};
    s.bob_bases = {rotated_basis(pi / 8), rotated_basis(-pi / 8)};
    s.denominator_limit = 1'000'000'000;
    Dist d = from_quantum(s);

    const long double hi = (2.0L + std::sqrt(2.0L)) / 8.0L;
    const long double lo = (2.0L - std::sqrt(2.0L)) / 8.0L;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            // correlator E = p(00)+p(11)-p(01)-p(10) = ±1/sqrt 2
            long double e = 0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    e += (a == b ? 1.0L : -1.0L) * to_long_double(d.prob(x, y, a, b));
            const long double want = (x == 1 && y == 1) ? -r : r;
            REQUIRE(std::abs(e - want) < 1e-6L);
            Rat sum = 0;
            for (const auto& [k, v] : d.block(x, y)) {
                (void)k;
                sum += v;
            }
            REQUIRE(sum == 1);
        }
    // spot check the two magnitudes at (0,0)
    REQUIRE(std::abs(to_long_double(d.prob(0, 0, 0, 0)) - hi) < 1e-9L);
    REQUIRE(std::abs(to_long_double(d.prob(0, 0, 0, 1)) - lo) < 1e-9L);
}

TEST_CASE("quantum: invalid setups are rejected") {
    QuantumSetup s;
    s.state = real_vec({1.0L, 1.0L, 0.0L, 0.0L}); // not normalized
    s.alice_bases = {rotated_basis(0.0L)};
    s.bob_bases = {rotated_basis(0.0L)};
    REQUIRE_THROWS_AS(from_quantum(s), input_error);

    QuantumSetup t;
    const long double r = std::sqrt(0.5L);
    t.state = real_vec({r, 0.0L, 0.0L, r});
    t.alice_bases = {{real_vec({1.0L, 0.0L}), real_vec({1.0L, 0.0L})}}; // not orthonormal
    t.bob_bases = {rotated_basis(0.0L)};
    REQUIRE_THROWS_AS(from_quantum(t), input_error);
}
