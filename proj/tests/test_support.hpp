#pragma once

// Shared helpers for the test suite: independent brute-force oracles and
// seeded random generators for distributions and functionals. The oracles
// deliberately use the dumbest correct algorithm so they cannot share a bug
// with the library's optimized paths.

#include <random>
#include <vector>

#include "belleff/bell.hpp"
#include "belleff/dist.hpp"
#include "belleff/strategies.hpp"

namespace testsupport {

using namespace belleff;

// Plain loop over every strategy in the class; first achiever kept.
inline Rat brute_force_max(const BellFunctional& f, StrategyClass cls) {
    StrategyShape shape{f.nx, f.ny, f.na, f.nb};
    bool have = false;
    Rat best;
    enumerate(cls, shape, 100'000'000, [&](const DetStrategy& s) {
        Rat v = strategy_value(f, s);
        if (!have || v > best) {
            best = v;
            have = true;
        }
    });
    return best;
}

inline BellFunctional random_functional(std::mt19937& gen, int nx, int ny, int na, int nb,
                                        int lo = -4, int hi = 4) {
    std::uniform_int_distribution<int> num(lo, hi);
    std::uniform_int_distribution<int> den(1, 5);
    std::vector<Rat> dense;
    dense.reserve(static_cast<std::size_t>(nx) * ny * na * nb);
    for (int i = 0; i < nx * ny * na * nb; ++i) dense.push_back(make_rat(num(gen), den(gen)));
    return functional_from_dense(nx, ny, na, nb, dense);
}

// Random distribution with exact per-block normalization: integer weights
// divided by their block sum.
inline Dist random_dist(std::mt19937& gen, int nx, int ny, int na, int nb,
                        int max_weight = 99) {
    std::uniform_int_distribution<int> w(0, max_weight);
    std::vector<SparseBlock> blocks(static_cast<std::size_t>(nx * ny));
    for (auto& blk : blocks) {
        std::vector<int> weights(static_cast<std::size_t>(na * nb));
        long long sum = 0;
        do {
            sum = 0;
            for (auto& v : weights) {
                v = w(gen);
                sum += v;
            }
        } while (sum == 0);
        for (int k = 0; k < na * nb; ++k)
            if (weights[static_cast<std::size_t>(k)] != 0)
                blk.emplace_back(k, make_rat(weights[static_cast<std::size_t>(k)], sum));
    }
    DistMetadata md;
    md.source = "random_test";
    return make_dist(default_labels(nx), default_labels(ny), default_labels(na),
                     default_labels(nb), std::move(blocks), std::move(md));
}

inline Dist xor_dist() { return from_boolean_function({0, 1, 1, 0}, 2, 2, "p_xor"); }

// Random nonsignaling distribution: rational mixture of nonsignaling parts.
inline Dist random_nonsignaling(std::mt19937& gen) {
    std::uniform_int_distribution<int> w(0, 9);
    std::uniform_int_distribution<int> out(0, 1);
    std::vector<std::pair<Rat, Dist>> parts;
    std::vector<Dist> pool = {
        pr_box(), xor_dist(), uniform_dist(2, 2, 2, 2),
        deterministic_dist({out(gen), out(gen)}, {out(gen), out(gen)}, 2, 2)};
    std::vector<int> weights(pool.size());
    long long sum = 0;
    do {
        sum = 0;
        for (auto& v : weights) {
            v = w(gen);
            sum += v;
        }
    } while (sum == 0);
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (weights[i] != 0) parts.emplace_back(make_rat(weights[i], sum), pool[i]);
    if (parts.size() == 1) return parts.front().second;
    return mix_dists(parts);
}

} // namespace testsupport
