#pragma once

// Bell functionals: linear forms B on distribution entries (a,b,x,y).
//
// Same sparse-block layout as Dist, plus one offset per input pair that is
// added to every (a,b) coefficient of that block. The offset makes large
// constructions with a constant per-input shift (the hidden-matching
// functional) cheap to store: only the structured part is materialized.
// Coefficients exist only for real outcomes — an aborted run contributes
// nothing anywhere.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "belleff/dist.hpp"
#include "belleff/errors.hpp"
#include "belleff/rational.hpp"

namespace belleff {

struct BellFunctional {
    int nx = 0, ny = 0, na = 0, nb = 0;
    std::vector<SparseBlock> blocks;  // per (x*ny + y), sparse over a*nb+b
    std::vector<Rat> offsets;         // per (x*ny + y), added to every coefficient

    int block_index(int x, int y) const { return x * ny + y; }

    Rat coeff(int x, int y, int a, int b) const {
        const auto& blk = blocks[static_cast<std::size_t>(block_index(x, y))];
        const int key = a * nb + b;
        auto it = std::lower_bound(blk.begin(), blk.end(), key,
                                   [](const auto& e, int k) { return e.first < k; });
        Rat v = offsets[static_cast<std::size_t>(block_index(x, y))];
        if (it != blk.end() && it->first == key) v += it->second;
        return v;
    }

    bool operator==(const BellFunctional&) const = default;
};

/// Empty (all-zero) functional of the given shape.
inline BellFunctional zero_functional(int nx, int ny, int na, int nb) {
    if (nx <= 0 || ny <= 0 || na <= 0 || nb <= 0)
        throw input_error("functional shape must be positive");
    BellFunctional f;
    f.nx = nx;
    f.ny = ny;
    f.na = na;
    f.nb = nb;
    f.blocks.assign(static_cast<std::size_t>(nx) * ny, {});
    f.offsets.assign(static_cast<std::size_t>(nx) * ny, Rat(0));
    return f;
}

/// Functional from a dense table indexed ((x*ny + y)*na + a)*nb + b.
inline BellFunctional functional_from_dense(int nx, int ny, int na, int nb,
                                            const std::vector<Rat>& dense) {
    BellFunctional f = zero_functional(nx, ny, na, nb);
    if (static_cast<long long>(dense.size()) != static_cast<long long>(nx) * ny * na * nb)
        throw input_error("dense coefficient table has wrong size");
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
            for (int k = 0; k < na * nb; ++k) {
                const auto idx = static_cast<std::size_t>((x * ny + y) * na * nb + k);
                if (dense[idx] != 0)
                    f.blocks[static_cast<std::size_t>(x * ny + y)].emplace_back(k, dense[idx]);
            }
    return f;
}

inline void set_coeff(BellFunctional& f, int x, int y, int a, int b, const Rat& value) {
    if (x < 0 || x >= f.nx || y < 0 || y >= f.ny || a < 0 || a >= f.na || b < 0 || b >= f.nb)
        throw input_error("coefficient index out of range");
    auto& blk = f.blocks[static_cast<std::size_t>(f.block_index(x, y))];
    const int key = a * f.nb + b;
    auto it = std::lower_bound(blk.begin(), blk.end(), key,
                               [](const auto& e, int k) { return e.first < k; });
    const Rat stored = value - f.offsets[static_cast<std::size_t>(f.block_index(x, y))];
    if (it != blk.end() && it->first == key) {
        if (stored == 0)
            blk.erase(it);
        else
            it->second = stored;
    } else if (stored != 0) {
        blk.insert(it, {key, stored});
    }
}

inline BellFunctional negate(const BellFunctional& f) {
    BellFunctional g = f;
    for (auto& blk : g.blocks)
        for (auto& [k, v] : blk) {
            (void)k;
            v = -v;
        }
    for (auto& off : g.offsets) off = -off;
    return g;
}

inline BellFunctional scale_functional(const BellFunctional& f, const Rat& c) {
    BellFunctional g = f;
    for (auto& blk : g.blocks)
        for (auto& [k, v] : blk) {
            (void)k;
            v *= c;
        }
    for (auto& off : g.offsets) off *= c;
    return g;
}

inline void require_same_shape(const BellFunctional& f, const Dist& p) {
    if (f.nx != p.nx() || f.ny != p.ny() || f.na != p.na() || f.nb != p.nb())
        throw input_error("functional and distribution shapes differ");
}

/// B(p) = sum over (a,b,x,y) of B_{abxy} p(a,b|x,y), exact.
/// Block normalization turns each per-input offset into a flat contribution.
inline Rat bell_value(const BellFunctional& f, const Dist& p) {
    require_same_shape(f, p);
    Rat total = 0;
    for (std::size_t i = 0; i < f.blocks.size(); ++i) {
        total += f.offsets[i]; // offset * (block sum == 1)
        const auto& fb = f.blocks[i];
        const auto& pb = p.blocks[i];
        std::size_t ia = 0, ib = 0;
        while (ia < fb.size() && ib < pb.size()) {
            if (fb[ia].first < pb[ib].first)
                ++ia;
            else if (pb[ib].first < fb[ia].first)
                ++ib;
            else {
                total += fb[ia].second * pb[ib].second;
                ++ia;
                ++ib;
            }
        }
    }
    return total;
}

/// The CHSH functional divided by two: B_{abxy} = (1/2)(-1)^(a^b^xy).
inline BellFunctional chsh_half() {
    BellFunctional f = zero_functional(2, 2, 2, 2);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const int sign = (a ^ b ^ (x & y)) ? -1 : 1;
                    set_coeff(f, x, y, a, b, make_rat(sign, 2));
                }
    return f;
}

} // namespace belleff
