#pragma once

// Bridge from quantum state + projective measurements to an exact Dist.
//
// The Born-rule probabilities are computed in extended floating point, then
// each entry is rationalized with a denominator cap and every block is
// renormalized exactly so the result satisfies the Dist invariants. Outputs
// are flagged approximate in metadata — downstream exact computations treat
// the rationalized table as the ground-truth input.
//
// Tensor index convention: the state vector is indexed i_alice * dim_bob +
// i_bob.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "belleff/dist.hpp"
#include "belleff/errors.hpp"
#include "belleff/rational.hpp"

namespace belleff {

using Amplitude = std::complex<long double>;

struct QuantumSetup {
    std::vector<Amplitude> state; // unit norm, dim_alice * dim_bob entries
    // alice_bases[x][a] is a basis vector of length dim_alice; the family over
    // a must be a complete orthonormal basis (so |A| = dim_alice). Same for Bob.
    std::vector<std::vector<std::vector<Amplitude>>> alice_bases;
    std::vector<std::vector<std::vector<Amplitude>>> bob_bases;
    Int denominator_limit = 1'000'000;
};

namespace quantumdetail {

inline Amplitude inner(const std::vector<Amplitude>& u, const std::vector<Amplitude>& v) {
    Amplitude s = 0;
    for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
    return s;
}

inline void require_orthonormal(const std::vector<std::vector<Amplitude>>& basis,
                                std::size_t dim, const char* side) {
    constexpr long double tol = 1e-12L;
    if (basis.size() != dim)
        throw input_error(std::string(side) + " measurement basis is not complete");
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (basis[i].size() != dim)
            throw input_error(std::string(side) + " basis vector has wrong dimension");
        for (std::size_t j = i; j < basis.size(); ++j) {
            const Amplitude g = inner(basis[i], basis[j]);
            const long double want = i == j ? 1.0L : 0.0L;
            if (std::abs(g - Amplitude(want)) > tol)
                throw input_error(std::string(side) + " measurement basis is not orthonormal");
        }
    }
}

} // namespace quantumdetail

inline Dist from_quantum(const QuantumSetup& setup) {
    using namespace quantumdetail;
    if (setup.alice_bases.empty() || setup.bob_bases.empty())
        throw input_error("quantum setup needs at least one measurement per side");
    if (setup.denominator_limit < 1) throw input_error("denominator limit must be positive");
    const std::size_t da = setup.alice_bases.front().size();
    const std::size_t db = setup.bob_bases.front().size();
    if (da == 0 || db == 0 || setup.state.size() != da * db)
        throw input_error("state dimension does not match measurement dimensions");

    long double norm2 = 0;
    for (const auto& amp : setup.state) norm2 += std::norm(amp);
    if (std::abs(norm2 - 1.0L) > 1e-12L) throw input_error("state is not normalized");
    for (const auto& basis : setup.alice_bases) require_orthonormal(basis, da, "alice");
    for (const auto& basis : setup.bob_bases) require_orthonormal(basis, db, "bob");

    const int nx = static_cast<int>(setup.alice_bases.size());
    const int ny = static_cast<int>(setup.bob_bases.size());
    const int na = static_cast<int>(da), nb = static_cast<int>(db);

    std::vector<SparseBlock> blocks(static_cast<std::size_t>(nx * ny));
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) {
            auto& blk = blocks[static_cast<std::size_t>(x * ny + y)];
            Rat sum = 0;
            for (int a = 0; a < na; ++a)
                for (int b = 0; b < nb; ++b) {
                    // amplitude <v_a (x) w_b | psi>
                    Amplitude amp = 0;
                    const auto& va = setup.alice_bases[static_cast<std::size_t>(x)]
                                                      [static_cast<std::size_t>(a)];
                    const auto& wb = setup.bob_bases[static_cast<std::size_t>(y)]
                                                    [static_cast<std::size_t>(b)];
                    for (std::size_t ia = 0; ia < da; ++ia)
                        for (std::size_t ib = 0; ib < db; ++ib)
                            amp += std::conj(va[ia] * wb[ib]) * setup.state[ia * db + ib];
                    const long double prob = std::norm(amp);
                    Rat r = approximate_denominator_capped(exact_from_long_double(prob),
                                                           setup.denominator_limit);
                    if (r < 0) r = 0;
                    if (r != 0) {
                        blk.emplace_back(a * nb + b, r);
                        sum += r;
                    }
                }
            if (sum == 0) throw input_error("measurement block rationalized to all zeros");
            if (sum != 1)
                for (auto& [k, v] : blk) v /= sum; // exact renormalization
        }
    DistMetadata md;
    md.approximate = true;
    md.source = "quantum";
    return make_dist(default_labels(nx), default_labels(ny), default_labels(na),
                     default_labels(nb), std::move(blocks), std::move(md));
}

} // namespace belleff
