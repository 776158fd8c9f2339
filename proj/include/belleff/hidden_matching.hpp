#pragma once

// The hidden-matching construction: a distribution with an exponential gap
// between one-way communication and the efficiency bound, plus the scaled
// Bell functional whose value on it beats the normalization by design.
//
// Alice holds x in {0,1}^n, Bob a perfect matching M on [n]; the target
// outcome is a pair (i,j) of M together with a parity bit. Conventions:
//   vertices       1..n, encoded kappa(i) = i-1 as a (log2 n)-bit integer
//   x bits         x_i is the i-th character of the label, so bit (n-i)
//                  of the input index (x_1 is the most significant)
//   alice output   a in {0,1}^{log2 n}, as an integer
//   bob output     (d, (i,j)) indexed d*C(n,2) + lex(i,j), label "d:i-j"
//   predicate      <a, kappa(i) xor kappa(j)> xor d == x_i xor x_j
// The distribution puts mass 2/n^2 on each tuple satisfying the predicate
// with (i,j) in M; for every (x, M) exactly n^2/2 tuples qualify (d is
// forced by the rest), so blocks normalize exactly.
//
// The functional pays +phi on predicate-true in-matching entries, -phi on
// predicate-false ones, and a uniform block offset mu = -phi/2, scaled so
// its value on the distribution is scale/(2n) where scale = 2^{sqrt(n-1)/(2C)}
// (rationalized once; every identity downstream is exact in that rational).
//
// degree2_fourier_mass is the level-2 weight that drives the scaling: for
// a subset A of {0,1}^n it returns sum over |S|=2 of (mean of chi_S on A)^2.

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "belleff/bell.hpp"
#include "belleff/dist.hpp"
#include "belleff/errors.hpp"
#include "belleff/quantum.hpp"
#include "belleff/rational.hpp"
#include "belleff/strategies.hpp"

namespace belleff {

struct Matching {
    std::vector<std::pair<int, int>> pairs;  // 1-based, i < j, ascending
};

namespace hmdetail {

inline Int double_factorial(int k) {
    Int r = 1;
    for (int v = k; v >= 2; v -= 2) r *= v;
    return r;
}

inline bool power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

inline int log2_exact(int n) {
    int b = 0;
    while ((1 << b) < n) ++b;
    return b;
}

inline int parity(unsigned v) { return __builtin_popcount(v) & 1; }

/// x_i for the input index: bit (n-i), so labels read x_1..x_n left to right.
inline int x_bit(int xidx, int n, int i) { return xidx >> (n - i) & 1; }

inline int predicate(int xidx, int n, int a, int d, int i, int j) {
    const unsigned v = static_cast<unsigned>((i - 1) ^ (j - 1));
    return (parity(static_cast<unsigned>(a) & v) ^ d) == (x_bit(xidx, n, i) ^ x_bit(xidx, n, j));
}

inline int pair_lex_index(int n, int i, int j) { return (i - 1) * (2 * n - i) / 2 + (j - i - 1); }

inline std::string bit_label(int v, int bits) {
    std::string s(static_cast<std::size_t>(bits), '0');
    for (int k = 0; k < bits; ++k)
        if (v >> (bits - 1 - k) & 1) s[static_cast<std::size_t>(k)] = '1';
    return s;
}

inline void require_even(int n) {
    if (n < 2 || n % 2 != 0) throw input_error("matchings need an even number of vertices >= 2");
}

inline void require_pow2(int n) {
    if (!power_of_two(n) || n < 2)
        throw input_error("the construction needs n to be a power of two, n >= 2");
}

}  // namespace hmdetail

/// All perfect matchings on [n], smallest-unmatched-vertex-first order.
inline std::vector<Matching> enumerate_matchings(int n, long long cap = 1'000'000) {
    hmdetail::require_even(n);
    const Int count = hmdetail::double_factorial(n - 1);
    if (count > cap)
        throw too_large_error("there are " + count.str() + " matchings, above the cap of " +
                              std::to_string(cap));
    std::vector<Matching> out;
    std::vector<int> free_v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) free_v[static_cast<std::size_t>(i)] = i + 1;
    Matching cur;
    auto rec = [&](auto&& self, std::vector<int> rest) -> void {
        if (rest.empty()) {
            out.push_back(cur);
            return;
        }
        const int i = rest.front();
        for (std::size_t t = 1; t < rest.size(); ++t) {
            const int j = rest[t];
            cur.pairs.emplace_back(i, j);
            std::vector<int> next;
            for (std::size_t u = 1; u < rest.size(); ++u)
                if (u != t) next.push_back(rest[u]);
            self(self, std::move(next));
            cur.pairs.pop_back();
        }
    };
    rec(rec, std::move(free_v));
    return out;
}

inline std::string matching_label(const Matching& m) {
    std::string s;
    for (const auto& [i, j] : m.pairs) {
        if (!s.empty()) s += '.';
        s += std::to_string(i) + "-" + std::to_string(j);
    }
    return s;
}

struct HmOptions {
    long long entry_cap = 1'000'000;  // sparse entries to materialize / maps to scan
    Rat scale_rel_tol = make_rat(1, 1'000'000'000'000'000LL);
};

/// 2^{sqrt(n-1)/(2C)} evaluated in extended floating point, then rationalized
/// to the given relative tolerance. Everything downstream is exact in this
/// rational, so the tolerance only moves the bound, never breaks an identity.
inline Rat hm_scale(int n, const Rat& C, const Rat& rel_tol = make_rat(1, 1'000'000'000'000'000LL)) {
    if (n < 2) throw input_error("scale needs n >= 2");
    if (C <= 0) throw input_error("the constant C must be positive");
    const long double expo =
        std::sqrt(static_cast<long double>(n - 1)) / (2.0L * to_long_double(C));
    const long double value = std::pow(2.0L, expo);
    return approximate_within(exact_from_long_double(value), rel_tol);
}

/// The hidden-matching distribution. n must be a power of two.
inline Dist hm_distribution(int n, const HmOptions& opt = {}) {
    using namespace hmdetail;
    require_pow2(n);
    const Int mcount = double_factorial(n - 1);
    const Int support = Int(1) << n;
    if (support * mcount * (static_cast<long long>(n) * n / 2) > opt.entry_cap)
        throw too_large_error("distribution support exceeds the entry cap of " +
                              std::to_string(opt.entry_cap));
    const std::vector<Matching> ms = enumerate_matchings(n, opt.entry_cap);
    const int nx = 1 << n, ny = static_cast<int>(ms.size());
    const int na = n, nb = n * (n - 1);  // 2 * C(n,2)
    const int npairs = nb / 2;
    const Rat mass = make_rat(2, static_cast<long long>(n) * n);

    std::vector<std::string> xl, yl, al, bl;
    for (int x = 0; x < nx; ++x) xl.push_back(bit_label(x, n));
    for (const Matching& m : ms) yl.push_back(matching_label(m));
    for (int a = 0; a < na; ++a) al.push_back(bit_label(a, log2_exact(n)));
    for (int d = 0; d < 2; ++d)
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                bl.push_back(std::to_string(d) + ":" + std::to_string(i) + "-" +
                             std::to_string(j));

    std::vector<SparseBlock> blocks(static_cast<std::size_t>(nx) * ny);
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) {
            auto& blk = blocks[static_cast<std::size_t>(x) * ny + y];
            for (int a = 0; a < na; ++a)
                for (int d = 0; d < 2; ++d)
                    for (const auto& [i, j] : ms[static_cast<std::size_t>(y)].pairs)
                        if (predicate(x, n, a, d, i, j))
                            blk.emplace_back(a * nb + d * npairs + pair_lex_index(n, i, j),
                                             mass);
        }
    DistMetadata md;
    md.source = "hidden_matching";
    return make_dist(std::move(xl), std::move(yl), std::move(al), std::move(bl),
                     std::move(blocks), std::move(md));
}

/// Maximally entangled state plus measurement bases whose statistics give
/// exactly the hidden-matching distribution, with Bob's outcome (d, pair)
/// compressed to the per-matching index d*(n/2) + pair position. Every Born
/// probability is dyadic, so from_quantum on this setup is exact.
inline QuantumSetup hm_quantum_setup(int n, const HmOptions& opt = {}) {
    using namespace hmdetail;
    require_pow2(n);
    const Int mcount = double_factorial(n - 1);
    if ((Int(1) << n) * mcount * (static_cast<long long>(n) * n) > opt.entry_cap)
        throw too_large_error("quantum setup exceeds the entry cap of " +
                              std::to_string(opt.entry_cap));
    const std::vector<Matching> ms = enumerate_matchings(n, opt.entry_cap);
    const long double isqn = 1.0L / std::sqrt(static_cast<long double>(n));
    const long double isq2 = 1.0L / std::sqrt(2.0L);

    QuantumSetup setup;
    setup.state.assign(static_cast<std::size_t>(n) * n, 0);
    for (int k = 0; k < n; ++k) setup.state[static_cast<std::size_t>(k) * n + k] = isqn;
    for (int x = 0; x < (1 << n); ++x) {
        std::vector<std::vector<Amplitude>> basis;
        for (int a = 0; a < n; ++a) {
            std::vector<Amplitude> vec(static_cast<std::size_t>(n));
            for (int k = 0; k < n; ++k) {
                const int sgn = x_bit(x, n, k + 1) ^ parity(a & k);
                vec[static_cast<std::size_t>(k)] = sgn ? -isqn : isqn;
            }
            basis.push_back(std::move(vec));
        }
        setup.alice_bases.push_back(std::move(basis));
    }
    for (const Matching& m : ms) {
        std::vector<std::vector<Amplitude>> basis;
        for (int d = 0; d < 2; ++d)
            for (const auto& [i, j] : m.pairs) {
                std::vector<Amplitude> vec(static_cast<std::size_t>(n));
                vec[static_cast<std::size_t>(i - 1)] = isq2;
                vec[static_cast<std::size_t>(j - 1)] = d ? -isq2 : isq2;
                basis.push_back(std::move(vec));
            }
        setup.bob_bases.push_back(std::move(basis));
    }
    return setup;
}

/// The scaled hidden-matching functional: offset mu on every entry of every
/// block, plus +-phi on in-matching entries by predicate sign.
inline BellFunctional hm_bell(int n, const Rat& C, const HmOptions& opt = {}) {
    using namespace hmdetail;
    require_pow2(n);
    const Int mcount = double_factorial(n - 1);
    if ((Int(1) << n) * mcount * (static_cast<long long>(n) * n) > opt.entry_cap)
        throw too_large_error("functional would have more sparse entries than the cap of " +
                              std::to_string(opt.entry_cap));
    const std::vector<Matching> ms = enumerate_matchings(n, opt.entry_cap);
    const Rat scale = hm_scale(n, C, opt.scale_rel_tol);
    const int nx = 1 << n, ny = static_cast<int>(ms.size());
    const int na = n, nb = n * (n - 1);
    const int npairs = nb / 2;
    const Rat denom = Rat(n) * Rat(Int(1) << n) * Rat(mcount);
    const Rat phi = scale / denom;       // scale / (n 2^n |M|)
    const Rat mu = -phi / 2;             // -scale / (n 2^{n+1} |M|)

    BellFunctional f = zero_functional(nx, ny, na, nb);
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) {
            const std::size_t bi = static_cast<std::size_t>(x) * ny + y;
            f.offsets[bi] = mu;
            auto& blk = f.blocks[bi];
            for (int a = 0; a < na; ++a)
                for (int d = 0; d < 2; ++d)
                    for (const auto& [i, j] : ms[static_cast<std::size_t>(y)].pairs)
                        blk.emplace_back(a * nb + d * npairs + pair_lex_index(n, i, j),
                                         predicate(x, n, a, d, i, j) ? phi : -phi);
        }
    return f;
}

struct HmObjective {
    Rat computed;     // streamed sum over the distribution's support
    Rat closed_form;  // scale / (2n)
    bool equal = false;
    Rat scale;
    long long support_entries = 0;
};

/// Streams functional * distribution over the support tuples without
/// materializing either object, and compares with the closed form.
inline HmObjective hm_objective_check(int n, const Rat& C, const HmOptions& opt = {}) {
    using namespace hmdetail;
    require_pow2(n);
    const std::vector<Matching> ms = enumerate_matchings(n, opt.entry_cap);
    const Rat scale = hm_scale(n, C, opt.scale_rel_tol);
    const Int mcount = double_factorial(n - 1);
    const Rat phi = scale / (Rat(n) * Rat(Int(1) << n) * Rat(mcount));
    const Rat mu = -phi / 2;
    const Rat mass = make_rat(2, static_cast<long long>(n) * n);
    const Rat per_tuple = (mu + phi) * mass;  // every support entry has coefficient mu + phi

    HmObjective r;
    r.scale = scale;
    r.closed_form = scale / (2 * n);
    Rat acc = 0;
    for (int x = 0; x < (1 << n); ++x)
        for (const Matching& m : ms)
            for (const auto& [i, j] : m.pairs)
                for (int a = 0; a < n; ++a) {
                    // d is forced by the predicate; the tuple is in the support
                    const int d =
                        parity(static_cast<unsigned>(a) &
                               static_cast<unsigned>((i - 1) ^ (j - 1))) ^
                        x_bit(x, n, i) ^ x_bit(x, n, j);
                    (void)d;
                    acc += per_tuple;
                    ++r.support_entries;
                }
    r.computed = acc;
    r.equal = r.computed == r.closed_form;
    return r;
}

struct HmScan {
    Rat max_value;  // best matching-consistent bob map with alice best responses
    bool le_one = false;
    std::vector<std::tuple<int, int, int>> bob_witness;  // per matching: (d, i, j)
    std::vector<int> alice_witness;                      // per grid input: a or kAbort
    std::vector<int> grid;                               // alice inputs scanned
    Rat scale;
    long long maps_scanned = 0;
};

/// Exhausts Bob maps that answer each matching with one of its own pairs
/// (out-of-matching answers only ever collect the negative offset, so they
/// are dominated) and gives Alice her best response per input, abort
/// included. Reports the maximum; the caller decides what it means.
inline HmScan hm_constraint_scan(int n, const Rat& C, std::vector<int> grid = {},
                                 const HmOptions& opt = {}) {
    using namespace hmdetail;
    require_pow2(n);
    const std::vector<Matching> ms = enumerate_matchings(n, opt.entry_cap);
    const int m = static_cast<int>(ms.size());
    Int total_maps = 1;
    for (int t = 0; t < m; ++t) total_maps *= n;  // (2 * n/2) choices per matching
    if (total_maps > opt.entry_cap)
        throw too_large_error("scan would enumerate " + total_maps.str() +
                              " bob maps, above the cap of " + std::to_string(opt.entry_cap));
    if (grid.empty())
        for (int x = 0; x < (1 << n); ++x) grid.push_back(x);
    std::vector<bool> seen(static_cast<std::size_t>(1) << n, false);
    for (int x : grid) {
        if (x < 0 || x >= (1 << n)) throw input_error("grid input out of range");
        if (seen[static_cast<std::size_t>(x)]) throw input_error("duplicate grid input");
        seen[static_cast<std::size_t>(x)] = true;
    }

    const Rat scale = hm_scale(n, C, opt.scale_rel_tol);
    const Int mcount = double_factorial(n - 1);
    const Rat phi = scale / (Rat(n) * Rat(Int(1) << n) * Rat(mcount));
    const Rat mu = -phi / 2;

    HmScan r;
    r.scale = scale;
    r.grid = grid;
    std::vector<int> choice(static_cast<std::size_t>(m), 0);  // pair_pos * 2 + d
    bool have = false;
    for (;;) {
        ++r.maps_scanned;
        // alice best response per grid input: value = |M| mu + phi (2 hits - |M|)
        Rat value = 0;
        std::vector<int> alice(grid.size(), kAbort);
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            const int x = grid[gi];
            Rat best;
            int best_a = kAbort;
            for (int a = 0; a < n; ++a) {
                int hits = 0;
                for (int yi = 0; yi < m; ++yi) {
                    const int c = choice[static_cast<std::size_t>(yi)];
                    const auto& [i, j] =
                        ms[static_cast<std::size_t>(yi)].pairs[static_cast<std::size_t>(c / 2)];
                    hits += predicate(x, n, a, c & 1, i, j);
                }
                const Rat score = Rat(m) * mu + phi * (2 * hits - m);
                if (best_a == kAbort || score > best) {
                    best = score;
                    best_a = a;
                }
            }
            if (best < 0) {  // aborting strictly beats every label
                best = 0;
                best_a = kAbort;
            }
            value += best;
            alice[gi] = best_a;
        }
        if (!have || value > r.max_value) {
            have = true;
            r.max_value = value;
            r.alice_witness = alice;
            r.bob_witness.clear();
            for (int yi = 0; yi < m; ++yi) {
                const int c = choice[static_cast<std::size_t>(yi)];
                const auto& [i, j] =
                    ms[static_cast<std::size_t>(yi)].pairs[static_cast<std::size_t>(c / 2)];
                r.bob_witness.emplace_back(c & 1, i, j);
            }
        }
        // odometer over bob choices
        int pos = m - 1;
        while (pos >= 0 && choice[static_cast<std::size_t>(pos)] == n - 1) {
            choice[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++choice[static_cast<std::size_t>(pos)];
    }
    r.le_one = r.max_value <= 1;
    return r;
}

/// Sum over the C(n,2) pair characters S of (mean of chi_S over the subset)^2,
/// exactly. Subset entries are bitmasks below 2^n, all distinct.
inline Rat degree2_fourier_mass(const std::vector<unsigned long long>& subset, int n) {
    if (n < 2 || n > 62) throw input_error("bit width must lie in [2, 62]");
    if (subset.empty()) throw input_error("the subset must be nonempty");
    std::vector<unsigned long long> sorted = subset;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] >> n) throw input_error("subset entry out of range");
        if (i > 0 && sorted[i] == sorted[i - 1]) throw input_error("duplicate subset entry");
    }
    const long long size = static_cast<long long>(subset.size());
    Rat mass = 0;
    for (int bi = 0; bi < n; ++bi)
        for (int bj = bi + 1; bj < n; ++bj) {
            const unsigned long long s = (1ULL << bi) | (1ULL << bj);
            long long odd = 0;
            for (unsigned long long x : subset) odd += __builtin_popcountll(x & s) & 1;
            const Rat beta = make_rat(size - 2 * odd, size);
            mass += beta * beta;
        }
    return mass;
}

}  // namespace belleff
