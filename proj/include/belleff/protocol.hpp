#pragma once

// Deterministic communication protocols (as leaf matrices), their reduction
// to local abort strategies, and the amplification arithmetic.
//
// A protocol is a transcript matrix T : X x Y -> [0, 2^c) satisfying the
// rectangle property (each leaf's preimage is a combinatorial rectangle)
// plus per-leaf output maps for both players. A mixed protocol is a rational
// convex combination of those with identical dimensions.
//
// transcript_reduction: every (component, leaf) pair becomes a deterministic
// strategy in which each player answers as if the transcript were that leaf,
// aborting on inputs where the leaf is impossible for them. Exactly one leaf
// is possible for both players on any input pair, so the mixture accepts
// with probability 2^{-c} on every input and conditioned on acceptance it
// reproduces the protocol's output distribution. Both facts are re-checked
// exactly and failures throw internal_error.
//
// protocol_to_partition: same strategies weighted by the component weights
// alone; the total is exactly 2^c and the weighted strategies reproduce the
// output distribution with per-input acceptance 1, i.e. a feasible point of
// the partition LP whose value is 2^c.
//
// amplify_sm: repetitions needed to push the all-abort probability of a
// zeta-accepting strategy below 1 - eta, N = ceil(ln(1/(1-eta)) / zeta),
// with the guarantee (1-zeta)^N <= 1-eta re-verified in exact arithmetic.
//
// monte_carlo_*: seeded empirical checks of a strategy mixture (per-input
// conditional within 3 sigma in L1, abort rate within a 3 sigma Bernoulli
// band) and of the amplified abort probability.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "belleff/dist.hpp"
#include "belleff/errors.hpp"
#include "belleff/rational.hpp"
#include "belleff/strategies.hpp"

namespace belleff {

struct CommProtocol {
    int c = 0;                                // transcript length in bits
    std::vector<std::vector<int>> transcript; // [x][y] -> leaf in [0, 2^c)
    std::vector<std::vector<int>> alice_out;  // [x][leaf] -> output in [0, na)
    std::vector<std::vector<int>> bob_out;    // [y][leaf] -> output in [0, nb)
    int na = 0, nb = 0;                       // output alphabet sizes
};

using MixedProtocol = std::vector<std::pair<Rat, CommProtocol>>;

/// Output alphabet sizes from the tables (densely used outputs assumed).
inline void infer_output_sizes(CommProtocol& p) {
    int na = 1, nb = 1;
    for (const auto& row : p.alice_out)
        for (int v : row) na = std::max(na, v + 1);
    for (const auto& row : p.bob_out)
        for (int v : row) nb = std::max(nb, v + 1);
    p.na = na;
    p.nb = nb;
}

namespace protodetail {

inline void require_table(const std::vector<std::vector<int>>& t, std::size_t rows,
                          std::size_t cols, int limit, const char* what) {
    if (t.size() != rows) throw input_error(std::string(what) + " has the wrong number of rows");
    for (const auto& row : t) {
        if (row.size() != cols)
            throw input_error(std::string(what) + " has a row of the wrong length");
        for (int v : row)
            if (v < 0 || v >= limit) throw input_error(std::string(what) + " entry out of range");
    }
}

inline void require_structure(const CommProtocol& p) {
    if (p.c < 0 || p.c > 20) throw input_error("transcript length must lie in [0, 20] bits");
    const std::size_t nx = p.transcript.size();
    if (nx == 0 || p.transcript.front().empty())
        throw input_error("transcript matrix must be nonempty");
    const std::size_t ny = p.transcript.front().size();
    const int leaves = 1 << p.c;
    require_table(p.transcript, nx, ny, leaves, "transcript");
    if (p.na < 1 || p.nb < 1) throw input_error("output alphabets must be nonempty");
    require_table(p.alice_out, nx, static_cast<std::size_t>(leaves), p.na, "alice output table");
    require_table(p.bob_out, ny, static_cast<std::size_t>(leaves), p.nb, "bob output table");
}

inline void require_same_dims(const CommProtocol& a, const CommProtocol& b) {
    if (a.c != b.c || a.transcript.size() != b.transcript.size() ||
        a.transcript.front().size() != b.transcript.front().size() || a.na != b.na ||
        a.nb != b.nb)
        throw input_error("mixture components have different dimensions");
}

inline Rat rat_pow_ll(Rat base, long long e) {
    Rat r = 1;
    while (e > 0) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

inline int ceil_log2_ll(long long v) {
    int b = 0;
    while ((1LL << b) < v) ++b;
    return b;
}

}  // namespace protodetail

struct RectangleViolation {
    int x = 0, y = 0, xp = 0, yp = 0, leaf = 0;
};

struct ProtocolReport {
    bool valid = false;
    std::vector<RectangleViolation> violations;
};

/// Exhaustive rectangle-property check: T(x,y') == T(x',y) == t forces
/// T(x,y) == t. Structural problems throw; semantic failures are reported.
inline ProtocolReport validate_protocol(const CommProtocol& p) {
    protodetail::require_structure(p);
    const int nx = static_cast<int>(p.transcript.size());
    const int ny = static_cast<int>(p.transcript.front().size());
    ProtocolReport rep;
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
            for (int xp = 0; xp < nx; ++xp)
                for (int yp = 0; yp < ny; ++yp) {
                    const int t = p.transcript[static_cast<std::size_t>(x)][static_cast<std::size_t>(yp)];
                    if (p.transcript[static_cast<std::size_t>(xp)][static_cast<std::size_t>(y)] != t)
                        continue;
                    if (p.transcript[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] != t)
                        rep.violations.push_back({x, y, xp, yp, t});
                }
    rep.valid = rep.violations.empty();
    return rep;
}

inline void require_mixture(const MixedProtocol& mp) {
    if (mp.empty()) throw input_error("empty protocol mixture");
    Rat total = 0;
    for (const auto& [w, p] : mp) {
        if (w < 0) throw input_error("negative mixture weight");
        protodetail::require_structure(p);
        protodetail::require_same_dims(mp.front().second, p);
        total += w;
    }
    if (total != 1) throw input_error("mixture weights sum to " + rat_to_string(total));
}

/// The protocol's output distribution: both players answer at the leaf the
/// transcript actually reaches.
inline Dist protocol_output_dist(const MixedProtocol& mp) {
    require_mixture(mp);
    const CommProtocol& first = mp.front().second;
    const int nx = static_cast<int>(first.transcript.size());
    const int ny = static_cast<int>(first.transcript.front().size());
    std::vector<SparseBlock> blocks(static_cast<std::size_t>(nx) * ny);
    for (const auto& [w, p] : mp) {
        if (w == 0) continue;
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y) {
                const int t = p.transcript[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
                const int a = p.alice_out[static_cast<std::size_t>(x)][static_cast<std::size_t>(t)];
                const int b = p.bob_out[static_cast<std::size_t>(y)][static_cast<std::size_t>(t)];
                blocks[static_cast<std::size_t>(x) * ny + y].emplace_back(a * first.nb + b, w);
            }
    }
    DistMetadata md;
    md.source = "protocol_output";
    return make_dist(default_labels(nx), default_labels(ny), default_labels(first.na),
                     default_labels(first.nb), std::move(blocks), std::move(md));
}

namespace protodetail {

/// One strategy per (component, leaf): play the leaf's answer where the leaf
/// is possible, abort elsewhere. All-abort alice rows are canonicalized to a
/// bob all-0 row so duplicates merge and pure one-way protocols stay in the
/// alice-abort class.
inline std::vector<std::pair<DetStrategy, Rat>> leaf_strategies(const MixedProtocol& mp,
                                                                const Rat& leaf_weight_factor) {
    const CommProtocol& first = mp.front().second;
    const int nx = static_cast<int>(first.transcript.size());
    const int ny = static_cast<int>(first.transcript.front().size());
    std::vector<std::pair<DetStrategy, Rat>> merged;
    auto add = [&](const DetStrategy& s, const Rat& w) {
        for (auto& [t, tw] : merged)
            if (t.alice == s.alice && t.bob == s.bob) {
                tw += w;
                return;
            }
        merged.emplace_back(s, w);
    };
    for (const auto& [q, p] : mp) {
        if (q == 0) continue;
        for (int leaf = 0; leaf < (1 << p.c); ++leaf) {
            DetStrategy s;
            s.cls = StrategyClass::both_abort;
            s.alice.assign(static_cast<std::size_t>(nx), kAbort);
            s.bob.assign(static_cast<std::size_t>(ny), kAbort);
            for (int x = 0; x < nx; ++x) {
                bool possible = false;
                for (int y = 0; y < ny && !possible; ++y)
                    possible = p.transcript[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] == leaf;
                if (possible)
                    s.alice[static_cast<std::size_t>(x)] =
                        p.alice_out[static_cast<std::size_t>(x)][static_cast<std::size_t>(leaf)];
            }
            for (int y = 0; y < ny; ++y) {
                bool possible = false;
                for (int x = 0; x < nx && !possible; ++x)
                    possible = p.transcript[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] == leaf;
                if (possible)
                    s.bob[static_cast<std::size_t>(y)] =
                        p.bob_out[static_cast<std::size_t>(y)][static_cast<std::size_t>(leaf)];
            }
            bool alice_dead = true;
            for (int v : s.alice) alice_dead = alice_dead && v == kAbort;
            if (alice_dead) s.bob.assign(static_cast<std::size_t>(ny), 0);
            add(s, q * leaf_weight_factor);
        }
    }
    return merged;
}

inline StrategyClass natural_class(const std::vector<std::pair<DetStrategy, Rat>>& ws) {
    bool alice_aborts = false, bob_aborts = false;
    for (const auto& [s, w] : ws) {
        for (int v : s.alice) alice_aborts = alice_aborts || v == kAbort;
        for (int v : s.bob) bob_aborts = bob_aborts || v == kAbort;
    }
    if (bob_aborts) return StrategyClass::both_abort;
    if (alice_aborts) return StrategyClass::alice_abort;
    return StrategyClass::no_abort;
}

}  // namespace protodetail

struct ReductionResult {
    StrategyClass cls = StrategyClass::both_abort;  // tightest class that fits
    Rat zeta;                                       // exactly 2^{-c}
    std::vector<std::pair<DetStrategy, Rat>> weights;  // merged, sum exactly 1
    Dist conditional;                               // == the protocol's output distribution
};

inline ReductionResult transcript_reduction(const MixedProtocol& mp) {
    require_mixture(mp);
    for (const auto& [w, p] : mp)
        if (!validate_protocol(p).valid)
            throw input_error("protocol violates the rectangle property");
    const CommProtocol& first = mp.front().second;
    const int nx = static_cast<int>(first.transcript.size());
    const int ny = static_cast<int>(first.transcript.front().size());

    ReductionResult r;
    r.zeta = make_rat(1, 1LL << first.c);
    r.weights = protodetail::leaf_strategies(mp, r.zeta);
    r.cls = protodetail::natural_class(r.weights);
    for (auto& [s, w] : r.weights) s.cls = r.cls;

    // exactly one leaf is live for both players on every input pair
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) {
            Rat acc = 0;
            for (const auto& [s, w] : r.weights)
                if (s.alice[static_cast<std::size_t>(x)] != kAbort &&
                    s.bob[static_cast<std::size_t>(y)] != kAbort)
                    acc += w;
            if (acc != r.zeta)
                throw internal_error("acceptance probability drifted from 2^-c");
        }

    std::vector<SparseBlock> blocks(static_cast<std::size_t>(nx) * ny);
    for (const auto& [s, w] : r.weights)
        for (int x = 0; x < nx; ++x) {
            if (s.alice[static_cast<std::size_t>(x)] == kAbort) continue;
            for (int y = 0; y < ny; ++y) {
                if (s.bob[static_cast<std::size_t>(y)] == kAbort) continue;
                blocks[static_cast<std::size_t>(x) * ny + y].emplace_back(
                    s.alice[static_cast<std::size_t>(x)] * first.nb +
                        s.bob[static_cast<std::size_t>(y)],
                    w / r.zeta);
            }
        }
    DistMetadata md;
    md.source = "transcript_reduction";
    r.conditional = make_dist(default_labels(nx), default_labels(ny), default_labels(first.na),
                              default_labels(first.nb), std::move(blocks), std::move(md));

    const Dist target = protocol_output_dist(mp);
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
            for (int a = 0; a < first.na; ++a)
                for (int b = 0; b < first.nb; ++b)
                    if (r.conditional.prob(x, y, a, b) != target.prob(x, y, a, b))
                        throw internal_error("conditional distribution drifted from the protocol");
    return r;
}

struct PartitionEmbedding {
    std::vector<std::pair<DetStrategy, Rat>> weights;  // sum exactly 2^c, junk included
    Rat total_weight;
    Dist target;  // sum of weight * strategy == target entrywise
};

/// A c-bit protocol is a feasible point of the eta = 1 partition LP with
/// value 2^c: reweight the leaf strategies by the component weights alone.
inline PartitionEmbedding protocol_to_partition(const MixedProtocol& mp) {
    require_mixture(mp);
    for (const auto& [w, p] : mp)
        if (!validate_protocol(p).valid)
            throw input_error("protocol violates the rectangle property");
    const CommProtocol& first = mp.front().second;
    const int nx = static_cast<int>(first.transcript.size());
    const int ny = static_cast<int>(first.transcript.front().size());

    PartitionEmbedding r;
    r.weights = protodetail::leaf_strategies(mp, Rat(1));
    const StrategyClass cls = protodetail::natural_class(r.weights);
    for (auto& [s, w] : r.weights) s.cls = cls;
    r.total_weight = 0;
    for (const auto& [s, w] : r.weights) r.total_weight += w;
    if (r.total_weight != Rat(Int(1) << first.c))
        throw internal_error("partition weights do not sum to 2^c");
    r.target = protocol_output_dist(mp);

    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
            for (int a = 0; a < first.na; ++a)
                for (int b = 0; b < first.nb; ++b) {
                    Rat acc = 0;
                    for (const auto& [s, w] : r.weights)
                        if (s.alice[static_cast<std::size_t>(x)] == a &&
                            s.bob[static_cast<std::size_t>(y)] == b)
                            acc += w;
                    if (acc != r.target.prob(x, y, a, b))
                        throw internal_error("partition point is not feasible");
                }
    return r;
}

struct Amplification {
    long long repetitions = 0;  // N = ceil(ln(1/(1-eta)) / zeta)
    Rat abort_prob;             // (1-zeta)^N, exact
    long long implied_bits = 0; // N * ceil(log2(na*nb))
};

/// Repetitions until the simulation aborts with probability at most 1 - eta.
inline Amplification amplify_sm(const Rat& zeta, const Rat& eta, int na, int nb) {
    if (zeta <= 0 || zeta > 1) throw input_error("zeta must lie in (0, 1]");
    if (eta <= 0 || eta >= 1) throw input_error("eta must lie in (0, 1)");
    if (na < 1 || nb < 1) throw input_error("output alphabets must be nonempty");
    Amplification r;
    if (zeta == 1) {
        r.repetitions = 1;  // a single round already never aborts
    } else {
        const long double target = std::log(1.0L / (1.0L - to_long_double(eta)));
        r.repetitions =
            static_cast<long long>(std::ceil(target / to_long_double(zeta) - 1e-18L));
        if (r.repetitions < 1) r.repetitions = 1;
        // the ceiling argument guarantees the bound; re-verify exactly anyway
        while (protodetail::rat_pow_ll(1 - zeta, r.repetitions) > 1 - eta) ++r.repetitions;
    }
    r.abort_prob = protodetail::rat_pow_ll(1 - zeta, r.repetitions);
    r.implied_bits =
        r.repetitions * protodetail::ceil_log2_ll(static_cast<long long>(na) * nb);
    return r;
}

// ---- seeded empirical checks ----------------------------------------------

struct MonteCarloReport {
    long long samples_per_input = 0;
    long double max_l1 = 0;         // worst per-input L1 distance of conditionals
    long double l1_tolerance = 0;   // 3 sqrt(na nb / samples)
    long double max_abort_dev = 0;  // worst |empirical - (1 - zeta)|
    long double abort_tolerance = 0;  // 3 sqrt(zeta (1-zeta) / samples)
    bool conditional_ok = false, abort_ok = false, ok = false;
};

/// Samples the strategy mixture per input pair and compares the empirical
/// conditional and abort rates against their exact targets.
inline MonteCarloReport monte_carlo_check(const std::vector<std::pair<DetStrategy, Rat>>& mix,
                                          const Dist& conditional, const Rat& zeta,
                                          long long samples_per_input, std::uint64_t seed) {
    if (mix.empty()) throw input_error("empty strategy mixture");
    if (samples_per_input < 1) throw input_error("need at least one sample per input");
    const int nx = conditional.nx(), ny = conditional.ny();
    const int na = conditional.na(), nb = conditional.nb();
    std::vector<long double> cumulative;
    long double acc = 0;
    for (const auto& [s, w] : mix) {
        acc += to_long_double(w);
        cumulative.push_back(acc);
    }
    std::mt19937_64 gen(seed);
    auto draw = [&]() -> std::size_t {
        const long double u = static_cast<long double>(gen()) * 0x1.0p-64L * acc;
        for (std::size_t i = 0; i < cumulative.size(); ++i)
            if (u < cumulative[i]) return i;
        return cumulative.size() - 1;
    };

    MonteCarloReport rep;
    rep.samples_per_input = samples_per_input;
    rep.l1_tolerance =
        3.0L * std::sqrt(static_cast<long double>(na) * nb / samples_per_input);
    const long double z = to_long_double(zeta);
    rep.abort_tolerance = 3.0L * std::sqrt(z * (1.0L - z) / samples_per_input);
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) {
            std::vector<long long> counts(static_cast<std::size_t>(na) * nb, 0);
            long long accepted = 0;
            for (long long t = 0; t < samples_per_input; ++t) {
                const auto& [s, w] = mix[draw()];
                const int a = s.alice[static_cast<std::size_t>(x)];
                const int b = s.bob[static_cast<std::size_t>(y)];
                if (a == kAbort || b == kAbort) continue;
                ++accepted;
                ++counts[static_cast<std::size_t>(a) * nb + b];
            }
            const long double abort_dev =
                std::fabs((1.0L - static_cast<long double>(accepted) / samples_per_input) -
                          (1.0L - z));
            rep.max_abort_dev = std::max(rep.max_abort_dev, abort_dev);
            if (accepted == 0) {
                rep.max_l1 = 2.0L;  // no information at all; maximal deviation
                continue;
            }
            long double l1 = 0;
            for (int a = 0; a < na; ++a)
                for (int b = 0; b < nb; ++b) {
                    const long double emp =
                        static_cast<long double>(counts[static_cast<std::size_t>(a) * nb + b]) /
                        accepted;
                    l1 += std::fabs(emp - to_long_double(conditional.prob(x, y, a, b)));
                }
            rep.max_l1 = std::max(rep.max_l1, l1);
        }
    rep.conditional_ok = rep.max_l1 <= rep.l1_tolerance;
    rep.abort_ok = rep.max_abort_dev <= rep.abort_tolerance;
    rep.ok = rep.conditional_ok && rep.abort_ok;
    return rep;
}

struct AmplifyMcReport {
    long long trials = 0;
    long double empirical_abort = 0;
    long double expected_abort = 0;  // (1-zeta)^N
    long double tolerance = 0;       // 3 sigma
    bool ok = false;
};

/// Simulates N accept/abort rounds per trial and checks the all-abort rate.
inline AmplifyMcReport monte_carlo_amplify(const Rat& zeta, long long repetitions,
                                           long long trials, std::uint64_t seed) {
    if (zeta <= 0 || zeta > 1) throw input_error("zeta must lie in (0, 1]");
    if (repetitions < 1 || trials < 1) throw input_error("need positive repetitions and trials");
    std::mt19937_64 gen(seed);
    const long double z = to_long_double(zeta);
    long long aborted = 0;
    for (long long t = 0; t < trials; ++t) {
        bool any = false;
        for (long long r = 0; r < repetitions && !any; ++r)
            any = static_cast<long double>(gen()) * 0x1.0p-64L < z;
        if (!any) ++aborted;
    }
    AmplifyMcReport rep;
    rep.trials = trials;
    rep.empirical_abort = static_cast<long double>(aborted) / trials;
    rep.expected_abort = to_long_double(protodetail::rat_pow_ll(1 - zeta, repetitions));
    rep.tolerance =
        3.0L * std::sqrt(std::max(rep.expected_abort * (1.0L - rep.expected_abort), 1e-12L) /
                         trials);
    rep.ok = std::fabs(rep.empirical_abort - rep.expected_abort) <= rep.tolerance;
    return rep;
}

}  // namespace belleff
