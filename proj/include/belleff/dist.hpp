#pragma once

// Finite conditional distributions p(a,b|x,y) with exact rational entries.
//
// Storage is one sparse block per input pair (x,y): a sorted vector of
// (a*|B|+b, probability) with only nonzero entries. This keeps large sparse
// families (e.g. the hidden-matching construction) compact while small dense
// tables cost nothing extra. Every constructor validates exactly: entries
// nonnegative and each block summing to exactly 1.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "belleff/errors.hpp"
#include "belleff/rational.hpp"

namespace belleff {

struct DistMetadata {
    bool approximate = false;
    std::string source;
    bool operator==(const DistMetadata&) const = default;
};

using SparseBlock = std::vector<std::pair<int, Rat>>; // (a*nb+b, value), sorted, nonzero

struct Dist {
    std::vector<std::string> x_labels, y_labels, a_labels, b_labels;
    std::vector<SparseBlock> blocks; // indexed x*ny + y
    DistMetadata metadata;

    int nx() const { return static_cast<int>(x_labels.size()); }
    int ny() const { return static_cast<int>(y_labels.size()); }
    int na() const { return static_cast<int>(a_labels.size()); }
    int nb() const { return static_cast<int>(b_labels.size()); }

    int block_index(int x, int y) const { return x * ny() + y; }
    const SparseBlock& block(int x, int y) const {
        return blocks[static_cast<std::size_t>(block_index(x, y))];
    }

    Rat prob(int x, int y, int a, int b) const {
        const auto& blk = block(x, y);
        const int key = a * nb() + b;
        auto it = std::lower_bound(blk.begin(), blk.end(), key,
                                   [](const auto& e, int k) { return e.first < k; });
        if (it != blk.end() && it->first == key) return it->second;
        return Rat(0);
    }

    bool operator==(const Dist&) const = default;
};

inline std::vector<std::string> default_labels(int n) {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(std::to_string(i));
    return out;
}

namespace distdetail {

inline void require_labels(const std::vector<std::string>& labels, const char* side) {
    if (labels.empty()) throw input_error(std::string(side) + " label set is empty");
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t j = i + 1; j < labels.size(); ++j)
            if (labels[i] == labels[j])
                throw input_error(std::string(side) + " labels contain duplicate \"" +
                                  labels[i] + "\"");
}

inline void normalize_block(SparseBlock& blk) {
    std::sort(blk.begin(), blk.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    SparseBlock merged;
    for (auto& [k, v] : blk) {
        if (!merged.empty() && merged.back().first == k)
            merged.back().second += v;
        else
            merged.emplace_back(k, v);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const auto& e) { return e.second == 0; }),
                 merged.end());
    blk = std::move(merged);
}

} // namespace distdetail

/// Validating constructor from sparse blocks.
inline Dist make_dist(std::vector<std::string> x_labels, std::vector<std::string> y_labels,
                      std::vector<std::string> a_labels, std::vector<std::string> b_labels,
                      std::vector<SparseBlock> blocks, DistMetadata metadata = {}) {
    distdetail::require_labels(x_labels, "x");
    distdetail::require_labels(y_labels, "y");
    distdetail::require_labels(a_labels, "a");
    distdetail::require_labels(b_labels, "b");
    const int nx = static_cast<int>(x_labels.size()), ny = static_cast<int>(y_labels.size());
    const int na = static_cast<int>(a_labels.size()), nb = static_cast<int>(b_labels.size());
    if (static_cast<int>(blocks.size()) != nx * ny)
        throw input_error("expected " + std::to_string(nx * ny) + " probability blocks, got " +
                          std::to_string(blocks.size()));
    for (auto& blk : blocks) {
        distdetail::normalize_block(blk);
        Rat sum = 0;
        for (const auto& [k, v] : blk) {
            if (k < 0 || k >= na * nb) throw input_error("probability entry out of range");
            if (v < 0) throw input_error("negative probability entry " + rat_to_string(v));
            sum += v;
        }
        if (sum != 1)
            throw input_error("probability block sums to " + rat_to_string(sum) + ", expected 1");
    }
    Dist d;
    d.x_labels = std::move(x_labels);
    d.y_labels = std::move(y_labels);
    d.a_labels = std::move(a_labels);
    d.b_labels = std::move(b_labels);
    d.blocks = std::move(blocks);
    d.metadata = std::move(metadata);
    return d;
}

/// Dense table indexed ((x*ny + y)*na + a)*nb + b.
inline Dist dist_from_dense(std::vector<std::string> x_labels, std::vector<std::string> y_labels,
                            std::vector<std::string> a_labels, std::vector<std::string> b_labels,
                            const std::vector<Rat>& dense, DistMetadata metadata = {}) {
    const int nx = static_cast<int>(x_labels.size()), ny = static_cast<int>(y_labels.size());
    const int na = static_cast<int>(a_labels.size()), nb = static_cast<int>(b_labels.size());
    if (static_cast<long long>(dense.size()) !=
        static_cast<long long>(nx) * ny * na * nb)
        throw input_error("dense probability table has wrong size");
    std::vector<SparseBlock> blocks(static_cast<std::size_t>(nx * ny));
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
            for (int a = 0; a < na; ++a)
                for (int b = 0; b < nb; ++b) {
                    const auto idx = ((static_cast<std::size_t>(x) * ny + y) * na + a) * nb + b;
                    if (dense[idx] != 0)
                        blocks[static_cast<std::size_t>(x * ny + y)].emplace_back(a * nb + b,
                                                                                  dense[idx]);
                }
    return make_dist(std::move(x_labels), std::move(y_labels), std::move(a_labels),
                     std::move(b_labels), std::move(blocks), std::move(metadata));
}

/// p_f for a boolean function: p(a,b|x,y) = 1/2 iff a XOR b = f(x,y).
/// `truth` is row-major over x, then y, entries in {0,1}.
inline Dist from_boolean_function(const std::vector<int>& truth, int nx, int ny,
                                  std::string source = "boolean_function") {
    if (nx <= 0 || ny <= 0 || static_cast<int>(truth.size()) != nx * ny)
        throw input_error("truth table must have nx*ny entries");
    for (int t : truth)
        if (t != 0 && t != 1) throw input_error("truth table entries must be 0 or 1");
    std::vector<SparseBlock> blocks(static_cast<std::size_t>(nx * ny));
    const Rat half = make_rat(1, 2);
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) {
            const int f = truth[static_cast<std::size_t>(x * ny + y)];
            auto& blk = blocks[static_cast<std::size_t>(x * ny + y)];
            for (int a = 0; a < 2; ++a) {
                const int b = a ^ f;
                blk.emplace_back(a * 2 + b, half);
            }
        }
    DistMetadata md;
    md.source = std::move(source);
    return make_dist(default_labels(nx), default_labels(ny), default_labels(2),
                     default_labels(2), std::move(blocks), std::move(md));
}

/// The PR box: a XOR b = x AND y, binary everything, uniform marginals.
inline Dist pr_box() {
    return from_boolean_function({0, 0, 0, 1}, 2, 2, "pr_box");
}

/// Point distribution of a deterministic no-abort strategy pair.
inline Dist deterministic_dist(const std::vector<int>& alice, const std::vector<int>& bob,
                               int na, int nb) {
    const int nx = static_cast<int>(alice.size()), ny = static_cast<int>(bob.size());
    if (nx == 0 || ny == 0) throw input_error("empty strategy maps");
    std::vector<SparseBlock> blocks(static_cast<std::size_t>(nx * ny));
    for (int x = 0; x < nx; ++x) {
        if (alice[static_cast<std::size_t>(x)] < 0 || alice[static_cast<std::size_t>(x)] >= na)
            throw input_error("alice output out of range");
        for (int y = 0; y < ny; ++y) {
            if (bob[static_cast<std::size_t>(y)] < 0 || bob[static_cast<std::size_t>(y)] >= nb)
                throw input_error("bob output out of range");
            blocks[static_cast<std::size_t>(x * ny + y)].emplace_back(
                alice[static_cast<std::size_t>(x)] * nb + bob[static_cast<std::size_t>(y)],
                Rat(1));
        }
    }
    DistMetadata md;
    md.source = "deterministic";
    return make_dist(default_labels(nx), default_labels(ny), default_labels(na),
                     default_labels(nb), std::move(blocks), std::move(md));
}

/// Uniform outputs on every input pair.
inline Dist uniform_dist(int nx, int ny, int na, int nb) {
    std::vector<SparseBlock> blocks(static_cast<std::size_t>(nx * ny));
    const Rat u = make_rat(1, static_cast<long long>(na) * nb);
    for (auto& blk : blocks)
        for (int k = 0; k < na * nb; ++k) blk.emplace_back(k, u);
    DistMetadata md;
    md.source = "uniform";
    return make_dist(default_labels(nx), default_labels(ny), default_labels(na),
                     default_labels(nb), std::move(blocks), std::move(md));
}

inline void require_same_shape(const Dist& p, const Dist& q) {
    if (p.x_labels != q.x_labels || p.y_labels != q.y_labels || p.a_labels != q.a_labels ||
        p.b_labels != q.b_labels)
        throw input_error("distributions have different label sets");
}

/// Convex mixture. Weights must be nonnegative and sum to exactly 1.
inline Dist mix_dists(const std::vector<std::pair<Rat, Dist>>& parts) {
    if (parts.empty()) throw input_error("empty mixture");
    Rat total = 0;
    for (const auto& [w, d] : parts) {
        if (w < 0) throw input_error("negative mixture weight");
        require_same_shape(parts.front().second, d);
        total += w;
    }
    if (total != 1) throw input_error("mixture weights sum to " + rat_to_string(total));
    const Dist& first = parts.front().second;
    std::vector<SparseBlock> blocks(first.blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        SparseBlock acc;
        for (const auto& [w, d] : parts)
            for (const auto& [k, v] : d.blocks[i]) acc.emplace_back(k, w * v);
        blocks[i] = std::move(acc); // make_dist merges and sorts
    }
    DistMetadata md;
    md.source = "mixture";
    for (const auto& [w, d] : parts) md.approximate = md.approximate || d.metadata.approximate;
    return make_dist(first.x_labels, first.y_labels, first.a_labels, first.b_labels,
                     std::move(blocks), std::move(md));
}

/// max over (x,y) of sum_{a,b} |p - q| — the per-input distance used by the
/// smoothed bounds.
inline Rat l1_distance(const Dist& p, const Dist& q) {
    require_same_shape(p, q);
    Rat best = 0;
    for (std::size_t i = 0; i < p.blocks.size(); ++i) {
        const auto& pb = p.blocks[i];
        const auto& qb = q.blocks[i];
        Rat sum = 0;
        std::size_t ip = 0, iq = 0;
        while (ip < pb.size() || iq < qb.size()) {
            if (iq == qb.size() || (ip < pb.size() && pb[ip].first < qb[iq].first)) {
                sum += rat_abs(pb[ip].second);
                ++ip;
            } else if (ip == pb.size() || qb[iq].first < pb[ip].first) {
                sum += rat_abs(qb[iq].second);
                ++iq;
            } else {
                sum += rat_abs(pb[ip].second - qb[iq].second);
                ++ip;
                ++iq;
            }
        }
        if (sum > best) best = sum;
    }
    return best;
}

/// Marginal consistency: Alice's marginal independent of y, Bob's of x.
inline bool is_nonsignaling(const Dist& p) {
    const int nx = p.nx(), ny = p.ny(), na = p.na(), nb = p.nb();
    for (int x = 0; x < nx; ++x) {
        std::vector<Rat> ref;
        for (int y = 0; y < ny; ++y) {
            std::vector<Rat> marg(static_cast<std::size_t>(na), Rat(0));
            for (const auto& [k, v] : p.block(x, y)) marg[static_cast<std::size_t>(k / nb)] += v;
            if (y == 0)
                ref = std::move(marg);
            else if (marg != ref)
                return false;
        }
    }
    for (int y = 0; y < ny; ++y) {
        std::vector<Rat> ref;
        for (int x = 0; x < nx; ++x) {
            std::vector<Rat> marg(static_cast<std::size_t>(nb), Rat(0));
            for (const auto& [k, v] : p.block(x, y)) marg[static_cast<std::size_t>(k % nb)] += v;
            if (x == 0)
                ref = std::move(marg);
            else if (marg != ref)
                return false;
        }
    }
    return true;
}

} // namespace belleff
