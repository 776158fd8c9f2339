#pragma once

// The LP bound family over local strategies, solved exactly.
//
// Maximization family (value = 1/zeta_opt):
//   eff        max zeta  s.t.  sum_l q_l*l(ab|xy) = zeta*p(ab|xy) for all
//              tuples, sum q = 1, over BothAbort strategies
//   eff_eps    smoothed variant: the simulated table s = zeta*p' is a free
//              subnormalized score with per-input mass zeta and per-input
//              error budget eps*zeta
//   eff_eta    per-input acceptance zeta_xy with eta*zeta <= zeta_xy <= zeta
//   eff_nc     one-sided coupling zeta <= zeta_xy only
//   eff_oneway eff over AliceAbort strategies
// Minimization family:
//   nu         min sum(q+ + q-) s.t. sum(q+ - q-)*l = p over NoAbort
//   prt        min sum w s.t. sum w*l = eta_xy*p, eta <= eta_xy <= 1, over
//              strategies with a live input on each side (rectangle columns)
//   prt_function  the rectangle-cover LP for a (partial) function
//
// Every solve is KKT-verified. Dual values of the per-tuple equality rows
// become a Bell functional; after exact rescaling it certifies the bound
// and is re-verifiable independently (certificates.hpp).
//
// Column generation: restricted master over a small seed, pricing by the
// exact best-response oracle on the dual functional. The loop terminates
// because each round enters a column that is strictly reduced-cost
// violating, so it can never repeat. Infeasible restricted masters (the
// minimization family) price against the Farkas multipliers instead.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "belleff/bell.hpp"
#include "belleff/certificates.hpp"
#include "belleff/dist.hpp"
#include "belleff/errors.hpp"
#include "belleff/linprog.hpp"
#include "belleff/rational.hpp"
#include "belleff/strategies.hpp"

namespace belleff {

struct BoundOptions {
    long long cap = 2'000'000;              // full-enumeration class-size cap
    bool column_generation = false;
    long long pricing_cap = 1'000'000'000;  // best-response term cap inside pricing
    SolveOptions lp;
};

struct BoundResult {
    std::string bound_name;
    bool finite = true;  // eff_oneway can be infinite on one-way-signaling inputs
    Rat bound_value;     // meaningful iff finite
    std::optional<Rat> zeta;          // maximization family: optimal acceptance
    std::vector<Rat> zeta_per_input;  // per (x*ny+y): zeta_xy (eta/nc), eta_xy (prt)
    std::vector<std::pair<DetStrategy, Rat>> weights;  // nonzero primal weights
    std::optional<Certificate> certificate;
    int colgen_rounds = 0;
    LinSolution solution;
};

namespace bounddetail {

inline int tuple_count(const Dist& p) { return p.nx() * p.ny() * p.na() * p.nb(); }

inline int tuple_index(const Dist& p, int x, int y, int a, int b) {
    return ((x * p.ny() + y) * p.na() + a) * p.nb() + b;
}

/// E-row entries of a strategy's column: one per live input pair.
inline void for_each_tuple(const Dist& p, const DetStrategy& s,
                           const std::function<void(int)>& visit) {
    for (int x = 0; x < p.nx(); ++x) {
        const int a = s.alice[static_cast<std::size_t>(x)];
        if (a == kAbort) continue;
        for (int y = 0; y < p.ny(); ++y) {
            const int b = s.bob[static_cast<std::size_t>(y)];
            if (b == kAbort) continue;
            visit(tuple_index(p, x, y, a, b));
        }
    }
}

inline bool side_all_abort(const std::vector<int>& side) {
    for (int v : side)
        if (v != kAbort) return false;
    return true;
}

/// Strategies whose column is identically zero (one side fully aborted).
inline bool is_junk(const DetStrategy& s) {
    return side_all_abort(s.alice) || side_all_abort(s.bob);
}

/// Colgen seed: the all-abort strategy (keeps every restricted master of the
/// maximization family feasible) plus all constant-output strategies.
inline std::vector<DetStrategy> seed_strategies(StrategyClass cls, const StrategyShape& sh,
                                                bool include_abort_seed) {
    std::vector<DetStrategy> out;
    if (include_abort_seed && cls != StrategyClass::no_abort) {
        DetStrategy s;
        s.cls = cls;
        s.alice.assign(static_cast<std::size_t>(sh.nx), kAbort);
        s.bob.assign(static_cast<std::size_t>(sh.ny),
                     cls == StrategyClass::both_abort ? kAbort : 0);
        out.push_back(std::move(s));
    }
    for (int a0 = 0; a0 < sh.na; ++a0)
        for (int b0 = 0; b0 < sh.nb; ++b0) {
            DetStrategy s;
            s.cls = cls;
            s.alice.assign(static_cast<std::size_t>(sh.nx), a0);
            s.bob.assign(static_cast<std::size_t>(sh.ny), b0);
            out.push_back(std::move(s));
        }
    return out;
}

inline void require_verified(const LinProgram& lp, const LinSolution& sol) {
    auto bad = check_optimality(lp, sol);
    if (!bad.empty())
        throw internal_error("LP solution failed verification: " + bad.front());
    if (sol.objective != sol.dual_objective)
        throw internal_error("strong duality violated");
}

/// Bell functional from the duals of the per-tuple equality rows.
inline BellFunctional functional_from_duals(const Dist& p, const std::vector<Rat>& dual,
                                            int e_base, bool negated) {
    BellFunctional f = zero_functional(p.nx(), p.ny(), p.na(), p.nb());
    for (int x = 0; x < p.nx(); ++x)
        for (int y = 0; y < p.ny(); ++y)
            for (int a = 0; a < p.na(); ++a)
                for (int b = 0; b < p.nb(); ++b) {
                    const Rat& v =
                        dual[static_cast<std::size_t>(e_base + tuple_index(p, x, y, a, b))];
                    if (v != 0) set_coeff(f, x, y, a, b, negated ? -v : v);
                }
    return f;
}

// ---- maximization family -------------------------------------------------

enum class EffVariant { plain, eps, eta, nc };

struct EffBuild {
    LinProgram lp;
    int zeta_var = -1;
    std::vector<int> q_vars;
    std::vector<int> zeta_xy_vars;  // eta/nc only
    int e_base = 0;                 // per-tuple equality rows come first
    int n_row = -1;                 // normalization row
};

inline EffBuild build_eff_lp(const Dist& p, const std::vector<DetStrategy>& cols,
                             EffVariant variant, const Rat& param) {
    const int nt = tuple_count(p);
    const int ninputs = p.nx() * p.ny();
    EffBuild b;
    b.lp.sense = Sense::maximize;
    b.zeta_var = b.lp.add_variable("zeta");
    b.lp.set_objective(b.zeta_var, Rat(1));

    std::vector<int> s_vars, e_vars;
    if (variant == EffVariant::eps) {
        for (int t = 0; t < nt; ++t) s_vars.push_back(b.lp.add_variable("s" + std::to_string(t)));
        for (int t = 0; t < nt; ++t) e_vars.push_back(b.lp.add_variable("e" + std::to_string(t)));
    }
    if (variant == EffVariant::eta || variant == EffVariant::nc)
        for (int i = 0; i < ninputs; ++i)
            b.zeta_xy_vars.push_back(b.lp.add_variable("zeta_xy" + std::to_string(i)));
    for (std::size_t j = 0; j < cols.size(); ++j)
        b.q_vars.push_back(b.lp.add_variable("q" + std::to_string(j)));

    // per-tuple strategy hits
    std::vector<std::vector<std::pair<int, Rat>>> row(static_cast<std::size_t>(nt));
    for (std::size_t j = 0; j < cols.size(); ++j)
        for_each_tuple(p, cols[j], [&](int t) {
            row[static_cast<std::size_t>(t)].emplace_back(b.q_vars[j], Rat(1));
        });

    // E rows, in tuple order (their duals are the certificate)
    for (int x = 0; x < p.nx(); ++x)
        for (int y = 0; y < p.ny(); ++y)
            for (int a = 0; a < p.na(); ++a)
                for (int b2 = 0; b2 < p.nb(); ++b2) {
                    const int t = tuple_index(p, x, y, a, b2);
                    auto coeffs = std::move(row[static_cast<std::size_t>(t)]);
                    const Rat pt = p.prob(x, y, a, b2);
                    switch (variant) {
                        case EffVariant::plain:
                            if (pt != 0) coeffs.emplace_back(b.zeta_var, -pt);
                            break;
                        case EffVariant::eps:
                            coeffs.emplace_back(s_vars[static_cast<std::size_t>(t)], Rat(-1));
                            break;
                        case EffVariant::eta:
                        case EffVariant::nc:
                            if (pt != 0)
                                coeffs.emplace_back(
                                    b.zeta_xy_vars[static_cast<std::size_t>(p.block_index(x, y))],
                                    -pt);
                            break;
                    }
                    b.lp.add_constraint(std::move(coeffs), Relation::eq, Rat(0),
                                        "E" + std::to_string(t));
                }

    if (variant == EffVariant::eps) {
        // per-input mass and error-budget rows
        for (int i = 0; i < ninputs; ++i) {
            std::vector<std::pair<int, Rat>> cs;
            for (int k = 0; k < p.na() * p.nb(); ++k)
                cs.emplace_back(s_vars[static_cast<std::size_t>(i * p.na() * p.nb() + k)], Rat(1));
            cs.emplace_back(b.zeta_var, Rat(-1));
            b.lp.add_constraint(std::move(cs), Relation::eq, Rat(0), "mass" + std::to_string(i));
        }
        for (int x = 0; x < p.nx(); ++x)
            for (int y = 0; y < p.ny(); ++y)
                for (int a = 0; a < p.na(); ++a)
                    for (int b2 = 0; b2 < p.nb(); ++b2) {
                        const int t = tuple_index(p, x, y, a, b2);
                        const Rat pt = p.prob(x, y, a, b2);
                        std::vector<std::pair<int, Rat>> up = {
                            {s_vars[static_cast<std::size_t>(t)], Rat(1)},
                            {e_vars[static_cast<std::size_t>(t)], Rat(-1)}};
                        if (pt != 0) up.emplace_back(b.zeta_var, -pt);
                        b.lp.add_constraint(std::move(up), Relation::le, Rat(0),
                                            "dev+" + std::to_string(t));
                        std::vector<std::pair<int, Rat>> dn = {
                            {s_vars[static_cast<std::size_t>(t)], Rat(-1)},
                            {e_vars[static_cast<std::size_t>(t)], Rat(-1)}};
                        if (pt != 0) dn.emplace_back(b.zeta_var, pt);
                        b.lp.add_constraint(std::move(dn), Relation::le, Rat(0),
                                            "dev-" + std::to_string(t));
                    }
        for (int i = 0; i < ninputs; ++i) {
            std::vector<std::pair<int, Rat>> cs;
            for (int k = 0; k < p.na() * p.nb(); ++k)
                cs.emplace_back(e_vars[static_cast<std::size_t>(i * p.na() * p.nb() + k)], Rat(1));
            if (param != 0) cs.emplace_back(b.zeta_var, -param);
            b.lp.add_constraint(std::move(cs), Relation::le, Rat(0), "budget" + std::to_string(i));
        }
    } else if (variant == EffVariant::eta) {
        for (int i = 0; i < ninputs; ++i) {
            b.lp.add_constraint({{b.zeta_xy_vars[static_cast<std::size_t>(i)], Rat(1)},
                                 {b.zeta_var, Rat(-1)}},
                                Relation::le, Rat(0), "cap" + std::to_string(i));
            b.lp.add_constraint({{b.zeta_var, param},
                                 {b.zeta_xy_vars[static_cast<std::size_t>(i)], Rat(-1)}},
                                Relation::le, Rat(0), "floor" + std::to_string(i));
        }
    } else if (variant == EffVariant::nc) {
        for (int i = 0; i < ninputs; ++i)
            b.lp.add_constraint({{b.zeta_var, Rat(1)},
                                 {b.zeta_xy_vars[static_cast<std::size_t>(i)], Rat(-1)}},
                                Relation::le, Rat(0), "floor" + std::to_string(i));
    }

    std::vector<std::pair<int, Rat>> norm;
    for (int q : b.q_vars) norm.emplace_back(q, Rat(1));
    b.n_row = b.lp.add_constraint(std::move(norm), Relation::eq, Rat(1), "norm");
    return b;
}

struct EffSolved {
    EffBuild build;
    LinSolution sol;
    std::vector<DetStrategy> cols;
    int rounds = 0;
};

inline EffSolved solve_eff_family(const Dist& p, StrategyClass cls, EffVariant variant,
                                  const Rat& param, const BoundOptions& opt) {
    const StrategyShape shape{p.nx(), p.ny(), p.na(), p.nb()};
    EffSolved out;
    if (!opt.column_generation) {
        out.cols = enumerate_all(cls, shape, opt.cap);
        out.build = build_eff_lp(p, out.cols, variant, param);
        out.sol = solve(out.build.lp, opt.lp);
        if (out.sol.status != SolveStatus::optimal)
            throw internal_error("efficiency LP must be solvable (all-abort point is feasible)");
        require_verified(out.build.lp, out.sol);
        return out;
    }
    out.cols = seed_strategies(cls, shape, /*include_abort_seed=*/true);
    for (;;) {
        out.build = build_eff_lp(p, out.cols, variant, param);
        out.sol = solve(out.build.lp, opt.lp);
        if (out.sol.status != SolveStatus::optimal)
            throw internal_error("restricted efficiency LP lost feasibility");
        require_verified(out.build.lp, out.sol);
        BellFunctional braw =
            functional_from_duals(p, out.sol.dual, out.build.e_base, /*negated=*/true);
        const Rat threshold = out.sol.dual[static_cast<std::size_t>(out.build.n_row)];
        BellMax m = max_bell_value(braw, cls, opt.pricing_cap);
        if (m.value <= threshold) break;  // no column prices out: globally optimal
        out.cols.push_back(m.witness);
        ++out.rounds;
    }
    return out;
}

inline BoundResult finish_eff_family(std::string name, const Dist& p, CertKind kind,
                                     EffSolved&& es) {
    BoundResult r;
    r.bound_name = std::move(name);
    r.colgen_rounds = es.rounds;
    const Rat zeta = es.sol.primal[static_cast<std::size_t>(es.build.zeta_var)];
    r.zeta = zeta;
    for (int v : es.build.zeta_xy_vars)
        r.zeta_per_input.push_back(es.sol.primal[static_cast<std::size_t>(v)]);
    Rat wsum = 0;
    for (std::size_t j = 0; j < es.cols.size(); ++j) {
        const Rat& w = es.sol.primal[static_cast<std::size_t>(es.build.q_vars[j])];
        if (w != 0) {
            r.weights.emplace_back(es.cols[j], w);
            wsum += w;
        }
    }
    if (wsum != 1) throw internal_error("strategy weights do not sum to 1");

    BellFunctional braw =
        functional_from_duals(p, es.sol.dual, es.build.e_base, /*negated=*/true);
    if (zeta == 0) {
        // No positive acceptance exists; the dual ray certifies any value.
        r.finite = false;
        r.bound_value = 0;
        const Rat claimed = bell_value(braw, p);
        if (claimed < 1) throw internal_error("dual ray value below 1");
        r.certificate = Certificate{kind, std::move(braw), claimed};
    } else {
        r.bound_value = Rat(1) / zeta;
        BellFunctional b1 = scale_functional(braw, Rat(1) / zeta);
        const Rat b1p = bell_value(b1, p);
        if (b1p < r.bound_value)
            throw internal_error("dual certificate value fell below the bound");
        // exact downward rescale: value becomes the bound, max stays <= 1
        r.certificate =
            Certificate{kind, scale_functional(b1, r.bound_value / b1p), r.bound_value};
    }
    r.solution = std::move(es.sol);
    return r;
}

}  // namespace bounddetail

/// eff: inverse of the best acceptance probability over BothAbort mixtures.
inline BoundResult eff_bound(const Dist& p, const BoundOptions& opt = {}) {
    using namespace bounddetail;
    return finish_eff_family(
        "eff", p, CertKind::inefficiency_resistant,
        solve_eff_family(p, StrategyClass::both_abort, EffVariant::plain, Rat(0), opt));
}

/// eff_eps: eff minimized over all tables within per-input L1 distance eps.
inline BoundResult eff_eps_bound(const Dist& p, const Rat& eps, const BoundOptions& opt = {}) {
    using namespace bounddetail;
    if (eps < 0 || eps > 2) throw input_error("eps must lie in [0, 2]");
    return finish_eff_family(
        "eff_eps", p, CertKind::inefficiency_resistant,
        solve_eff_family(p, StrategyClass::both_abort, EffVariant::eps, eps, opt));
}

/// eff_eta: per-input acceptance allowed to vary within [eta*zeta, zeta].
inline BoundResult eff_eta_bound(const Dist& p, const Rat& eta, const BoundOptions& opt = {}) {
    using namespace bounddetail;
    if (eta <= 0 || eta > 1) throw input_error("eta must lie in (0, 1]");
    return finish_eff_family(
        "eff_eta", p, CertKind::inefficiency_resistant,
        solve_eff_family(p, StrategyClass::both_abort, EffVariant::eta, eta, opt));
}

/// eff_nc: only the floor coupling zeta <= zeta_xy is kept.
inline BoundResult eff_nc_bound(const Dist& p, const BoundOptions& opt = {}) {
    using namespace bounddetail;
    return finish_eff_family(
        "eff_nc", p, CertKind::inefficiency_resistant,
        solve_eff_family(p, StrategyClass::both_abort, EffVariant::nc, Rat(0), opt));
}

/// eff over AliceAbort strategies. Infinite (finite == false) exactly when
/// Alice's marginal depends on y, since no one-way mixture can reproduce that
/// with positive acceptance.
inline BoundResult eff_oneway_bound(const Dist& p, const BoundOptions& opt = {}) {
    using namespace bounddetail;
    return finish_eff_family(
        "eff_oneway", p, CertKind::inefficiency_resistant_oneway,
        solve_eff_family(p, StrategyClass::alice_abort, EffVariant::plain, Rat(0), opt));
}

/// nu: minimal total variation of a signed mixture of NoAbort strategies.
inline BoundResult nu_bound(const Dist& p, const BoundOptions& opt = {}) {
    using namespace bounddetail;
    if (!is_nonsignaling(p))
        throw input_error("nu is defined for nonsignaling distributions");
    const StrategyShape shape{p.nx(), p.ny(), p.na(), p.nb()};
    const StrategyClass cls = StrategyClass::no_abort;
    const int nt = tuple_count(p);

    std::vector<DetStrategy> cols;
    // builds: min sum(qp + qm) s.t. per tuple sum (qp - qm) l = p
    struct Build {
        LinProgram lp;
        std::vector<int> qp, qm;
    };
    auto build = [&](const std::vector<DetStrategy>& cs) {
        Build b;
        b.lp.sense = Sense::minimize;
        for (std::size_t j = 0; j < cs.size(); ++j) {
            b.qp.push_back(b.lp.add_variable("qp" + std::to_string(j)));
            b.lp.set_objective(b.qp.back(), Rat(1));
            b.qm.push_back(b.lp.add_variable("qm" + std::to_string(j)));
            b.lp.set_objective(b.qm.back(), Rat(1));
        }
        std::vector<std::vector<std::pair<int, Rat>>> row(static_cast<std::size_t>(nt));
        for (std::size_t j = 0; j < cs.size(); ++j)
            for_each_tuple(p, cs[j], [&](int t) {
                row[static_cast<std::size_t>(t)].emplace_back(b.qp[j], Rat(1));
                row[static_cast<std::size_t>(t)].emplace_back(b.qm[j], Rat(-1));
            });
        for (int x = 0; x < p.nx(); ++x)
            for (int y = 0; y < p.ny(); ++y)
                for (int a = 0; a < p.na(); ++a)
                    for (int b2 = 0; b2 < p.nb(); ++b2) {
                        const int t = tuple_index(p, x, y, a, b2);
                        b.lp.add_constraint(std::move(row[static_cast<std::size_t>(t)]),
                                            Relation::eq, p.prob(x, y, a, b2),
                                            "E" + std::to_string(t));
                    }
        return b;
    };

    Build bld;
    LinSolution sol;
    int rounds = 0;
    if (!opt.column_generation) {
        cols = enumerate_all(cls, shape, opt.cap);
        bld = build(cols);
        sol = solve(bld.lp, opt.lp);
        if (sol.status != SolveStatus::optimal)
            throw internal_error("nonsignaling distribution outside the no-abort span");
        require_verified(bld.lp, sol);
    } else {
        cols = seed_strategies(cls, shape, /*include_abort_seed=*/false);
        for (;;) {
            bld = build(cols);
            sol = solve(bld.lp, opt.lp);
            if (sol.status == SolveStatus::infeasible) {
                // Farkas pricing: a new column must break the certificate.
                BellFunctional fy =
                    functional_from_duals(p, sol.farkas->row_multipliers, 0, false);
                BellMax mx = max_bell_value(fy, cls, opt.pricing_cap);
                if (mx.value > 0) {
                    cols.push_back(mx.witness);  // breaks it through the qm column
                } else {
                    BellMax mn = min_bell_value(fy, cls, opt.pricing_cap);
                    if (mn.value >= 0)
                        throw internal_error(
                            "nonsignaling distribution outside the no-abort span");
                    cols.push_back(mn.witness);
                }
                ++rounds;
                continue;
            }
            if (sol.status != SolveStatus::optimal)
                throw internal_error("nu master neither optimal nor infeasible");
            require_verified(bld.lp, sol);
            BellFunctional fy = functional_from_duals(p, sol.dual, 0, false);
            BellMax mx = max_bell_value(fy, cls, opt.pricing_cap);
            if (mx.value > 1) {
                cols.push_back(mx.witness);
                ++rounds;
                continue;
            }
            BellMax mn = min_bell_value(fy, cls, opt.pricing_cap);
            if (mn.value < -1) {
                cols.push_back(mn.witness);
                ++rounds;
                continue;
            }
            break;
        }
    }

    BoundResult r;
    r.bound_name = "nu";
    r.bound_value = sol.objective;
    r.colgen_rounds = rounds;
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const Rat net = sol.primal[static_cast<std::size_t>(bld.qp[j])] -
                        sol.primal[static_cast<std::size_t>(bld.qm[j])];
        if (net != 0) r.weights.emplace_back(cols[j], net);
    }
    BellFunctional by = functional_from_duals(p, sol.dual, 0, false);
    const Rat on_p = bell_value(by, p);
    if (on_p != sol.objective) throw internal_error("nu dual value drifted from the optimum");
    r.certificate = Certificate{CertKind::normalized, std::move(by), r.bound_value};
    r.solution = std::move(sol);
    return r;
}

/// prt: weighted rectangle/strategy cover with per-input acceptance in
/// [eta, 1]. At eta = 1 the LP simplifies to sum w*l = p exactly, and its
/// dual is an inefficiency-resistant certificate of the same value.
inline BoundResult prt_direct_bound(const Dist& p, const Rat& eta, const BoundOptions& opt = {}) {
    using namespace bounddetail;
    if (eta <= 0 || eta > 1) throw input_error("eta must lie in (0, 1]");
    const bool simplified = eta == 1;
    const StrategyShape shape{p.nx(), p.ny(), p.na(), p.nb()};
    const StrategyClass cls = StrategyClass::both_abort;
    const int nt = tuple_count(p);
    const int ninputs = p.nx() * p.ny();

    struct Build {
        LinProgram lp;
        std::vector<int> w_vars, h_vars;
    };
    auto build = [&](const std::vector<DetStrategy>& cs) {
        Build b;
        b.lp.sense = Sense::minimize;
        for (std::size_t j = 0; j < cs.size(); ++j) {
            b.w_vars.push_back(b.lp.add_variable("w" + std::to_string(j)));
            b.lp.set_objective(b.w_vars.back(), Rat(1));
        }
        if (!simplified)
            for (int i = 0; i < ninputs; ++i)
                b.h_vars.push_back(b.lp.add_variable("acc" + std::to_string(i), eta, Rat(1)));
        std::vector<std::vector<std::pair<int, Rat>>> row(static_cast<std::size_t>(nt));
        for (std::size_t j = 0; j < cs.size(); ++j)
            for_each_tuple(p, cs[j], [&](int t) {
                row[static_cast<std::size_t>(t)].emplace_back(b.w_vars[j], Rat(1));
            });
        for (int x = 0; x < p.nx(); ++x)
            for (int y = 0; y < p.ny(); ++y)
                for (int a = 0; a < p.na(); ++a)
                    for (int b2 = 0; b2 < p.nb(); ++b2) {
                        const int t = tuple_index(p, x, y, a, b2);
                        auto coeffs = std::move(row[static_cast<std::size_t>(t)]);
                        const Rat pt = p.prob(x, y, a, b2);
                        if (simplified) {
                            b.lp.add_constraint(std::move(coeffs), Relation::eq, pt,
                                                "E" + std::to_string(t));
                        } else {
                            if (pt != 0)
                                coeffs.emplace_back(
                                    b.h_vars[static_cast<std::size_t>(p.block_index(x, y))], -pt);
                            b.lp.add_constraint(std::move(coeffs), Relation::eq, Rat(0),
                                                "E" + std::to_string(t));
                        }
                    }
        return b;
    };

    std::vector<DetStrategy> cols;
    Build bld;
    LinSolution sol;
    int rounds = 0;
    if (!opt.column_generation) {
        for (const DetStrategy& s : enumerate_all(cls, shape, opt.cap))
            if (!is_junk(s)) cols.push_back(s);
        bld = build(cols);
        sol = solve(bld.lp, opt.lp);
        if (sol.status != SolveStatus::optimal)
            throw internal_error("partition LP unexpectedly unsolvable");
        require_verified(bld.lp, sol);
    } else {
        cols = seed_strategies(cls, shape, /*include_abort_seed=*/false);
        for (;;) {
            bld = build(cols);
            sol = solve(bld.lp, opt.lp);
            if (sol.status == SolveStatus::infeasible) {
                BellFunctional fy =
                    functional_from_duals(p, sol.farkas->row_multipliers, 0, false);
                BellMax mn = min_bell_value(fy, cls, opt.pricing_cap);
                if (mn.value >= 0)
                    throw internal_error("partition LP unexpectedly infeasible");
                cols.push_back(mn.witness);
                ++rounds;
                continue;
            }
            if (sol.status != SolveStatus::optimal)
                throw internal_error("partition master neither optimal nor infeasible");
            require_verified(bld.lp, sol);
            BellFunctional fy = functional_from_duals(p, sol.dual, 0, false);
            BellMax mx = max_bell_value(fy, cls, opt.pricing_cap);
            if (mx.value > 1) {
                cols.push_back(mx.witness);
                ++rounds;
                continue;
            }
            break;
        }
    }

    BoundResult r;
    r.bound_name = "prt";
    r.bound_value = sol.objective;
    r.colgen_rounds = rounds;
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const Rat& w = sol.primal[static_cast<std::size_t>(bld.w_vars[j])];
        if (w != 0) r.weights.emplace_back(cols[j], w);
    }
    for (int v : bld.h_vars) r.zeta_per_input.push_back(sol.primal[static_cast<std::size_t>(v)]);
    if (simplified) {
        BellFunctional by = functional_from_duals(p, sol.dual, 0, false);
        const Rat on_p = bell_value(by, p);
        if (on_p != sol.objective)
            throw internal_error("partition dual value drifted from the optimum");
        r.certificate =
            Certificate{CertKind::inefficiency_resistant, std::move(by), r.bound_value};
    }
    r.solution = std::move(sol);
    return r;
}

/// The change-of-variables path: w = q/zeta from the eff optimum is feasible
/// for the eta = 1 partition program with the same value. Kept alongside the
/// native LP so the two parametrizations cross-check each other exactly.
inline BoundResult prt_via_eff(const Dist& p, const BoundOptions& opt = {}) {
    using namespace bounddetail;
    BoundResult e = eff_bound(p, opt);
    const Rat zeta = *e.zeta;
    if (zeta == 0) throw internal_error("eff returned zero acceptance");
    BoundResult r;
    r.bound_name = "prt_via_eff";
    r.bound_value = e.bound_value;
    r.zeta = zeta;
    r.colgen_rounds = e.colgen_rounds;
    Rat total = 0;
    for (const auto& [s, q] : e.weights) {
        if (is_junk(s)) throw internal_error("junk strategy weighted at the eff optimum");
        r.weights.emplace_back(s, q / zeta);
        total += q / zeta;
    }
    if (total != r.bound_value)
        throw internal_error("transformed weights do not sum to the bound");
    // exact feasibility of the transformed point: sum w*l == p entrywise
    std::vector<Rat> acc(static_cast<std::size_t>(tuple_count(p)), Rat(0));
    for (const auto& [s, w] : r.weights)
        for_each_tuple(p, s, [&](int t) { acc[static_cast<std::size_t>(t)] += w; });
    for (int x = 0; x < p.nx(); ++x)
        for (int y = 0; y < p.ny(); ++y)
            for (int a = 0; a < p.na(); ++a)
                for (int b = 0; b < p.nb(); ++b)
                    if (acc[static_cast<std::size_t>(tuple_index(p, x, y, a, b))] !=
                        p.prob(x, y, a, b))
                        throw internal_error("transformed weights are not feasible");
    r.certificate = e.certificate;  // same functional certifies the same value
    r.solution = std::move(e.solution);
    return r;
}

// ---- function partition bound ---------------------------------------------

struct RectangleWeight {
    unsigned x_mask = 0, y_mask = 0;  // bit i set <=> input i in the rectangle
    int z = 0;
    Rat weight;
};

struct PartitionFnResult {
    std::string bound_name = "prt_function";
    Rat bound_value;
    std::vector<RectangleWeight> weights;  // nonzero only
    LinSolution solution;
};

/// Rectangle-cover LP for a (partial) function f : X x Y -> Z given
/// row-major with -1 marking inputs outside the domain. Columns are
/// (nonempty rectangle, output); correctness rows only on the domain.
inline PartitionFnResult prt_function_bound(const std::vector<int>& f, int nx, int ny, int nz,
                                            const Rat& eps, const BoundOptions& opt = {}) {
    if (nx < 1 || ny < 1 || nz < 1) throw input_error("function shape must be positive");
    if (nx > 20 || ny > 20) throw input_error("function inputs limited to 20 bits per side");
    if (static_cast<int>(f.size()) != nx * ny)
        throw input_error("function table has wrong size");
    for (int v : f)
        if (v < -1 || v >= nz)
            throw input_error("function value out of range (use -1 outside the domain)");
    if (eps < 0 || eps > 1) throw input_error("eps must lie in [0, 1]");

    const long long rect_cols =
        ((1LL << nx) - 1) * ((1LL << ny) - 1) * static_cast<long long>(nz);
    if (rect_cols > opt.cap)
        throw too_large_error("function partition LP has " + std::to_string(rect_cols) +
                              " columns, above the cap of " + std::to_string(opt.cap));

    LinProgram lp;
    lp.sense = Sense::minimize;
    std::vector<RectangleWeight> cols;
    std::vector<std::vector<std::pair<int, Rat>>> norm_row(
        static_cast<std::size_t>(nx * ny));
    std::vector<std::vector<std::pair<int, Rat>>> correct_row(
        static_cast<std::size_t>(nx * ny));
    for (unsigned xm = 1; xm < (1u << nx); ++xm)
        for (unsigned ym = 1; ym < (1u << ny); ++ym)
            for (int z = 0; z < nz; ++z) {
                const int var = lp.add_variable();
                lp.set_objective(var, Rat(1));
                cols.push_back({xm, ym, z, Rat(0)});
                for (int x = 0; x < nx; ++x) {
                    if (!(xm >> x & 1u)) continue;
                    for (int y = 0; y < ny; ++y) {
                        if (!(ym >> y & 1u)) continue;
                        const int cell = x * ny + y;
                        norm_row[static_cast<std::size_t>(cell)].emplace_back(var, Rat(1));
                        if (f[static_cast<std::size_t>(cell)] == z)
                            correct_row[static_cast<std::size_t>(cell)].emplace_back(var,
                                                                                     Rat(1));
                    }
                }
            }
    for (int cell = 0; cell < nx * ny; ++cell)
        lp.add_constraint(std::move(norm_row[static_cast<std::size_t>(cell)]), Relation::eq,
                          Rat(1), "norm" + std::to_string(cell));
    for (int cell = 0; cell < nx * ny; ++cell)
        if (f[static_cast<std::size_t>(cell)] >= 0)
            lp.add_constraint(std::move(correct_row[static_cast<std::size_t>(cell)]),
                              Relation::ge, Rat(1) - eps, "correct" + std::to_string(cell));

    LinSolution sol = solve(lp, opt.lp);
    if (sol.status != SolveStatus::optimal)
        throw internal_error("function partition LP unexpectedly unsolvable");
    bounddetail::require_verified(lp, sol);

    PartitionFnResult r;
    r.bound_value = sol.objective;
    for (std::size_t j = 0; j < cols.size(); ++j)
        if (sol.primal[j] != 0) {
            cols[j].weight = sol.primal[j];
            r.weights.push_back(cols[j]);
        }
    r.solution = std::move(sol);
    return r;
}

/// The certificate a bound carries, checked against the requested kind.
inline Certificate extract_certificate(const BoundResult& r, CertKind kind) {
    if (!r.certificate)
        throw input_error("bound \"" + r.bound_name + "\" carries no certificate");
    if (r.certificate->kind != kind)
        throw input_error("bound \"" + r.bound_name + "\" yields a " +
                          std::string(cert_kind_name(r.certificate->kind)) +
                          " certificate, not " + cert_kind_name(kind));
    return *r.certificate;
}

}  // namespace belleff
