#pragma once

// Exact rational linear programming.
//
// General-form programs (max/min, <=/==/>= rows, per-variable bounds
// including free and one-sided) are reduced to computational standard
// form and solved by primal simplex with Bland's anti-cycling rule, so
// every run terminates and is deterministic. Two engines share the
// reduction: a dense tableau (default below `dense_threshold` standard
// columns) and a revised simplex over sparse columns with an explicit
// rational basis inverse (used above the threshold, e.g. for
// column-generation masters with many columns).
//
// Every optimal solution carries exact duals and reduced costs;
// `check_optimality` re-verifies the full KKT system independently, so
// strong duality (primal objective == dual objective, exactly) can be
// asserted on every solve. Infeasible programs come back with a Farkas
// certificate over the rows and variable bounds, checkable by
// `check_infeasibility`.
//
// Dual sign conventions (what `check_optimality` enforces):
//   maximize: y_i >= 0 on <=-rows, y_i <= 0 on >=-rows, free on ==;
//             reduced cost r_j = c_j - y^T A_j satisfies r_j <= 0 where
//             x_j sits at its lower bound, r_j >= 0 at its upper bound,
//             r_j == 0 strictly between.
//   minimize: all of the above with every inequality flipped.
// In both senses:  objective == y.b + sum_j r_j x_j  (exact).

#include <algorithm>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "belleff/errors.hpp"
#include "belleff/rational.hpp"

namespace belleff {

enum class Sense { minimize, maximize };
enum class Relation { le, eq, ge };
enum class SolveStatus { optimal, infeasible, unbounded };

inline const char* relation_symbol(Relation r) {
    switch (r) {
        case Relation::le: return "<=";
        case Relation::eq: return "=";
        default: return ">=";
    }
}

struct LinProgram {
    struct Variable {
        std::string name;
        std::optional<Rat> lower; // nullopt = -inf
        std::optional<Rat> upper; // nullopt = +inf
    };
    struct Constraint {
        std::vector<std::pair<int, Rat>> coeffs; // sparse; absent means zero
        Relation rel = Relation::eq;
        Rat rhs;
        std::string name;
    };

    Sense sense = Sense::maximize;
    std::vector<Variable> vars;
    std::vector<Rat> objective; // dense, aligned with vars
    std::vector<Constraint> rows;

    /// Default bounds are [0, +inf).
    int add_variable(std::string name = "", std::optional<Rat> lower = Rat(0),
                     std::optional<Rat> upper = std::nullopt) {
        if (name.empty()) name = "x" + std::to_string(vars.size());
        vars.push_back({std::move(name), std::move(lower), std::move(upper)});
        objective.emplace_back(0);
        return static_cast<int>(vars.size()) - 1;
    }

    void set_objective(int var, const Rat& coef) {
        require_var(var);
        objective[static_cast<std::size_t>(var)] = coef;
    }

    int add_constraint(std::vector<std::pair<int, Rat>> coeffs, Relation rel, Rat rhs,
                       std::string name = "") {
        for (const auto& [v, c] : coeffs) {
            require_var(v);
            (void)c;
        }
        if (name.empty()) name = "c" + std::to_string(rows.size());
        rows.push_back({std::move(coeffs), rel, std::move(rhs), std::move(name)});
        return static_cast<int>(rows.size()) - 1;
    }

    int num_variables() const { return static_cast<int>(vars.size()); }
    int num_constraints() const { return static_cast<int>(rows.size()); }

    void require_var(int v) const {
        if (v < 0 || v >= num_variables())
            throw input_error("reference to undeclared variable id " + std::to_string(v));
    }
};

/// Multipliers proving infeasibility: aggregate rows (sign-conforming per
/// relation) plus variable-bound rows so that every variable cancels and
/// the combined right-hand side is negative.
struct FarkasCertificate {
    std::vector<Rat> row_multipliers;         // per constraint
    std::vector<Rat> upper_bound_multipliers; // per variable, for x_j <= ub_j
    std::vector<Rat> lower_bound_multipliers; // per variable, for -x_j <= -lb_j
};

struct LinSolution {
    SolveStatus status = SolveStatus::optimal;
    Rat objective;
    Rat dual_objective;
    std::vector<Rat> primal;        // per variable
    std::vector<Rat> dual;          // per constraint
    std::vector<Rat> reduced_costs; // per variable: c_j - y^T A_j
    std::optional<FarkasCertificate> farkas; // status == infeasible
    std::optional<std::vector<Rat>> ray;     // status == unbounded
    long iterations = 0;
    const char* engine = "";
};

struct SolveOptions {
    enum class Engine { automatic, dense, revised };
    Engine engine = Engine::automatic;
    int dense_threshold = 500; // standard-form columns below this use the tableau
    long max_pivots = 5'000'000;
};

namespace lpdetail {

// ---- standard form ------------------------------------------------------
// minimize c.x  s.t.  A x = b, x >= 0, b >= 0.

struct StdForm {
    int nrows = 0;
    std::vector<std::vector<std::pair<int, Rat>>> cols; // sparse columns
    std::vector<Rat> b;
    std::vector<Rat> c;
    std::vector<int> slack_of_row; // column index or -1 (usable as initial basis if coef +1)

    // user-variable recovery: x_user = shift + sign*(x[col_a]) or split col_a - col_b
    struct VMap {
        enum Kind { shifted, flipped, split } kind = shifted;
        int col_a = -1, col_b = -1;
        Rat shift;
    };
    std::vector<VMap> vmap;
    std::vector<int> row_sigma; // +1/-1: whole row negated to make b >= 0
    int n_user_rows = 0;
    std::vector<int> ub_row_of_var; // index of the appended "x <= ub" row, or -1

    int add_col(const Rat& cost) {
        cols.emplace_back();
        c.push_back(cost);
        return static_cast<int>(cols.size()) - 1;
    }
};

struct BoundContradiction {
    int var;
};

// Returns the standard form, or a trivial bound contradiction (lb > ub).
inline std::variant<StdForm, BoundContradiction> build_standard_form(const LinProgram& lp) {
    StdForm sf;
    const bool maximize = lp.sense == Sense::maximize;
    const int nv = lp.num_variables();
    sf.vmap.resize(static_cast<std::size_t>(nv));
    sf.ub_row_of_var.assign(static_cast<std::size_t>(nv), -1);

    struct PendingUbRow {
        int col;
        Rat cap;
        int var;
    };
    std::vector<PendingUbRow> ub_rows;

    for (int j = 0; j < nv; ++j) {
        const auto& v = lp.vars[static_cast<std::size_t>(j)];
        const Rat cost = maximize ? Rat(-lp.objective[static_cast<std::size_t>(j)])
                                  : lp.objective[static_cast<std::size_t>(j)];
        auto& m = sf.vmap[static_cast<std::size_t>(j)];
        if (v.lower && v.upper && *v.lower > *v.upper) return BoundContradiction{j};
        if (v.lower) {
            m.kind = StdForm::VMap::shifted;
            m.shift = *v.lower;
            m.col_a = sf.add_col(cost);
            if (v.upper) ub_rows.push_back({m.col_a, Rat(*v.upper - *v.lower), j});
        } else if (v.upper) {
            m.kind = StdForm::VMap::flipped;
            m.shift = *v.upper;
            m.col_a = sf.add_col(Rat(-cost));
        } else {
            m.kind = StdForm::VMap::split;
            m.col_a = sf.add_col(cost);
            m.col_b = sf.add_col(Rat(-cost));
        }
    }

    // User constraints: substitute the variable transforms, add slacks,
    // then normalize the right-hand side to be nonnegative.
    sf.n_user_rows = lp.num_constraints();
    const int total_rows = sf.n_user_rows + static_cast<int>(ub_rows.size());
    sf.b.assign(static_cast<std::size_t>(total_rows), Rat(0));
    sf.row_sigma.assign(static_cast<std::size_t>(total_rows), 1);
    sf.slack_of_row.assign(static_cast<std::size_t>(total_rows), -1);

    struct RowBuild {
        std::vector<std::pair<int, Rat>> entries; // (col, coef) pre-negation
    };
    std::vector<RowBuild> rb(static_cast<std::size_t>(total_rows));

    for (int i = 0; i < sf.n_user_rows; ++i) {
        const auto& row = lp.rows[static_cast<std::size_t>(i)];
        Rat rhs = row.rhs;
        // merge duplicate variable mentions first
        std::vector<Rat> dense_coef;
        std::vector<int> touched;
        dense_coef.assign(static_cast<std::size_t>(nv), Rat(0));
        for (const auto& [v, a] : row.coeffs) {
            if (dense_coef[static_cast<std::size_t>(v)] == 0 && a != 0) touched.push_back(v);
            dense_coef[static_cast<std::size_t>(v)] += a;
        }
        std::sort(touched.begin(), touched.end());
        for (int v : touched) {
            const Rat& a = dense_coef[static_cast<std::size_t>(v)];
            if (a == 0) continue;
            const auto& m = sf.vmap[static_cast<std::size_t>(v)];
            switch (m.kind) {
                case StdForm::VMap::shifted:
                    rhs -= a * m.shift;
                    rb[static_cast<std::size_t>(i)].entries.emplace_back(m.col_a, a);
                    break;
                case StdForm::VMap::flipped:
                    rhs -= a * m.shift;
                    rb[static_cast<std::size_t>(i)].entries.emplace_back(m.col_a, Rat(-a));
                    break;
                case StdForm::VMap::split:
                    rb[static_cast<std::size_t>(i)].entries.emplace_back(m.col_a, a);
                    rb[static_cast<std::size_t>(i)].entries.emplace_back(m.col_b, Rat(-a));
                    break;
            }
        }
        if (row.rel != Relation::eq) {
            const int s = sf.add_col(Rat(0));
            sf.slack_of_row[static_cast<std::size_t>(i)] = s;
            rb[static_cast<std::size_t>(i)].entries.emplace_back(
                s, Rat(row.rel == Relation::le ? 1 : -1));
        }
        sf.b[static_cast<std::size_t>(i)] = rhs;
    }
    for (std::size_t k = 0; k < ub_rows.size(); ++k) {
        const int i = sf.n_user_rows + static_cast<int>(k);
        const int s = sf.add_col(Rat(0));
        sf.slack_of_row[static_cast<std::size_t>(i)] = s;
        rb[static_cast<std::size_t>(i)].entries.emplace_back(ub_rows[k].col, Rat(1));
        rb[static_cast<std::size_t>(i)].entries.emplace_back(s, Rat(1));
        sf.b[static_cast<std::size_t>(i)] = ub_rows[k].cap; // >= 0 by the lb<=ub check
        sf.ub_row_of_var[static_cast<std::size_t>(ub_rows[k].var)] = i;
    }

    sf.nrows = total_rows;
    for (int i = 0; i < total_rows; ++i) {
        if (sf.b[static_cast<std::size_t>(i)] < 0) {
            sf.row_sigma[static_cast<std::size_t>(i)] = -1;
            sf.b[static_cast<std::size_t>(i)] = -sf.b[static_cast<std::size_t>(i)];
            for (auto& [col, coef] : rb[static_cast<std::size_t>(i)].entries) {
                (void)col;
                coef = -coef;
            }
        }
    }
    for (int i = 0; i < total_rows; ++i)
        for (const auto& [col, coef] : rb[static_cast<std::size_t>(i)].entries)
            if (coef != 0) sf.cols[static_cast<std::size_t>(col)].emplace_back(i, coef);
    return sf;
}

// ---- engine result ------------------------------------------------------

struct EngineResult {
    SolveStatus status = SolveStatus::optimal;
    std::vector<Rat> x;     // standard-form primal (structural+slack columns)
    std::vector<Rat> y;     // standard-form row duals (phase II, or phase I if infeasible)
    std::vector<Rat> ray;   // standard-form ray if unbounded
    long iterations = 0;
};

// ---- dense tableau engine ------------------------------------------------

inline EngineResult solve_dense(const StdForm& sf, long max_pivots) {
    const int m = sf.nrows;
    const int n = static_cast<int>(sf.cols.size());
    const int ntot = n + m; // artificial columns appended for every row
    std::vector<std::vector<Rat>> T(static_cast<std::size_t>(m),
                                    std::vector<Rat>(static_cast<std::size_t>(ntot), Rat(0)));
    std::vector<Rat> rhs = sf.b;
    for (int j = 0; j < n; ++j)
        for (const auto& [i, a] : sf.cols[static_cast<std::size_t>(j)])
            T[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = a;
    for (int i = 0; i < m; ++i) T[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + i)] = 1;

    std::vector<int> basis(static_cast<std::size_t>(m));
    std::vector<char> is_artificial(static_cast<std::size_t>(ntot), 0);
    for (int i = 0; i < m; ++i) is_artificial[static_cast<std::size_t>(n + i)] = 1;
    std::vector<char> frozen(static_cast<std::size_t>(ntot), 0); // artificials out of basis

    // Initial basis: a row's own slack when it survived rhs-negation with +1.
    std::vector<char> art_in_use(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < m; ++i) {
        const int s = sf.slack_of_row[static_cast<std::size_t>(i)];
        bool ok = false;
        if (s >= 0) {
            const auto& col = sf.cols[static_cast<std::size_t>(s)];
            ok = col.size() == 1 && col[0].first == i && col[0].second == 1;
        }
        if (ok) {
            basis[static_cast<std::size_t>(i)] = s;
        } else {
            basis[static_cast<std::size_t>(i)] = n + i;
            art_in_use[static_cast<std::size_t>(i)] = 1;
        }
    }
    for (int i = 0; i < m; ++i)
        if (!art_in_use[static_cast<std::size_t>(i)]) frozen[static_cast<std::size_t>(n + i)] = 1;

    long iterations = 0;
    std::vector<Rat> cost_row(static_cast<std::size_t>(ntot), Rat(0));

    auto pivot = [&](int pr, int pc) {
        auto& prow = T[static_cast<std::size_t>(pr)];
        const Rat pv = prow[static_cast<std::size_t>(pc)];
        for (auto& e : prow) e /= pv;
        rhs[static_cast<std::size_t>(pr)] /= pv;
        for (int i = 0; i < m; ++i) {
            if (i == pr) continue;
            Rat f = T[static_cast<std::size_t>(i)][static_cast<std::size_t>(pc)];
            if (f == 0) continue;
            auto& row = T[static_cast<std::size_t>(i)];
            for (int j = 0; j < ntot; ++j)
                if (prow[static_cast<std::size_t>(j)] != 0)
                    row[static_cast<std::size_t>(j)] -= f * prow[static_cast<std::size_t>(j)];
            rhs[static_cast<std::size_t>(i)] -= f * rhs[static_cast<std::size_t>(pr)];
        }
        Rat f = cost_row[static_cast<std::size_t>(pc)];
        if (f != 0)
            for (int j = 0; j < ntot; ++j)
                if (prow[static_cast<std::size_t>(j)] != 0)
                    cost_row[static_cast<std::size_t>(j)] -= f * prow[static_cast<std::size_t>(j)];
        basis[static_cast<std::size_t>(pr)] = pc;
    };

    auto rebuild_cost_row = [&](const std::vector<Rat>& c) {
        // reduced costs r_j = c_j - c_B^T (B^-1 A)_j over the updated tableau
        std::fill(cost_row.begin(), cost_row.end(), Rat(0));
        for (int j = 0; j < ntot; ++j) cost_row[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j)];
        for (int i = 0; i < m; ++i) {
            const Rat cb = c[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])];
            if (cb == 0) continue;
            const auto& row = T[static_cast<std::size_t>(i)];
            for (int j = 0; j < ntot; ++j)
                if (row[static_cast<std::size_t>(j)] != 0)
                    cost_row[static_cast<std::size_t>(j)] -= cb * row[static_cast<std::size_t>(j)];
        }
    };

    // Bland: entering = lowest-index eligible column with negative reduced
    // cost; leaving = lowest basic-variable index among the ratio minima.
    auto run_phase = [&](bool allow_artificials) -> std::optional<int> /*unbounded col*/ {
        for (;;) {
            int enter = -1;
            for (int j = 0; j < ntot; ++j) {
                if (frozen[static_cast<std::size_t>(j)]) continue;
                if (!allow_artificials && is_artificial[static_cast<std::size_t>(j)]) continue;
                if (cost_row[static_cast<std::size_t>(j)] < 0) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return std::nullopt;
            int leave_row = -1;
            Rat best;
            for (int i = 0; i < m; ++i) {
                const Rat& t = T[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
                if (t <= 0) continue;
                Rat ratio = rhs[static_cast<std::size_t>(i)] / t;
                if (leave_row < 0 || ratio < best ||
                    (ratio == best && basis[static_cast<std::size_t>(i)] <
                                          basis[static_cast<std::size_t>(leave_row)])) {
                    best = ratio;
                    leave_row = i;
                }
            }
            if (leave_row < 0) return enter; // unbounded direction
            const int leaving_col = basis[static_cast<std::size_t>(leave_row)];
            pivot(leave_row, enter);
            if (is_artificial[static_cast<std::size_t>(leaving_col)])
                frozen[static_cast<std::size_t>(leaving_col)] = 1;
            if (++iterations > max_pivots)
                throw internal_error("simplex pivot limit exceeded (dense engine)");
        }
    };

    EngineResult res;
    // Phase I
    std::vector<Rat> cI(static_cast<std::size_t>(ntot), Rat(0));
    for (int i = 0; i < m; ++i) cI[static_cast<std::size_t>(n + i)] = 1;
    rebuild_cost_row(cI);
    if (run_phase(true)) throw internal_error("phase I reported unbounded");
    Rat phase1 = 0;
    for (int i = 0; i < m; ++i)
        if (is_artificial[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])])
            phase1 += rhs[static_cast<std::size_t>(i)];
    res.iterations = iterations;
    if (phase1 > 0) {
        res.status = SolveStatus::infeasible;
        // y = cI_B B^-1, read off the artificial columns: y_i = 1 - r_i.
        res.y.assign(static_cast<std::size_t>(m), Rat(0));
        for (int i = 0; i < m; ++i)
            res.y[static_cast<std::size_t>(i)] =
                Rat(1) - cost_row[static_cast<std::size_t>(n + i)];
        return res;
    }
    // Drive artificials out of the basis (degenerate pivots; redundant rows
    // keep their artificial pinned at zero and never interact again).
    for (int i = 0; i < m; ++i) {
        const int bcol = basis[static_cast<std::size_t>(i)];
        if (!is_artificial[static_cast<std::size_t>(bcol)]) continue;
        for (int j = 0; j < n; ++j) {
            if (T[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != 0) {
                pivot(i, j);
                frozen[static_cast<std::size_t>(bcol)] = 1;
                break;
            }
        }
    }

    // Phase II
    std::vector<Rat> cII(static_cast<std::size_t>(ntot), Rat(0));
    for (int j = 0; j < n; ++j) cII[static_cast<std::size_t>(j)] = sf.c[static_cast<std::size_t>(j)];
    rebuild_cost_row(cII);
    if (auto unb = run_phase(false)) {
        res.status = SolveStatus::unbounded;
        res.iterations = iterations;
        res.ray.assign(static_cast<std::size_t>(n), Rat(0));
        res.ray[static_cast<std::size_t>(*unb)] = 1;
        for (int i = 0; i < m; ++i) {
            const int bc = basis[static_cast<std::size_t>(i)];
            if (bc < n)
                res.ray[static_cast<std::size_t>(bc)] =
                    -T[static_cast<std::size_t>(i)][static_cast<std::size_t>(*unb)];
        }
        return res;
    }
    res.status = SolveStatus::optimal;
    res.iterations = iterations;
    res.x.assign(static_cast<std::size_t>(n), Rat(0));
    for (int i = 0; i < m; ++i) {
        const int bc = basis[static_cast<std::size_t>(i)];
        if (bc < n) res.x[static_cast<std::size_t>(bc)] = rhs[static_cast<std::size_t>(i)];
    }
    res.y.assign(static_cast<std::size_t>(m), Rat(0));
    for (int i = 0; i < m; ++i)
        res.y[static_cast<std::size_t>(i)] = -cost_row[static_cast<std::size_t>(n + i)];
    return res;
}

// ---- revised simplex engine (sparse columns, dense basis inverse) --------

inline EngineResult solve_revised(const StdForm& sf, long max_pivots) {
    const int m = sf.nrows;
    const int n = static_cast<int>(sf.cols.size());
    const int ntot = n + m;

    auto col_entries = [&](int j) -> std::vector<std::pair<int, Rat>> {
        if (j < n) return sf.cols[static_cast<std::size_t>(j)];
        return {{j - n, Rat(1)}};
    };

    std::vector<std::vector<Rat>> Binv(static_cast<std::size_t>(m),
                                       std::vector<Rat>(static_cast<std::size_t>(m), Rat(0)));
    for (int i = 0; i < m; ++i) Binv[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
    std::vector<int> basis(static_cast<std::size_t>(m));
    std::vector<char> frozen(static_cast<std::size_t>(ntot), 0);
    std::vector<char> in_basis(static_cast<std::size_t>(ntot), 0);

    for (int i = 0; i < m; ++i) {
        const int s = sf.slack_of_row[static_cast<std::size_t>(i)];
        bool ok = false;
        if (s >= 0) {
            const auto& col = sf.cols[static_cast<std::size_t>(s)];
            ok = col.size() == 1 && col[0].first == i && col[0].second == 1;
        }
        basis[static_cast<std::size_t>(i)] = ok ? s : n + i;
    }
    for (int i = 0; i < m; ++i) in_basis[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] = 1;
    for (int i = 0; i < m; ++i)
        if (!in_basis[static_cast<std::size_t>(n + i)]) frozen[static_cast<std::size_t>(n + i)] = 1;

    std::vector<Rat> xB(static_cast<std::size_t>(m));
    auto recompute_xB = [&] {
        for (int i = 0; i < m; ++i) {
            Rat s = 0;
            for (int k = 0; k < m; ++k)
                if (Binv[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] != 0)
                    s += Binv[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                         sf.b[static_cast<std::size_t>(k)];
            xB[static_cast<std::size_t>(i)] = s;
        }
    };
    recompute_xB();

    long iterations = 0;

    auto dual_vector = [&](const std::vector<Rat>& c) {
        std::vector<Rat> y(static_cast<std::size_t>(m), Rat(0));
        for (int i = 0; i < m; ++i) {
            const Rat& cb = c[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])];
            if (cb == 0) continue;
            for (int k = 0; k < m; ++k)
                if (Binv[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] != 0)
                    y[static_cast<std::size_t>(k)] +=
                        cb * Binv[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        }
        return y;
    };

    auto run_phase = [&](const std::vector<Rat>& c,
                         bool allow_artificials) -> std::optional<std::pair<int, std::vector<Rat>>> {
        for (;;) {
            const std::vector<Rat> y = dual_vector(c);
            int enter = -1;
            for (int j = 0; j < ntot; ++j) {
                if (in_basis[static_cast<std::size_t>(j)] || frozen[static_cast<std::size_t>(j)])
                    continue;
                if (!allow_artificials && j >= n) continue;
                Rat rc = c[static_cast<std::size_t>(j)];
                for (const auto& [i, a] : col_entries(j)) rc -= y[static_cast<std::size_t>(i)] * a;
                if (rc < 0) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return std::nullopt;
            // direction u = B^-1 A_enter
            std::vector<Rat> u(static_cast<std::size_t>(m), Rat(0));
            for (const auto& [i, a] : col_entries(enter))
                for (int r = 0; r < m; ++r)
                    if (Binv[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] != 0)
                        u[static_cast<std::size_t>(r)] +=
                            Binv[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] * a;
            int leave = -1;
            Rat best;
            for (int i = 0; i < m; ++i) {
                if (u[static_cast<std::size_t>(i)] <= 0) continue;
                Rat ratio = xB[static_cast<std::size_t>(i)] / u[static_cast<std::size_t>(i)];
                if (leave < 0 || ratio < best ||
                    (ratio == best &&
                     basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave < 0) return std::make_pair(enter, std::move(u));
            const int leaving_col = basis[static_cast<std::size_t>(leave)];
            // pivot: update Binv and xB
            const Rat piv = u[static_cast<std::size_t>(leave)];
            auto& prow = Binv[static_cast<std::size_t>(leave)];
            for (auto& e : prow) e /= piv;
            xB[static_cast<std::size_t>(leave)] /= piv;
            for (int i = 0; i < m; ++i) {
                if (i == leave) continue;
                const Rat f = u[static_cast<std::size_t>(i)];
                if (f == 0) continue;
                auto& row = Binv[static_cast<std::size_t>(i)];
                for (int k = 0; k < m; ++k)
                    if (prow[static_cast<std::size_t>(k)] != 0)
                        row[static_cast<std::size_t>(k)] -= f * prow[static_cast<std::size_t>(k)];
                xB[static_cast<std::size_t>(i)] -= f * xB[static_cast<std::size_t>(leave)];
            }
            basis[static_cast<std::size_t>(leave)] = enter;
            in_basis[static_cast<std::size_t>(leaving_col)] = 0;
            in_basis[static_cast<std::size_t>(enter)] = 1;
            if (leaving_col >= n) frozen[static_cast<std::size_t>(leaving_col)] = 1;
            if (++iterations > max_pivots)
                throw internal_error("simplex pivot limit exceeded (revised engine)");
        }
    };

    EngineResult res;
    std::vector<Rat> cI(static_cast<std::size_t>(ntot), Rat(0));
    for (int i = 0; i < m; ++i) cI[static_cast<std::size_t>(n + i)] = 1;
    if (run_phase(cI, true)) throw internal_error("phase I reported unbounded");
    Rat phase1 = 0;
    for (int i = 0; i < m; ++i)
        if (basis[static_cast<std::size_t>(i)] >= n) phase1 += xB[static_cast<std::size_t>(i)];
    res.iterations = iterations;
    if (phase1 > 0) {
        res.status = SolveStatus::infeasible;
        res.y = dual_vector(cI);
        return res;
    }
    for (int i = 0; i < m; ++i) {
        if (basis[static_cast<std::size_t>(i)] < n) continue;
        // degenerate drive-out: any structural column with u_i != 0
        for (int j = 0; j < n; ++j) {
            if (in_basis[static_cast<std::size_t>(j)]) continue;
            Rat ui = 0;
            for (const auto& [r, a] : sf.cols[static_cast<std::size_t>(j)])
                if (Binv[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)] != 0)
                    ui += Binv[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)] * a;
            if (ui == 0) continue;
            // pivot j into row i (xB_i == 0, so this is a zero-length step)
            std::vector<Rat> u(static_cast<std::size_t>(m), Rat(0));
            for (const auto& [r, a] : sf.cols[static_cast<std::size_t>(j)])
                for (int rr = 0; rr < m; ++rr)
                    if (Binv[static_cast<std::size_t>(rr)][static_cast<std::size_t>(r)] != 0)
                        u[static_cast<std::size_t>(rr)] +=
                            Binv[static_cast<std::size_t>(rr)][static_cast<std::size_t>(r)] * a;
            const int old = basis[static_cast<std::size_t>(i)];
            const Rat piv = u[static_cast<std::size_t>(i)];
            auto& prow = Binv[static_cast<std::size_t>(i)];
            for (auto& e : prow) e /= piv;
            xB[static_cast<std::size_t>(i)] /= piv;
            for (int r = 0; r < m; ++r) {
                if (r == i) continue;
                const Rat f = u[static_cast<std::size_t>(r)];
                if (f == 0) continue;
                auto& row = Binv[static_cast<std::size_t>(r)];
                for (int k = 0; k < m; ++k)
                    if (prow[static_cast<std::size_t>(k)] != 0)
                        row[static_cast<std::size_t>(k)] -= f * prow[static_cast<std::size_t>(k)];
                xB[static_cast<std::size_t>(r)] -= f * xB[static_cast<std::size_t>(i)];
            }
            basis[static_cast<std::size_t>(i)] = j;
            in_basis[static_cast<std::size_t>(old)] = 0;
            in_basis[static_cast<std::size_t>(j)] = 1;
            frozen[static_cast<std::size_t>(old)] = 1;
            break;
        }
    }

    std::vector<Rat> cII(static_cast<std::size_t>(ntot), Rat(0));
    for (int j = 0; j < n; ++j) cII[static_cast<std::size_t>(j)] = sf.c[static_cast<std::size_t>(j)];
    if (auto unb = run_phase(cII, false)) {
        res.status = SolveStatus::unbounded;
        res.iterations = iterations;
        res.ray.assign(static_cast<std::size_t>(n), Rat(0));
        res.ray[static_cast<std::size_t>(unb->first)] = 1;
        for (int i = 0; i < m; ++i) {
            const int bc = basis[static_cast<std::size_t>(i)];
            if (bc < n) res.ray[static_cast<std::size_t>(bc)] = -unb->second[static_cast<std::size_t>(i)];
        }
        return res;
    }
    res.status = SolveStatus::optimal;
    res.iterations = iterations;
    res.x.assign(static_cast<std::size_t>(n), Rat(0));
    for (int i = 0; i < m; ++i) {
        const int bc = basis[static_cast<std::size_t>(i)];
        if (bc < n) res.x[static_cast<std::size_t>(bc)] = xB[static_cast<std::size_t>(i)];
    }
    res.y = dual_vector(cII);
    return res;
}

} // namespace lpdetail

inline std::vector<std::string> check_infeasibility(const LinProgram& lp,
                                                    const FarkasCertificate& fc);

/// Solve to proven optimality / infeasibility / unboundedness.
inline LinSolution solve(const LinProgram& lp, const SolveOptions& opts = {}) {
    using namespace lpdetail;
    const bool maximize = lp.sense == Sense::maximize;

    auto built = build_standard_form(lp);
    if (std::holds_alternative<BoundContradiction>(built)) {
        const int j = std::get<BoundContradiction>(built).var;
        LinSolution sol;
        sol.status = SolveStatus::infeasible;
        FarkasCertificate fc;
        fc.row_multipliers.assign(static_cast<std::size_t>(lp.num_constraints()), Rat(0));
        fc.upper_bound_multipliers.assign(static_cast<std::size_t>(lp.num_variables()), Rat(0));
        fc.lower_bound_multipliers.assign(static_cast<std::size_t>(lp.num_variables()), Rat(0));
        fc.upper_bound_multipliers[static_cast<std::size_t>(j)] = 1;
        fc.lower_bound_multipliers[static_cast<std::size_t>(j)] = 1;
        sol.farkas = std::move(fc);
        sol.engine = "presolve";
        return sol;
    }
    const StdForm& sf = std::get<StdForm>(built);

    const bool use_dense =
        opts.engine == SolveOptions::Engine::dense ||
        (opts.engine == SolveOptions::Engine::automatic &&
         static_cast<int>(sf.cols.size()) < opts.dense_threshold);
    EngineResult er = use_dense ? solve_dense(sf, opts.max_pivots)
                                : solve_revised(sf, opts.max_pivots);

    LinSolution sol;
    sol.iterations = er.iterations;
    sol.engine = use_dense ? "dense" : "revised";
    const int nv = lp.num_variables();
    const int nc = lp.num_constraints();

    if (er.status == SolveStatus::infeasible) {
        sol.status = SolveStatus::infeasible;
        // Map phase-I duals into a checkable Farkas certificate.
        FarkasCertificate fc;
        fc.row_multipliers.assign(static_cast<std::size_t>(nc), Rat(0));
        fc.upper_bound_multipliers.assign(static_cast<std::size_t>(nv), Rat(0));
        fc.lower_bound_multipliers.assign(static_cast<std::size_t>(nv), Rat(0));
        for (int i = 0; i < nc; ++i)
            fc.row_multipliers[static_cast<std::size_t>(i)] =
                Rat(-sf.row_sigma[static_cast<std::size_t>(i)]) * er.y[static_cast<std::size_t>(i)];
        for (int j = 0; j < nv; ++j) {
            const int ur = sf.ub_row_of_var[static_cast<std::size_t>(j)];
            if (ur >= 0) fc.upper_bound_multipliers[static_cast<std::size_t>(j)] =
                Rat(-er.y[static_cast<std::size_t>(ur)]);
        }
        // Close each variable with its lower-bound row so coefficients cancel;
        // flipped variables (upper bound only) close against the upper bound.
        for (int j = 0; j < nv; ++j) {
            const auto& m = sf.vmap[static_cast<std::size_t>(j)];
            Rat agg = 0; // sum_i y_farkas_i a_ij + already-assigned bound parts
            for (int i = 0; i < nc; ++i) {
                const auto& row = lp.rows[static_cast<std::size_t>(i)];
                for (const auto& [v, a] : row.coeffs)
                    if (v == j) agg += fc.row_multipliers[static_cast<std::size_t>(i)] * a;
            }
            agg += fc.upper_bound_multipliers[static_cast<std::size_t>(j)];
            agg -= fc.lower_bound_multipliers[static_cast<std::size_t>(j)];
            if (agg == 0) continue;
            if (m.kind == StdForm::VMap::flipped) {
                // only an upper bound exists; fold the residual there
                fc.upper_bound_multipliers[static_cast<std::size_t>(j)] -= agg;
            } else {
                fc.lower_bound_multipliers[static_cast<std::size_t>(j)] += agg;
            }
        }
        sol.farkas = std::move(fc);
        if (!check_infeasibility(lp, *sol.farkas).empty())
            throw internal_error("constructed Farkas certificate failed verification");
        return sol;
    }

    if (er.status == SolveStatus::unbounded) {
        sol.status = SolveStatus::unbounded;
        std::vector<Rat> ray(static_cast<std::size_t>(nv), Rat(0));
        for (int j = 0; j < nv; ++j) {
            const auto& m = sf.vmap[static_cast<std::size_t>(j)];
            switch (m.kind) {
                case StdForm::VMap::shifted:
                    ray[static_cast<std::size_t>(j)] = er.ray[static_cast<std::size_t>(m.col_a)];
                    break;
                case StdForm::VMap::flipped:
                    ray[static_cast<std::size_t>(j)] = -er.ray[static_cast<std::size_t>(m.col_a)];
                    break;
                case StdForm::VMap::split:
                    ray[static_cast<std::size_t>(j)] = er.ray[static_cast<std::size_t>(m.col_a)] -
                                                       er.ray[static_cast<std::size_t>(m.col_b)];
                    break;
            }
        }
        sol.ray = std::move(ray);
        return sol;
    }

    sol.status = SolveStatus::optimal;
    sol.primal.assign(static_cast<std::size_t>(nv), Rat(0));
    for (int j = 0; j < nv; ++j) {
        const auto& m = sf.vmap[static_cast<std::size_t>(j)];
        switch (m.kind) {
            case StdForm::VMap::shifted:
                sol.primal[static_cast<std::size_t>(j)] =
                    m.shift + er.x[static_cast<std::size_t>(m.col_a)];
                break;
            case StdForm::VMap::flipped:
                sol.primal[static_cast<std::size_t>(j)] =
                    m.shift - er.x[static_cast<std::size_t>(m.col_a)];
                break;
            case StdForm::VMap::split:
                sol.primal[static_cast<std::size_t>(j)] = er.x[static_cast<std::size_t>(m.col_a)] -
                                                          er.x[static_cast<std::size_t>(m.col_b)];
                break;
        }
    }
    sol.dual.assign(static_cast<std::size_t>(nc), Rat(0));
    for (int i = 0; i < nc; ++i) {
        const Rat ystd = er.y[static_cast<std::size_t>(i)];
        const int sigma = sf.row_sigma[static_cast<std::size_t>(i)];
        sol.dual[static_cast<std::size_t>(i)] = maximize ? Rat(-sigma) * ystd : Rat(sigma) * ystd;
    }
    sol.objective = 0;
    for (int j = 0; j < nv; ++j)
        sol.objective += lp.objective[static_cast<std::size_t>(j)] * sol.primal[static_cast<std::size_t>(j)];
    sol.reduced_costs.assign(static_cast<std::size_t>(nv), Rat(0));
    for (int j = 0; j < nv; ++j)
        sol.reduced_costs[static_cast<std::size_t>(j)] = lp.objective[static_cast<std::size_t>(j)];
    for (int i = 0; i < nc; ++i) {
        const Rat& yi = sol.dual[static_cast<std::size_t>(i)];
        if (yi == 0) continue;
        for (const auto& [v, a] : lp.rows[static_cast<std::size_t>(i)].coeffs)
            sol.reduced_costs[static_cast<std::size_t>(v)] -= yi * a;
    }
    sol.dual_objective = 0;
    for (int i = 0; i < nc; ++i)
        sol.dual_objective += sol.dual[static_cast<std::size_t>(i)] * lp.rows[static_cast<std::size_t>(i)].rhs;
    for (int j = 0; j < nv; ++j)
        sol.dual_objective +=
            sol.reduced_costs[static_cast<std::size_t>(j)] * sol.primal[static_cast<std::size_t>(j)];
    return sol;
}

/// Full KKT verification of an optimal solution; empty result = certified.
inline std::vector<std::string> check_optimality(const LinProgram& lp, const LinSolution& sol) {
    std::vector<std::string> bad;
    if (sol.status != SolveStatus::optimal) {
        bad.push_back("status is not optimal");
        return bad;
    }
    const int nv = lp.num_variables(), nc = lp.num_constraints();
    if (static_cast<int>(sol.primal.size()) != nv || static_cast<int>(sol.dual.size()) != nc ||
        static_cast<int>(sol.reduced_costs.size()) != nv) {
        bad.push_back("solution vector sizes do not match the program");
        return bad;
    }
    const bool maximize = lp.sense == Sense::maximize;

    for (int j = 0; j < nv; ++j) {
        const auto& v = lp.vars[static_cast<std::size_t>(j)];
        const Rat& x = sol.primal[static_cast<std::size_t>(j)];
        if (v.lower && x < *v.lower) bad.push_back(v.name + " below lower bound");
        if (v.upper && x > *v.upper) bad.push_back(v.name + " above upper bound");
    }
    std::vector<Rat> activity(static_cast<std::size_t>(nc), Rat(0));
    for (int i = 0; i < nc; ++i) {
        const auto& row = lp.rows[static_cast<std::size_t>(i)];
        for (const auto& [v, a] : row.coeffs)
            activity[static_cast<std::size_t>(i)] += a * sol.primal[static_cast<std::size_t>(v)];
        const Rat& act = activity[static_cast<std::size_t>(i)];
        const bool ok = row.rel == Relation::le   ? act <= row.rhs
                        : row.rel == Relation::ge ? act >= row.rhs
                                                  : act == row.rhs;
        if (!ok) bad.push_back("constraint " + row.name + " violated");
    }
    // dual sign conventions + complementary slackness on rows
    for (int i = 0; i < nc; ++i) {
        const auto& row = lp.rows[static_cast<std::size_t>(i)];
        const Rat& y = sol.dual[static_cast<std::size_t>(i)];
        if (row.rel == Relation::le && (maximize ? y < 0 : y > 0))
            bad.push_back("dual sign on <= row " + row.name);
        if (row.rel == Relation::ge && (maximize ? y > 0 : y < 0))
            bad.push_back("dual sign on >= row " + row.name);
        if (y != 0 && row.rel != Relation::eq && activity[static_cast<std::size_t>(i)] != row.rhs)
            bad.push_back("complementary slackness on row " + row.name);
    }
    // reduced costs: recompute, then check bound positioning
    for (int j = 0; j < nv; ++j) {
        Rat r = lp.objective[static_cast<std::size_t>(j)];
        for (int i = 0; i < nc; ++i) {
            const Rat& y = sol.dual[static_cast<std::size_t>(i)];
            if (y == 0) continue;
            for (const auto& [v, a] : lp.rows[static_cast<std::size_t>(i)].coeffs)
                if (v == j) r -= y * a;
        }
        if (r != sol.reduced_costs[static_cast<std::size_t>(j)]) {
            bad.push_back("stored reduced cost mismatch on " +
                          lp.vars[static_cast<std::size_t>(j)].name);
            continue;
        }
        const auto& v = lp.vars[static_cast<std::size_t>(j)];
        const Rat& x = sol.primal[static_cast<std::size_t>(j)];
        const bool at_lb = v.lower && x == *v.lower;
        const bool at_ub = v.upper && x == *v.upper;
        const Rat rr = maximize ? r : Rat(-r); // normalize to max-sense conditions
        if (rr < 0 && !at_lb) bad.push_back("reduced cost demands lower bound on " + v.name);
        if (rr > 0 && !at_ub) bad.push_back("reduced cost demands upper bound on " + v.name);
    }
    // exact strong duality
    Rat primal_obj = 0;
    for (int j = 0; j < nv; ++j)
        primal_obj += lp.objective[static_cast<std::size_t>(j)] * sol.primal[static_cast<std::size_t>(j)];
    if (primal_obj != sol.objective) bad.push_back("stored objective mismatch");
    Rat dual_obj = 0;
    for (int i = 0; i < nc; ++i)
        dual_obj += sol.dual[static_cast<std::size_t>(i)] * lp.rows[static_cast<std::size_t>(i)].rhs;
    for (int j = 0; j < nv; ++j)
        dual_obj += sol.reduced_costs[static_cast<std::size_t>(j)] * sol.primal[static_cast<std::size_t>(j)];
    if (dual_obj != sol.dual_objective) bad.push_back("stored dual objective mismatch");
    if (primal_obj != dual_obj) bad.push_back("strong duality gap");
    return bad;
}

/// Verify a Farkas certificate: multipliers conform in sign, every variable's
/// aggregate coefficient cancels, and the aggregated rhs is negative.
inline std::vector<std::string> check_infeasibility(const LinProgram& lp,
                                                    const FarkasCertificate& fc) {
    std::vector<std::string> bad;
    const int nv = lp.num_variables(), nc = lp.num_constraints();
    if (static_cast<int>(fc.row_multipliers.size()) != nc ||
        static_cast<int>(fc.upper_bound_multipliers.size()) != nv ||
        static_cast<int>(fc.lower_bound_multipliers.size()) != nv) {
        bad.push_back("certificate vector sizes do not match the program");
        return bad;
    }
    for (int i = 0; i < nc; ++i) {
        const auto& row = lp.rows[static_cast<std::size_t>(i)];
        const Rat& y = fc.row_multipliers[static_cast<std::size_t>(i)];
        if (row.rel == Relation::le && y < 0) bad.push_back("negative multiplier on <= row " + row.name);
        if (row.rel == Relation::ge && y > 0) bad.push_back("positive multiplier on >= row " + row.name);
    }
    for (int j = 0; j < nv; ++j) {
        const auto& v = lp.vars[static_cast<std::size_t>(j)];
        if (fc.upper_bound_multipliers[static_cast<std::size_t>(j)] < 0)
            bad.push_back("negative upper-bound multiplier on " + v.name);
        if (fc.lower_bound_multipliers[static_cast<std::size_t>(j)] < 0)
            bad.push_back("negative lower-bound multiplier on " + v.name);
        if (!v.upper && fc.upper_bound_multipliers[static_cast<std::size_t>(j)] != 0)
            bad.push_back("upper-bound multiplier on unbounded " + v.name);
        if (!v.lower && fc.lower_bound_multipliers[static_cast<std::size_t>(j)] != 0)
            bad.push_back("lower-bound multiplier on unbounded " + v.name);
    }
    std::vector<Rat> coef(static_cast<std::size_t>(nv), Rat(0));
    for (int i = 0; i < nc; ++i) {
        const Rat& y = fc.row_multipliers[static_cast<std::size_t>(i)];
        if (y == 0) continue;
        for (const auto& [v, a] : lp.rows[static_cast<std::size_t>(i)].coeffs)
            coef[static_cast<std::size_t>(v)] += y * a;
    }
    for (int j = 0; j < nv; ++j) {
        coef[static_cast<std::size_t>(j)] += fc.upper_bound_multipliers[static_cast<std::size_t>(j)];
        coef[static_cast<std::size_t>(j)] -= fc.lower_bound_multipliers[static_cast<std::size_t>(j)];
        if (coef[static_cast<std::size_t>(j)] != 0)
            bad.push_back("aggregate coefficient of " + lp.vars[static_cast<std::size_t>(j)].name +
                          " does not cancel");
    }
    Rat rhs = 0;
    for (int i = 0; i < nc; ++i)
        rhs += fc.row_multipliers[static_cast<std::size_t>(i)] * lp.rows[static_cast<std::size_t>(i)].rhs;
    for (int j = 0; j < nv; ++j) {
        const auto& v = lp.vars[static_cast<std::size_t>(j)];
        if (fc.upper_bound_multipliers[static_cast<std::size_t>(j)] != 0)
            rhs += fc.upper_bound_multipliers[static_cast<std::size_t>(j)] * *v.upper;
        if (fc.lower_bound_multipliers[static_cast<std::size_t>(j)] != 0)
            rhs -= fc.lower_bound_multipliers[static_cast<std::size_t>(j)] * *v.lower;
    }
    if (rhs >= 0) bad.push_back("aggregated right-hand side is nonnegative");
    return bad;
}

/// Plain-text dump: one "name: sum REL rhs" line per row, rationals as num/den.
inline void dump_lp(const LinProgram& lp, std::ostream& os) {
    os << (lp.sense == Sense::maximize ? "max:" : "min:");
    bool first = true;
    for (int j = 0; j < lp.num_variables(); ++j) {
        const Rat& c = lp.objective[static_cast<std::size_t>(j)];
        if (c == 0) continue;
        os << (first ? " " : " + ") << rat_to_string(c) << "·"
           << lp.vars[static_cast<std::size_t>(j)].name;
        first = false;
    }
    if (first) os << " 0";
    os << "\n";
    for (const auto& row : lp.rows) {
        os << row.name << ":";
        bool f = true;
        for (const auto& [v, a] : row.coeffs) {
            if (a == 0) continue;
            os << (f ? " " : " + ") << rat_to_string(a) << "·"
               << lp.vars[static_cast<std::size_t>(v)].name;
            f = false;
        }
        if (f) os << " 0";
        os << " " << relation_symbol(row.rel) << " " << rat_to_string(row.rhs) << "\n";
    }
    for (const auto& v : lp.vars) {
        if (v.lower && v.upper)
            os << "bound: " << rat_to_string(*v.lower) << " <= " << v.name << " <= "
               << rat_to_string(*v.upper) << "\n";
        else if (v.lower)
            os << "bound: " << v.name << " >= " << rat_to_string(*v.lower) << "\n";
        else if (v.upper)
            os << "bound: " << v.name << " <= " << rat_to_string(*v.upper) << "\n";
        else
            os << "bound: " << v.name << " free\n";
    }
}

} // namespace belleff
