#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "belleff/linprog.hpp"

using namespace belleff;

namespace {

LinSolution solve_checked(const LinProgram& lp, SolveOptions opts = {}) {
    LinSolution sol = solve(lp, opts);
    if (sol.status == SolveStatus::optimal) {
        auto bad = check_optimality(lp, sol);
        for (const auto& msg : bad) UNSCOPED_INFO(msg);
        REQUIRE(bad.empty());
        REQUIRE(sol.objective == sol.dual_objective);
    } else if (sol.status == SolveStatus::infeasible) {
        REQUIRE(sol.farkas.has_value());
        auto bad = check_infeasibility(lp, *sol.farkas);
        for (const auto& msg : bad) UNSCOPED_INFO(msg);
        REQUIRE(bad.empty());
    }
    return sol;
}

} // namespace

TEST_CASE("one variable, one row") {
    LinProgram lp;
    lp.sense = Sense::maximize;
    int x = lp.add_variable("x");
    lp.set_objective(x, Rat(1));
    lp.add_constraint({{x, Rat(1)}}, Relation::le, Rat(3));
    auto sol = solve_checked(lp);
    REQUIRE(sol.status == SolveStatus::optimal);
    REQUIRE(sol.objective == 3);
    REQUIRE(sol.primal[0] == 3);
    REQUIRE(sol.dual[0] == 1);
    REQUIRE(sol.reduced_costs[0] == 0);
}

TEST_CASE("two variables, two rows, duals as expected") {
    // max 3x + 2y  s.t.  x + y <= 4,  x + 3y <= 6
    LinProgram lp;
    lp.sense = Sense::maximize;
    int x = lp.add_variable("x"), y = lp.add_variable("y");
    lp.set_objective(x, Rat(3));
    lp.set_objective(y, Rat(2));
    lp.add_constraint({{x, Rat(1)}, {y, Rat(1)}}, Relation::le, Rat(4));
    lp.add_constraint({{x, Rat(1)}, {y, Rat(3)}}, Relation::le, Rat(6));
    auto sol = solve_checked(lp);
    REQUIRE(sol.objective == 12);
    REQUIRE(sol.primal[0] == 4);
    REQUIRE(sol.primal[1] == 0);
    REQUIRE(sol.dual[0] == 3);
    REQUIRE(sol.dual[1] == 0);
    REQUIRE(sol.reduced_costs[1] == -1); // y pinned at its lower bound
}

TEST_CASE("minimization with a >= row") {
    // min 2x + 3y  s.t.  x + y >= 2
    LinProgram lp;
    lp.sense = Sense::minimize;
    int x = lp.add_variable("x"), y = lp.add_variable("y");
    lp.set_objective(x, Rat(2));
    lp.set_objective(y, Rat(3));
    lp.add_constraint({{x, Rat(1)}, {y, Rat(1)}}, Relation::ge, Rat(2));
    auto sol = solve_checked(lp);
    REQUIRE(sol.objective == 4);
    REQUIRE(sol.primal[0] == 2);
    REQUIRE(sol.primal[1] == 0);
    REQUIRE(sol.dual[0] == 2);        // min sense: y >= 0 on >= rows
    REQUIRE(sol.reduced_costs[1] == 1); // min sense: r >= 0 at lower bound
}

TEST_CASE("free variable via equality row") {
    // min x + y  s.t.  x + 2y = 3,  x >= 0,  y free  ->  x = 0, y = 3/2
    LinProgram lp;
    lp.sense = Sense::minimize;
    int x = lp.add_variable("x");
    int y = lp.add_variable("y", std::nullopt, std::nullopt);
    lp.set_objective(x, Rat(1));
    lp.set_objective(y, Rat(1));
    lp.add_constraint({{x, Rat(1)}, {y, Rat(2)}}, Relation::eq, Rat(3));
    auto sol = solve_checked(lp);
    REQUIRE(sol.objective == make_rat(3, 2));
    REQUIRE(sol.primal[0] == 0);
    REQUIRE(sol.primal[1] == make_rat(3, 2));
    REQUIRE(sol.reduced_costs[1] == 0); // free var must price to zero
    REQUIRE(sol.dual[0] == make_rat(1, 2));
}

TEST_CASE("free variable reaching a negative value") {
    // max y  s.t.  y <= -5 (y free)
    LinProgram lp;
    lp.sense = Sense::maximize;
    int y = lp.add_variable("y", std::nullopt, std::nullopt);
    lp.set_objective(y, Rat(1));
    lp.add_constraint({{y, Rat(1)}}, Relation::le, Rat(-5));
    auto sol = solve_checked(lp);
    REQUIRE(sol.objective == -5);
    REQUIRE(sol.primal[0] == -5);
}

TEST_CASE("variable upper bounds and reduced-cost positioning") {
    // max x + y,  x <= 2, y <= 3 (bounds),  x + y <= 4
    LinProgram lp;
    lp.sense = Sense::maximize;
    int x = lp.add_variable("x", Rat(0), Rat(2));
    int y = lp.add_variable("y", Rat(0), Rat(3));
    lp.set_objective(x, Rat(1));
    lp.set_objective(y, Rat(1));
    lp.add_constraint({{x, Rat(1)}, {y, Rat(1)}}, Relation::le, Rat(4));
    auto sol = solve_checked(lp);
    REQUIRE(sol.objective == 4);
    REQUIRE(sol.primal[0] + sol.primal[1] == 4);
}

TEST_CASE("upper-bounded variable strictly profitable at its cap") {
    // max 5x + y  s.t.  x <= 1 (bound), x + y <= 3
    LinProgram lp;
    lp.sense = Sense::maximize;
    int x = lp.add_variable("x", Rat(0), Rat(1));
    int y = lp.add_variable("y");
    lp.set_objective(x, Rat(5));
    lp.set_objective(y, Rat(1));
    lp.add_constraint({{x, Rat(1)}, {y, Rat(1)}}, Relation::le, Rat(3));
    auto sol = solve_checked(lp);
    REQUIRE(sol.objective == 7);
    REQUIRE(sol.primal[0] == 1);
    REQUIRE(sol.primal[1] == 2);
    REQUIRE(sol.reduced_costs[0] == 4); // max sense: r >= 0 at upper bound
}

TEST_CASE("infeasible rows produce a verified Farkas certificate") {
    LinProgram lp;
    lp.sense = Sense::maximize;
    int x = lp.add_variable("x");
    lp.add_constraint({{x, Rat(1)}}, Relation::le, Rat(1));
    lp.add_constraint({{x, Rat(1)}}, Relation::ge, Rat(2));
    auto sol = solve_checked(lp);
    REQUIRE(sol.status == SolveStatus::infeasible);
}

TEST_CASE("contradictory bounds short-circuit to infeasible") {
    LinProgram lp;
    int x = lp.add_variable("x", Rat(3), Rat(1));
    (void)x;
    auto sol = solve_checked(lp);
    REQUIRE(sol.status == SolveStatus::infeasible);
    REQUIRE(std::string(sol.engine) == "presolve");
}

TEST_CASE("infeasible through equality rows") {
    // x + y = 1, x + y = 2
    LinProgram lp;
    int x = lp.add_variable("x"), y = lp.add_variable("y");
    lp.add_constraint({{x, Rat(1)}, {y, Rat(1)}}, Relation::eq, Rat(1));
    lp.add_constraint({{x, Rat(1)}, {y, Rat(1)}}, Relation::eq, Rat(2));
    auto sol = solve_checked(lp);
    REQUIRE(sol.status == SolveStatus::infeasible);
}

TEST_CASE("unbounded maximization returns an improving ray") {
    LinProgram lp;
    lp.sense = Sense::maximize;
    int x = lp.add_variable("x");
    int y = lp.add_variable("y");
    lp.set_objective(x, Rat(1));
    lp.add_constraint({{y, Rat(1)}}, Relation::le, Rat(1));
    auto sol = solve(lp);
    REQUIRE(sol.status == SolveStatus::unbounded);
    REQUIRE(sol.ray.has_value());
    // ray must improve the objective and respect constraint directions
    Rat improvement = 0;
    for (std::size_t j = 0; j < sol.ray->size(); ++j)
        improvement += lp.objective[j] * (*sol.ray)[j];
    REQUIRE(improvement > 0);
    REQUIRE((*sol.ray)[1] <= 0);
}

TEST_CASE("degenerate instance terminates with the anti-cycling rule") {
    // Classic cycling-prone instance; Bland's rule must reach -1/20.
    LinProgram lp;
    lp.sense = Sense::minimize;
    int x1 = lp.add_variable("x1"), x2 = lp.add_variable("x2");
    int x3 = lp.add_variable("x3"), x4 = lp.add_variable("x4");
    lp.set_objective(x1, make_rat(-3, 4));
    lp.set_objective(x2, Rat(150));
    lp.set_objective(x3, make_rat(-1, 50));
    lp.set_objective(x4, Rat(6));
    lp.add_constraint({{x1, make_rat(1, 4)}, {x2, Rat(-60)}, {x3, make_rat(-1, 25)}, {x4, Rat(9)}},
                      Relation::le, Rat(0));
    lp.add_constraint({{x1, make_rat(1, 2)}, {x2, Rat(-90)}, {x3, make_rat(-1, 50)}, {x4, Rat(3)}},
                      Relation::le, Rat(0));
    lp.add_constraint({{x3, Rat(1)}}, Relation::le, Rat(1));
    auto sol = solve_checked(lp);
    REQUIRE(sol.status == SolveStatus::optimal);
    REQUIRE(sol.objective == make_rat(-1, 20));
    REQUIRE(sol.iterations < 100);
}

TEST_CASE("redundant equality rows are handled") {
    LinProgram lp;
    lp.sense = Sense::maximize;
    int x = lp.add_variable("x"), y = lp.add_variable("y");
    lp.set_objective(x, Rat(1));
    lp.add_constraint({{x, Rat(1)}, {y, Rat(1)}}, Relation::eq, Rat(2));
    lp.add_constraint({{x, Rat(2)}, {y, Rat(2)}}, Relation::eq, Rat(4)); // redundant copy
    lp.add_constraint({{x, Rat(1)}, {y, Rat(-1)}}, Relation::eq, Rat(0));
    auto sol = solve_checked(lp);
    REQUIRE(sol.objective == 1);
    REQUIRE(sol.primal[0] == 1);
    REQUIRE(sol.primal[1] == 1);
}

TEST_CASE("duplicate variable mentions in a row are merged") {
    LinProgram lp;
    lp.sense = Sense::maximize;
    int x = lp.add_variable("x");
    lp.set_objective(x, Rat(1));
    lp.add_constraint({{x, Rat(1)}, {x, Rat(2)}}, Relation::le, Rat(6)); // 3x <= 6
    auto sol = solve_checked(lp);
    REQUIRE(sol.objective == 2);
}

TEST_CASE("rhs sensitivity matches the dual value") {
    auto build = [](const Rat& rhs1) {
        LinProgram lp;
        lp.sense = Sense::maximize;
        int x = lp.add_variable("x"), y = lp.add_variable("y");
        lp.set_objective(x, Rat(3));
        lp.set_objective(y, Rat(2));
        lp.add_constraint({{x, Rat(1)}, {y, Rat(1)}}, Relation::le, rhs1);
        lp.add_constraint({{x, Rat(1)}, {y, Rat(3)}}, Relation::le, Rat(6));
        return lp;
    };
    auto base = solve_checked(build(Rat(4)));
    const Rat delta = make_rat(1, 10);
    auto bumped = solve_checked(build(Rat(4) + delta));
    REQUIRE(bumped.objective == base.objective + base.dual[0] * delta);
}

TEST_CASE("dense and revised engines agree on random programs") {
    std::mt19937 gen(20240817);
    std::uniform_int_distribution<int> coef(-5, 5);
    std::uniform_int_distribution<int> relpick(0, 2);
    std::uniform_int_distribution<int> boundpick(0, 3);
    std::uniform_int_distribution<int> rhspick(-4, 8);

    int optimal_seen = 0, infeasible_seen = 0, unbounded_seen = 0;
    for (int trial = 0; trial < 25; ++trial) {
        LinProgram lp;
        lp.sense = trial % 2 == 0 ? Sense::maximize : Sense::minimize;
        const int nv = 6, nc = 4;
        for (int j = 0; j < nv; ++j) {
            switch (boundpick(gen)) {
                case 0: lp.add_variable(); break;                                   // [0, inf)
                case 1: lp.add_variable("", Rat(0), Rat(coef(gen) + 6)); break;     // [0, ub]
                case 2: lp.add_variable("", std::nullopt, std::nullopt); break;     // free
                default: lp.add_variable("", Rat(-2), std::nullopt); break;         // [-2, inf)
            }
            lp.set_objective(j, Rat(coef(gen)));
        }
        for (int i = 0; i < nc; ++i) {
            std::vector<std::pair<int, Rat>> row;
            for (int j = 0; j < nv; ++j) {
                int a = coef(gen);
                if (a != 0) row.emplace_back(j, Rat(a));
            }
            Relation rel = relpick(gen) == 0   ? Relation::le
                           : relpick(gen) == 1 ? Relation::ge
                                               : Relation::eq;
            lp.add_constraint(std::move(row), rel, Rat(rhspick(gen)));
        }
        SolveOptions dense_opts, revised_opts;
        dense_opts.engine = SolveOptions::Engine::dense;
        revised_opts.engine = SolveOptions::Engine::revised;
        auto a = solve_checked(lp, dense_opts);
        auto b = solve_checked(lp, revised_opts);
        REQUIRE(a.status == b.status);
        if (a.status == SolveStatus::optimal) {
            REQUIRE(a.objective == b.objective);
            ++optimal_seen;
        } else if (a.status == SolveStatus::infeasible) {
            ++infeasible_seen;
        } else {
            ++unbounded_seen;
        }
        REQUIRE(std::string(a.engine) == "dense");
        REQUIRE(std::string(b.engine) == "revised");
    }
    // the generator should exercise all three verdicts
    REQUIRE(optimal_seen > 0);
    REQUIRE(infeasible_seen > 0);
    REQUIRE(unbounded_seen > 0);
}

TEST_CASE("solving twice is bit-for-bit deterministic") {
    LinProgram lp;
    lp.sense = Sense::maximize;
    for (int j = 0; j < 5; ++j) lp.add_variable();
    for (int j = 0; j < 5; ++j) lp.set_objective(j, Rat(j + 1));
    lp.add_constraint({{0, Rat(1)}, {1, Rat(2)}, {2, Rat(1)}}, Relation::le, Rat(7));
    lp.add_constraint({{2, Rat(3)}, {3, Rat(1)}, {4, Rat(2)}}, Relation::le, Rat(9));
    lp.add_constraint({{0, Rat(1)}, {4, Rat(1)}}, Relation::ge, Rat(1));
    auto a = solve_checked(lp);
    auto b = solve_checked(lp);
    REQUIRE(a.primal == b.primal);
    REQUIRE(a.dual == b.dual);
    REQUIRE(a.objective == b.objective);
    REQUIRE(a.iterations == b.iterations);
}

TEST_CASE("dump format lists rows and bounds") {
    LinProgram lp;
    lp.sense = Sense::maximize;
    int x = lp.add_variable("x"), y = lp.add_variable("y", Rat(0), Rat(3));
    lp.set_objective(x, Rat(1));
    lp.add_constraint({{x, Rat(1)}, {y, make_rat(1, 2)}}, Relation::le, Rat(4), "cap");
    std::ostringstream os;
    dump_lp(lp, os);
    const std::string text = os.str();
    REQUIRE(text.find("max: 1·x") != std::string::npos);
    REQUIRE(text.find("cap: 1·x + 1/2·y <= 4") != std::string::npos);
    REQUIRE(text.find("bound: x >= 0") != std::string::npos);
    REQUIRE(text.find("bound: 0 <= y <= 3") != std::string::npos);
}

TEST_CASE("undeclared variable ids are rejected") {
    LinProgram lp;
    lp.add_variable("x");
    REQUIRE_THROWS_AS(lp.set_objective(7, Rat(1)), input_error);
    REQUIRE_THROWS_AS(lp.add_constraint({{3, Rat(1)}}, Relation::le, Rat(1)), input_error);
}

TEST_CASE("fixed variables (lb == ub) are honored") {
    LinProgram lp;
    lp.sense = Sense::maximize;
    int x = lp.add_variable("x", Rat(2), Rat(2));
    int y = lp.add_variable("y");
    lp.set_objective(x, Rat(1));
    lp.set_objective(y, Rat(1));
    lp.add_constraint({{x, Rat(1)}, {y, Rat(1)}}, Relation::le, Rat(5));
    auto sol = solve_checked(lp);
    REQUIRE(sol.primal[0] == 2);
    REQUIRE(sol.objective == 5);
}

TEST_CASE("negative lower bounds shift correctly") {
    // min x  s.t.  x >= -7 (bound), x + y = 0, y <= 3
    LinProgram lp;
    lp.sense = Sense::minimize;
    int x = lp.add_variable("x", Rat(-7), std::nullopt);
    int y = lp.add_variable("y", Rat(0), Rat(3));
    lp.set_objective(x, Rat(1));
    lp.add_constraint({{x, Rat(1)}, {y, Rat(1)}}, Relation::eq, Rat(0));
    auto sol = solve_checked(lp);
    REQUIRE(sol.objective == -3);
    REQUIRE(sol.primal[0] == -3);
    REQUIRE(sol.primal[1] == 3);
}
