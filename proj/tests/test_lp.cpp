#include <doctest.h>

#include <cmath>
#include <random>

#include "mobai/error.hpp"
#include "mobai/lp.hpp"
#include "oracles.hpp"

using namespace mobai;
using doctest::Approx;

TEST_CASE("vertex optimum") {
    LinearProgram lp;
    lp.objective = {1.0, 0.0};
    lp.equalities = {{{1.0, 1.0}, 1.0}};
    lp.lower_bounds = {0.0, 0.0};
    const LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.x == std::vector<double>{1.0, 0.0});
    CHECK(s.value == 1.0);
}

TEST_CASE("degenerate objective picks the first variable") {
    LinearProgram lp;
    lp.objective = {1.0, 1.0};
    lp.equalities = {{{1.0, 1.0}, 1.0}};
    lp.lower_bounds = {0.0, 0.0};
    const LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.value == 1.0);
    CHECK(s.x == std::vector<double>{1.0, 0.0});
}

TEST_CASE("intersection of two affine pieces") {
    // variables (x1, t); t <= 0.3 + 0.1 x1, t <= 0.5 - 0.2 x1, x1 <= 1.
    LinearProgram lp;
    lp.objective = {0.0, 1.0};
    lp.inequalities = {{{-0.1, 1.0}, 0.3}, {{0.2, 1.0}, 0.5}, {{1.0, 0.0}, 1.0}};
    lp.lower_bounds = {0.0, -10.0};
    const LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.x[0] == Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(s.x[1] == Approx(11.0 / 30.0).epsilon(1e-12));
    CHECK(s.value == Approx(11.0 / 30.0).epsilon(1e-12));
}

TEST_CASE("infeasible and unbounded are statuses") {
    LinearProgram bad;
    bad.objective = {1.0, 0.0};
    bad.equalities = {{{1.0, 1.0}, 1.0}};
    bad.lower_bounds = {1.0, 1.0};
    CHECK(solve_lp(bad).status == LpStatus::infeasible);

    LinearProgram open;
    open.objective = {1.0, 0.0};
    open.inequalities = {{{0.0, 1.0}, 4.0}};
    open.lower_bounds = {0.0, 0.0};
    CHECK(solve_lp(open).status == LpStatus::unbounded);

    LinearProgram neg;
    neg.objective = {-1.0};
    neg.inequalities = {{{-1.0}, -2.0}};  // x >= 2
    neg.lower_bounds = {-5.0};
    const LpSolution s = solve_lp(neg);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.x[0] == Approx(2.0));
}

TEST_CASE("redundant equalities") {
    LinearProgram lp;
    lp.objective = {1.0, 2.0, 0.0};
    lp.equalities = {{{1.0, 1.0, 1.0}, 1.0}, {{2.0, 2.0, 2.0}, 2.0}};
    lp.lower_bounds = {0.0, 0.0, 0.0};
    const LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.value == Approx(2.0));
    CHECK(max_violation(lp, s.x) <= 1e-12);
}

TEST_CASE("malformed programs") {
    LinearProgram lp;
    lp.objective = {1.0, 0.0};
    lp.equalities = {{{1.0}, 1.0}};
    lp.lower_bounds = {0.0, 0.0};
    CHECK_THROWS_AS(solve_lp(lp), InvalidShape);
    lp.equalities = {{{1.0, 1.0}, 1.0}};
    lp.lower_bounds = {0.0, -INFINITY};
    CHECK_THROWS_AS(solve_lp(lp), InvalidShape);
}

TEST_CASE("surrogate LP shape") {
    const Instance two({{1.0}, {0.0}});
    const LinearProgram small = build_surrogate_lp(two, std::vector<double>{0.5, 0.5}, 0.1);
    CHECK(small.variables() == 3);
    CHECK(small.equalities.size() == 1);
    CHECK(small.inequalities.size() == 1);
    CHECK(small.lower_bounds[0] == eta_floor(2, 0.1));
    CHECK(small.lower_bounds[1] == eta_floor(2, 0.1));

    const Instance big = gen_synthetic(20, 10, 1);
    const LinearProgram lp = build_surrogate_lp(big, uniform_proportion(20), 0.1);
    CHECK(lp.inequalities.size() == 190);
    CHECK_THROWS_AS(build_surrogate_lp(two, std::vector<double>{0.5, 0.5}, 0.0), Error);
}

TEST_CASE("surrogate proportion hand cases") {
    const Instance inst({{0.0}, {1.0}});
    const Surrogate s = surrogate_proportion(inst, std::vector<double>{0.8, 0.2}, 0.1);
    CHECK(s.proportion[0] == Approx(1.0 / 22.0).epsilon(1e-12));
    CHECK(s.proportion[1] == Approx(21.0 / 22.0).epsilon(1e-12));
    CHECK(s.value == Approx(0.3063636363636).epsilon(1e-11));

    const Surrogate flat = surrogate_proportion(inst, std::vector<double>{0.5, 0.5}, 0.1);
    CHECK(flat.value == Approx(0.125).epsilon(1e-12));
    // Bland's rule fills the first coordinate.
    CHECK(flat.proportion[0] == Approx(21.0 / 22.0).epsilon(1e-12));
    CHECK(is_eta_feasible(flat.proportion, 0.1, 1e-12));
}

TEST_CASE("full simplex linearization at a vertex uses the supergradient") {
    const AllocationObjective obj(Instance({{1.0}, {0.0}, {0.5}}));
    const Surrogate s = maximize_linearization(obj, std::vector<double>{0.0, 0.0, 1.0}, 0.0);
    CHECK(is_proportion(s.proportion, 1e-12));
    const LinearProgram lp = build_linearized_lp(obj, std::vector<double>{0.0, 0.0, 1.0}, 0.0);
    CHECK(max_violation(lp, [&] {
              auto x = s.proportion.weights;
              x.push_back(s.value);
              return x;
          }()) <= 1e-9);
    CHECK_THROWS_AS(build_linearized_lp(obj, std::vector<double>{0.0, 0.0, 1.0}, 0.01),
                    DegenerateDenominator);
}

TEST_CASE("property: surrogate output is feasible and certified") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> eta_draw(0.01, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Instance inst = oracle::random_instance(2 + trial % 7, 1 + trial % 4, rng);
        const double eta = eta_draw(rng);
        const auto w = oracle::random_feasible(inst.arms(), eta_floor(inst.arms(), eta), rng);
        const LinearProgram lp = build_surrogate_lp(inst, w, eta);
        const LpSolution sol = solve_lp(lp);
        REQUIRE(sol.status == LpStatus::optimal);
        REQUIRE(max_violation(lp, sol.x) <= 1e-9);
        double cx = 0.0;
        for (std::size_t j = 0; j < sol.x.size(); ++j) cx += lp.objective[j] * sol.x[j];
        REQUIRE(std::abs(cx - sol.value) <= 1e-9);

        const Surrogate s = surrogate_proportion(inst, w, eta);
        REQUIRE(is_eta_feasible(s.proportion, eta, 1e-9));
        REQUIRE(std::abs(h(inst, w, s.proportion) - s.value) <= 1e-9);
        REQUIRE(std::abs(oracle::linearization(inst, w, s.proportion.weights) - s.value) <= 1e-9);
    }
}

TEST_CASE("property: LP value dominates a grid of the truncated simplex") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const Instance inst = oracle::random_instance(2 + trial % 2, 1 + trial % 3, rng);
        const double eta = 0.1;
        const double floor = eta_floor(inst.arms(), eta);
        const auto w = oracle::random_feasible(inst.arms(), floor, rng);
        const Surrogate s = surrogate_proportion(inst, w, eta);
        double grid_max = -INFINITY;
        oracle::simplex_grid(inst.arms(), 200, floor, [&](const std::vector<double>& z) {
            const double v = oracle::linearization(inst, w, z);
            grid_max = std::max(grid_max, v);
            REQUIRE(s.value >= v - 1e-12);
        });
        double gmax = 0.0;
        const BestArms best = best_arms(inst);
        for (std::size_t m = 0; m < inst.objectives(); ++m) {
            for (std::size_t i = 0; i < inst.arms(); ++i) {
                if (i == best[m]) continue;
                for (double d : grad_g_term(inst, w, i, m)) gmax = std::max(gmax, d);
            }
        }
        CHECK(s.value - grid_max <= 2.0 * gmax / 200.0 + 1e-12);
    }
}

// Empirical instance and averaged weight from a Baseline run where the
// floating-point pivots looped at a degenerate vertex.
TEST_CASE("badly scaled degenerate program still reaches the optimum") {
    const Instance hat(std::vector<std::vector<double>>{
        {1.7162663461578425, 0.81827703253016371, 0.28311130318147648, 0.39947849199734353, 0.27404809246272366},
        {0.86591528831066966, 1.7371898005284541, 0.96583978801905068, 0.07214016982813419, -0.045921055522689505},
        {0.02202905605176609, 0.37861790789716998, 1.4525513080712149, -0.020694989460310294, 0.55243059545827233},
        {0.6489767174858756, 1.4193254967162146, 0.53587466633112157, 1.8617030913590584, 0.7088722083647484},
        {0.88853109824253995, 0.68685155797501851, 1.4672166383676999, 0.2652535579498751, 1.1071766702556511},
        {0.66003619820562842, 0.23523583823291688, 0.28434765231901199, 0.79547774053354603, 0.72452832499811726},
        {-0.11838482070635706, 0.18614790611750684, 0.52346997998201727, 0.89687080181845014, -0.078491560227688162},
        {0.57016327829527513, 0.49324492845016871, 0.24936489085171798, 0.91143859671946204, 0.3825216856715819},
        {0.13034029636057973, 0.60790137318356641, 1.0947266662844575, 0.38929331178464832, 0.18904754403817628},
        {0.21596969280074768, 0.13587114168371658, -0.14922893471905213, 0.65045579141053023, 0.00055168225554753393}},
                       TieMode::lowest_index);
    const std::vector<double> w{0.00011816225365619327, 0.0011610626509331303, 0.49813831247320245, 0.0011354387414207118, 0.49817298539966171, 0.00048575479667194881, 8.2193207181062959e-05, 0.00013540903013830897, 0.00051262028268646916, 5.8061164447993843e-05};
    const LinearProgram lp = build_linearized_lp(AllocationObjective(hat), w, 0.0);
    const LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(max_violation(lp, sol.x) <= 1e-9);
    const std::vector<double> s(sol.x.begin(), sol.x.begin() + 10);
    CHECK(std::abs(oracle::linearization(hat, w, s) - sol.value) <= 1e-12);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20000; ++i) {
        const auto z = oracle::random_feasible(10, 0.0, rng);
        REQUIRE(sol.value >= oracle::linearization(hat, w, z) - 1e-15);
    }
    for (std::size_t i = 0; i < 10; ++i) {
        std::vector<double> e(10, 0.0);
        e[i] = 1.0;
        REQUIRE(sol.value >= oracle::linearization(hat, w, e) - 1e-15);
    }
}

TEST_CASE("determinism") {
    const Instance inst = gen_synthetic(8, 4, 77);
    std::mt19937_64 rng(1);
    const auto w = oracle::random_feasible(8, eta_floor(8, 0.1), rng);
    const LpSolution a = solve_lp(build_surrogate_lp(inst, w, 0.1));
    const LpSolution b = solve_lp(build_surrogate_lp(inst, w, 0.1));
    CHECK(a.x == b.x);
    CHECK(a.value == b.value);
    CHECK(a.pivots == b.pivots);
}
