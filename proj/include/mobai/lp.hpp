#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mobai/oracle.hpp"

namespace mobai {

struct LinearConstraint {
    std::vector<double> coeffs;
    double rhs = 0.0;
};

// maximize objective . x
//   s.t. equalities:   a . x == rhs
//        inequalities: a . x <= rhs
//        x >= lower_bounds
struct LinearProgram {
    std::vector<double> objective;
    std::vector<LinearConstraint> equalities;
    std::vector<LinearConstraint> inequalities;
    std::vector<double> lower_bounds;

    std::size_t variables() const noexcept { return objective.size(); }
    // Throws InvalidShape on ragged rows or non-finite bounds.
    void validate() const;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    std::vector<double> x;
    double value = 0.0;
    LpStatus status = LpStatus::infeasible;
    std::size_t pivots = 0;
};

// Dense two-phase tableau simplex with Bland's rule (lowest-index entering
// column, lowest-index leaving basic variable on ratio ties). Deterministic.
LpSolution solve_lp(const LinearProgram& lp);

// Largest violation of any constraint or bound by x (0 when feasible).
double max_violation(const LinearProgram& lp, std::span<const double> x);

// Epigraph LP for max_{s in truncated simplex} h(w, s): variables
// (s_1..s_K, t), maximize t, sum s = 1, s_i >= floor, and one row
// t <= g_p(w) + <grad g_p(w), s - w> per pair term p.
//
// With floor == 0 (full simplex) a pair whose two weights are both zero is
// linearized with the supergradient (gap^2/8, gap^2/8) of the term at the
// origin; otherwise such a pair throws DegenerateDenominator.
LinearProgram build_linearized_lp(const AllocationObjective& objective, std::span<const double> w,
                                  double floor);

LinearProgram build_surrogate_lp(const Instance& inst, std::span<const double> w, double eta);

struct Surrogate {
    Proportion proportion;
    double value = 0.0;  // optimal h(w, s)
};

Surrogate maximize_linearization(const AllocationObjective& objective, std::span<const double> w,
                                 double floor);

// argmax over the eta-truncated simplex of h(w, .). Requires eta > 0.
Surrogate surrogate_proportion(const AllocationObjective& objective, std::span<const double> w,
                               double eta);
Surrogate surrogate_proportion(const Instance& inst, std::span<const double> w, double eta);

}  // namespace mobai
