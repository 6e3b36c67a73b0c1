#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mobai/instance.hpp"

namespace mobai {

// Probability vector over arms.
struct Proportion {
    std::vector<double> weights;

    std::size_t size() const noexcept { return weights.size(); }
    double operator[](std::size_t i) const { return weights[i]; }
    operator std::span<const double>() const noexcept { return weights; }
    friend bool operator==(const Proportion&, const Proportion&) = default;
};

Proportion uniform_proportion(std::size_t arms);

// Smallest coordinate allowed in the truncated simplex: eta / (K (1 + eta)).
double eta_floor(std::size_t arms, double eta);

bool is_proportion(std::span<const double> w, double tol = 1e-12);
bool is_eta_feasible(std::span<const double> w, double eta, double tol = 1e-12);

struct AllocationResult {
    Proportion weight;
    double value = 0.0;  // objective value at `weight`
    std::size_t iterations = 0;
};

// One (arm, objective) term of the lower-bound objective, with arm != best.
struct PairTerm {
    std::size_t arm;
    std::size_t best;
    std::size_t objective;
    double half_sq_gap;  // gap^2 / 2
};

// The max-min objective
//
//   g(w) = min_{m, i != best_m} gap(i,m)^2 / 2 * w_i w_best / (w_i + w_best)
//
// precomputed for one instance. Cheap to evaluate repeatedly; the instance's
// tie mode decides the best arms.
class AllocationObjective {
public:
    explicit AllocationObjective(const Instance& inst);

    std::size_t arms() const noexcept { return arms_; }
    const BestArms& best() const noexcept { return best_; }
    const std::vector<PairTerm>& terms() const noexcept { return terms_; }

    // Zero when both weights vanish.
    double term_value(const PairTerm& term, std::span<const double> w) const;

    // Nonzero partials (d/dw_arm, d/dw_best). Throws DegenerateDenominator
    // when w_arm + w_best == 0.
    std::pair<double, double> term_gradient(const PairTerm& term, std::span<const double> w) const;

    double value(std::span<const double> w) const;

    // min over terms of the tangent plane of each term at w, evaluated at z.
    double linearized(std::span<const double> w, std::span<const double> z) const;

private:
    std::size_t arms_;
    BestArms best_;
    std::vector<PairTerm> terms_;
};

// Free-function forms over an Instance (arm/objective are 0-based).
double g_term(const Instance& inst, std::span<const double> w, std::size_t arm,
              std::size_t objective);
double g(const Instance& inst, std::span<const double> w);
std::vector<double> grad_g_term(const Instance& inst, std::span<const double> w, std::size_t arm,
                                std::size_t objective);
double h(const Instance& inst, std::span<const double> w, std::span<const double> z);

// Upper bound on the curvature constant over the truncated simplex:
// max_{(i,m)} 2 gap^2 (1 + eta) K / eta.
double curvature_bound(const Instance& inst, double eta);

// Iterate-and-average scheme: start from `init` (uniform by default), at
// step k take s_k maximizing the linearization at the current weight via the
// LP, and set the weight to the average of s_1..s_k. Without eta the search
// runs over the full simplex, with it over the truncated simplex.
AllocationResult optimize_allocation(const Instance& inst, std::optional<double> eta,
                                     std::size_t iterations,
                                     const std::optional<Proportion>& init = std::nullopt);
AllocationResult optimize_allocation(const AllocationObjective& objective,
                                     std::optional<double> eta, std::size_t iterations,
                                     const std::optional<Proportion>& init = std::nullopt);

// Brute force: best g over all simplex points whose coordinates are
// multiples of 1/resolution (restricted to the truncated simplex when
// eta > 0). K <= 4 only.
AllocationResult c_star_oracle_grid(const Instance& inst, double eta, std::size_t resolution);

// Calls `visit` with every grid point of the simplex at the given resolution
// that satisfies every coordinate >= floor. Enumeration order is
// lexicographic in the integer numerators.
template <typename Visit>
void for_each_simplex_point(std::size_t arms, std::size_t resolution, double floor, Visit&& visit) {
    std::vector<std::size_t> numer(arms, 0);
    std::vector<double> point(arms, 0.0);
    const double step = 1.0 / static_cast<double>(resolution);
    auto recurse = [&](auto&& self, std::size_t idx, std::size_t remaining) -> void {
        if (idx + 1 == arms) {
            numer[idx] = remaining;
            point[idx] = static_cast<double>(remaining) * step;
            if (point[idx] >= floor) visit(std::span<const double>(point));
            return;
        }
        for (std::size_t c = 0; c <= remaining; ++c) {
            numer[idx] = c;
            point[idx] = static_cast<double>(c) * step;
            if (point[idx] < floor) continue;
            self(self, idx + 1, remaining - c);
        }
    };
    recurse(recurse, 0, resolution);
}

}  // namespace mobai
