#include <cmath>

#include "mobai/error.hpp"
#include "mobai/lp.hpp"
#include "mobai/oracle.hpp"

namespace mobai {

AllocationResult optimize_allocation(const AllocationObjective& objective,
                                     std::optional<double> eta, std::size_t iterations,
                                     const std::optional<Proportion>& init) {
    if (iterations == 0) throw Error("optimize_allocation needs at least one iteration");
    if (eta && !(*eta > 0.0)) throw Error("eta must be positive when given");
    const std::size_t k = objective.arms();
    const double floor = eta ? eta_floor(k, *eta) : 0.0;

    Proportion weight = init ? *init : uniform_proportion(k);
    if (weight.size() != k) throw InvalidShape("initial weight length must equal arm count");

    std::vector<double> total(k, 0.0);
    for (std::size_t step = 1; step <= iterations; ++step) {
        const Surrogate s = maximize_linearization(objective, weight.weights, floor);
        const double inv = 1.0 / static_cast<double>(step);
        for (std::size_t i = 0; i < k; ++i) {
            total[i] += s.proportion[i];
            weight.weights[i] = total[i] * inv;
        }
    }

    AllocationResult out;
    out.value = objective.value(weight.weights);
    out.weight = std::move(weight);
    out.iterations = iterations;
    return out;
}

AllocationResult optimize_allocation(const Instance& inst, std::optional<double> eta,
                                     std::size_t iterations,
                                     const std::optional<Proportion>& init) {
    return optimize_allocation(AllocationObjective(inst), eta, iterations, init);
}

}  // namespace mobai
