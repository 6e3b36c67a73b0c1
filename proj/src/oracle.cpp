#include "mobai/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mobai/error.hpp"

namespace mobai {

Proportion uniform_proportion(std::size_t arms) {
    return Proportion{std::vector<double>(arms, 1.0 / static_cast<double>(arms))};
}

double eta_floor(std::size_t arms, double eta) {
    return eta / (static_cast<double>(arms) * (1.0 + eta));
}

bool is_proportion(std::span<const double> w, double tol) {
    double sum = 0.0;
    for (double v : w) {
        if (!(v >= -tol)) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

bool is_eta_feasible(std::span<const double> w, double eta, double tol) {
    if (!is_proportion(w, tol)) return false;
    const double floor = eta_floor(w.size(), eta);
    return std::all_of(w.begin(), w.end(), [&](double v) { return v >= floor - tol; });
}

AllocationObjective::AllocationObjective(const Instance& inst)
    : arms_(inst.arms()), best_(best_arms(inst)) {
    terms_.reserve(inst.objectives() * (inst.arms() - 1));
    for (std::size_t m = 0; m < inst.objectives(); ++m) {
        const std::size_t b = best_[m];
        for (std::size_t i = 0; i < inst.arms(); ++i) {
            if (i == b) continue;
            const double gap = inst.mean(b, m) - inst.mean(i, m);
            terms_.push_back(PairTerm{i, b, m, 0.5 * gap * gap});
        }
    }
}

double AllocationObjective::term_value(const PairTerm& term, std::span<const double> w) const {
    const double a = w[term.arm];
    const double b = w[term.best];
    if (a == 0.0 && b == 0.0) return 0.0;
    return term.half_sq_gap * a * b / (a + b);
}

std::pair<double, double> AllocationObjective::term_gradient(const PairTerm& term,
                                                             std::span<const double> w) const {
    const double a = w[term.arm];
    const double b = w[term.best];
    const double denom = a + b;
    if (denom == 0.0) {
        throw DegenerateDenominator("gradient undefined: arm " + std::to_string(term.arm + 1) +
                                    " and best arm " + std::to_string(term.best + 1) +
                                    " both have zero weight");
    }
    const double inv = 1.0 / (denom * denom);
    return {term.half_sq_gap * b * b * inv, term.half_sq_gap * a * a * inv};
}

double AllocationObjective::value(std::span<const double> w) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& term : terms_) best = std::min(best, term_value(term, w));
    return best;
}

double AllocationObjective::linearized(std::span<const double> w,
                                       std::span<const double> z) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& term : terms_) {
        const auto [da, db] = term_gradient(term, w);
        const double v = term_value(term, w) + da * (z[term.arm] - w[term.arm]) +
                         db * (z[term.best] - w[term.best]);
        best = std::min(best, v);
    }
    return best;
}

namespace {

const PairTerm& find_term(const AllocationObjective& obj, std::size_t arm, std::size_t objective) {
    if (objective >= obj.best().size() || arm >= obj.arms()) {
        throw InvalidShape("arm or objective out of range");
    }
    if (obj.best()[objective] == arm) {
        throw BestArmArgument("arm " + std::to_string(arm + 1) + " is the best arm of objective " +
                              std::to_string(objective + 1));
    }
    for (const auto& term : obj.terms()) {
        if (term.arm == arm && term.objective == objective) return term;
    }
    throw BestArmArgument("no term for the requested pair");
}

void check_width(const Instance& inst, std::span<const double> w) {
    if (w.size() != inst.arms()) throw InvalidShape("weight vector length must equal arm count");
}

}  // namespace

double g_term(const Instance& inst, std::span<const double> w, std::size_t arm,
              std::size_t objective) {
    check_width(inst, w);
    const AllocationObjective obj(inst);
    return obj.term_value(find_term(obj, arm, objective), w);
}

double g(const Instance& inst, std::span<const double> w) {
    check_width(inst, w);
    return AllocationObjective(inst).value(w);
}

std::vector<double> grad_g_term(const Instance& inst, std::span<const double> w, std::size_t arm,
                                std::size_t objective) {
    check_width(inst, w);
    const AllocationObjective obj(inst);
    const PairTerm& term = find_term(obj, arm, objective);
    const auto [da, db] = obj.term_gradient(term, w);
    std::vector<double> out(inst.arms(), 0.0);
    out[term.arm] = da;
    out[term.best] = db;
    return out;
}

double h(const Instance& inst, std::span<const double> w, std::span<const double> z) {
    check_width(inst, w);
    check_width(inst, z);
    return AllocationObjective(inst).linearized(w, z);
}

double curvature_bound(const Instance& inst, double eta) {
    if (!(eta > 0.0)) throw Error("curvature bound needs eta > 0");
    const AllocationObjective obj(inst);
    double max_sq_gap = 0.0;
    for (const auto& term : obj.terms()) max_sq_gap = std::max(max_sq_gap, 2.0 * term.half_sq_gap);
    return 2.0 * max_sq_gap * (1.0 + eta) * static_cast<double>(inst.arms()) / eta;
}

AllocationResult c_star_oracle_grid(const Instance& inst, double eta, std::size_t resolution) {
    if (inst.arms() > 4) throw TooManyArms("grid oracle supports at most 4 arms");
    if (resolution == 0) throw Error("grid resolution must be positive");
    const AllocationObjective obj(inst);
    const double floor = eta > 0.0 ? eta_floor(inst.arms(), eta) : 0.0;

    AllocationResult best;
    best.value = -1.0;
    std::size_t visited = 0;
    for_each_simplex_point(inst.arms(), resolution, floor, [&](std::span<const double> p) {
        ++visited;
        const double v = obj.value(p);
        if (v > best.value) {
            best.value = v;
            best.weight.weights.assign(p.begin(), p.end());
        }
    });
    if (visited == 0) throw LpInfeasible("no grid point lies in the truncated simplex");
    best.iterations = visited;
    return best;
}

}  // namespace mobai
