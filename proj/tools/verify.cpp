#include "verify.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include "mobai/lp.hpp"
#include "mobai/oracle.hpp"
#include "mobai/stopping.hpp"
#include "oracles.hpp"

using namespace mobai;

namespace {

struct Check {
    std::string name;
    double worst;
    double tol;
};

Check gradient_check() {
    std::mt19937_64 rng(1);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
        const Instance inst = oracle::random_instance(2 + n % 4, 1 + n % 3, rng);
        const auto w = oracle::random_feasible(inst.arms(), eta_floor(inst.arms(), 0.1), rng);
        const BestArms best = best_arms(inst);
        for (std::size_t m = 0; m < inst.objectives(); ++m) {
            for (std::size_t i = 0; i < inst.arms(); ++i) {
                if (i == best[m]) continue;
                const auto a = grad_g_term(inst, w, i, m);
                const auto b = oracle::fd_gradient(inst, w, i, m);
                double num = 0.0, den = 0.0;
                for (std::size_t j = 0; j < a.size(); ++j) {
                    num = std::max(num, std::abs(a[j] - b[j]));
                    den = std::max(den, std::abs(b[j]));
                }
                worst = std::max(worst, num / den);
            }
        }
    }
    return {"gradient vs central differences (relative)", worst, 1e-6};
}

// Positive when some grid point beats the LP, or the LP beats the grid by
// more than the lattice spacing allows.
Check lp_grid_check() {
    std::mt19937_64 rng(2);
    const std::size_t res = 300;
    double worst = 0.0;
    for (int n = 0; n < 20; ++n) {
        const std::size_t k = 2 + n % 2;
        const Instance inst = oracle::random_instance(k, 1 + n % 3, rng);
        const double floor = eta_floor(k, 0.1);
        const auto w = oracle::random_feasible(k, floor, rng);
        const Surrogate s = surrogate_proportion(inst, w, 0.1);
        const double span = 1.0 - static_cast<double>(k) * floor;
        double gmax = 0.0;
        const BestArms best = best_arms(inst);
        for (std::size_t m = 0; m < inst.objectives(); ++m) {
            for (std::size_t i = 0; i < k; ++i) {
                if (i != best[m]) {
                    for (double d : grad_g_term(inst, w, i, m)) gmax = std::max(gmax, d);
                }
            }
        }
        double grid_max = -INFINITY;
        std::vector<double> z(k);
        oracle::simplex_grid(k, res, 0.0, [&](const std::vector<double>& p) {
            for (std::size_t i = 0; i < k; ++i) z[i] = floor + span * p[i];
            const double v = oracle::linearization(inst, w, z);
            grid_max = std::max(grid_max, v);
            worst = std::max(worst, v - s.value);
        });
        worst = std::max(worst, s.value - grid_max - gmax / static_cast<double>(res));
    }
    return {"LP optimum vs truncated-simplex grid", worst, 1e-12};
}

Check f_check() {
    double worst = 0.0;
    for (double delta : {0.3, 0.1, 0.01, 1e-6}) {
        for (std::size_t mk : {2u, 10u, 200u}) {
            worst = std::max(worst, std::abs(f_eval(f_inverse(delta, mk), mk) - delta));
        }
    }
    for (std::size_t mk : {1u, 3u, 40u}) {
        for (double x : {0.5, 4.0, 60.0}) {
            worst = std::max(worst, std::abs(f_eval(x, mk) - oracle::f_direct(x, mk)));
        }
    }
    return {"f roundtrip and direct summation", worst, 1e-10};
}

Check z_check() {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::uint64_t> count(1, 1000);
    double worst = 0.0;
    for (int n = 0; n < 500; ++n) {
        const Instance inst = oracle::random_instance(2 + n % 5, 1 + n % 3, rng);
        std::vector<std::uint64_t> counts(inst.arms());
        std::uint64_t t = 0;
        for (auto& c : counts) t += (c = count(rng));
        std::vector<double> w(counts.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(counts[i]) / static_cast<double>(t);
        const double z = z_statistic(counts, inst.means());
        worst = std::max(worst, std::abs(z - static_cast<double>(t) * oracle::objective(inst, w)));
    }
    return {"Z statistic vs t g(counts / t)", worst, 1e-9};
}

}  // namespace

int run_verify(std::ostream& out) {
    int failed = 0;
    for (const Check& c : {gradient_check(), lp_grid_check(), f_check(), z_check()}) {
        const bool ok = c.worst <= c.tol;
        if (!ok) ++failed;
        out << (ok ? "ok    " : "FAIL  ") << c.name << ": " << c.worst << " (tol " << c.tol << ")\n";
    }
    return failed;
}
