#pragma once

// Independent reference computations for tests. Nothing here calls into the
// optimized paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "mobai/instance.hpp"

namespace oracle {

// argmax with lowest-index ties, recomputed from scratch.
inline std::size_t best_arm(const mobai::Instance& inst, std::size_t m) {
    std::size_t b = 0;
    for (std::size_t i = 1; i < inst.arms(); ++i) {
        if (inst.mean(i, m) > inst.mean(b, m)) b = i;
    }
    return b;
}

inline double pair_value(const mobai::Instance& inst, const std::vector<double>& w, std::size_t i,
                         std::size_t m) {
    const std::size_t b = best_arm(inst, m);
    const double gap = inst.mean(b, m) - inst.mean(i, m);
    if (w[i] + w[b] == 0.0) return 0.0;
    return gap * gap / 2.0 * (w[i] * w[b]) / (w[i] + w[b]);
}

// Central finite differences of one pair term.
inline std::vector<double> fd_gradient(const mobai::Instance& inst, std::vector<double> w,
                                       std::size_t i, std::size_t m, double step = 1e-6) {
    std::vector<double> out(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double keep = w[j];
        w[j] = keep + step;
        const double up = pair_value(inst, w, i, m);
        w[j] = keep - step;
        const double down = pair_value(inst, w, i, m);
        w[j] = keep;
        out[j] = (up - down) / (2.0 * step);
    }
    return out;
}

// Linearization min over pairs, with the derivative written out by hand.
inline double linearization(const mobai::Instance& inst, const std::vector<double>& w,
                            const std::vector<double>& z) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < inst.objectives(); ++m) {
        const std::size_t b = best_arm(inst, m);
        for (std::size_t i = 0; i < inst.arms(); ++i) {
            if (i == b) continue;
            const double gap = inst.mean(b, m) - inst.mean(i, m);
            const double s = w[i] + w[b];
            const double di = gap * gap * w[b] * w[b] / (2.0 * s * s);
            const double db = gap * gap * w[i] * w[i] / (2.0 * s * s);
            const double v = pair_value(inst, w, i, m) + di * (z[i] - w[i]) + db * (z[b] - w[b]);
            best = std::min(best, v);
        }
    }
    return best;
}

inline double objective(const mobai::Instance& inst, const std::vector<double>& w) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < inst.objectives(); ++m) {
        const std::size_t b = best_arm(inst, m);
        for (std::size_t i = 0; i < inst.arms(); ++i) {
            if (i != b) best = std::min(best, pair_value(inst, w, i, m));
        }
    }
    return best;
}

// Cost of moving the pair (i, best) to a tie at the closed-form minimizers
// of the inner infimum: w_i (mu_i - mu'_i)^2 / 2 + w_b (mu_b - mu'_b)^2 / 2.
inline double transport_cost(const mobai::Instance& inst, const std::vector<double>& w,
                             std::size_t i, std::size_t m) {
    const std::size_t b = best_arm(inst, m);
    const double mi = inst.mean(i, m);
    const double mb = inst.mean(b, m);
    const double s = w[i] + w[b];
    const double mi_alt = mi + (mb - mi) * w[b] / s;
    const double mb_alt = mb - (mb - mi) * w[i] / s;
    return w[i] * (mi - mi_alt) * (mi - mi_alt) / 2.0 + w[b] * (mb - mb_alt) * (mb - mb_alt) / 2.0;
}

// f(x) summed term by term from lgamma, for cross-checking.
inline double f_direct(double x, std::size_t mk) {
    double sum = 0.0;
    for (std::size_t i = 1; i <= mk; ++i) {
        const double k = static_cast<double>(i - 1);
        sum += std::exp(k * std::log(x) - x - std::lgamma(k + 1.0));
    }
    return sum;
}

// Grid points of the simplex with coordinates j/resolution (>= floor).
inline void simplex_grid(std::size_t k, std::size_t resolution, double floor,
                         const std::function<void(const std::vector<double>&)>& visit) {
    std::vector<double> p(k);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t idx, std::size_t left) {
        if (idx + 1 == k) {
            p[idx] = static_cast<double>(left) / static_cast<double>(resolution);
            if (p[idx] >= floor) visit(p);
            return;
        }
        for (std::size_t c = 0; c <= left; ++c) {
            p[idx] = static_cast<double>(c) / static_cast<double>(resolution);
            if (p[idx] >= floor) rec(idx + 1, left - c);
        }
    };
    rec(0, resolution);
}

// Random point of the truncated simplex: floor + (1 - K floor) * Dirichlet(1).
inline std::vector<double> random_feasible(std::size_t k, double floor, std::mt19937_64& rng) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> w(k);
    double s = 0.0;
    for (auto& v : w) s += (v = e(rng));
    for (auto& v : w) v = floor + (1.0 - static_cast<double>(k) * floor) * v / s;
    return w;
}

// Random instance with distinct per-objective maxima, means in [-2, 2].
inline mobai::Instance random_instance(std::size_t k, std::size_t m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    while (true) {
        mobai::Matrix means(k, m);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < m; ++j) means(i, j) = u(rng);
        }
        try {
            return mobai::Instance(std::move(means), mobai::TieMode::strict);
        } catch (...) {
        }
    }
}

// Two arms, each best on one objective and nearly tied on the third:
// arm 1 = (100, 0, 50), arm 2 = (0, 100, 50 + eps).
inline mobai::Instance near_tie_instance(double eps) {
    return mobai::Instance({{100.0, 0.0, 50.0}, {0.0, 100.0, 50.0 + eps}});
}

}  // namespace oracle
