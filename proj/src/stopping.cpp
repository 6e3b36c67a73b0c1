#include "mobai/stopping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mobai/error.hpp"

namespace mobai {

std::string_view to_string(ThresholdMode mode) {
    return mode == ThresholdMode::theoretical ? "theoretical" : "practical";
}

ThresholdMode parse_threshold_mode(std::string_view text) {
    if (text == "theoretical") return ThresholdMode::theoretical;
    if (text == "practical") return ThresholdMode::practical;
    throw Error("unknown threshold mode '" + std::string(text) + "'");
}

double z_statistic(std::span<const std::uint64_t> counts, const Matrix& means_hat) {
    if (counts.size() != means_hat.rows()) throw InvalidShape("counts length must equal arm count");
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] == 0) throw UnvisitedArm("arm " + std::to_string(i + 1) + " has no samples");
    }
    const BestArms best = recommend(means_hat);
    double z = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < means_hat.cols(); ++m) {
        const std::size_t b = best[m];
        const double nb = static_cast<double>(counts[b]);
        for (std::size_t i = 0; i < means_hat.rows(); ++i) {
            if (i == b) continue;
            const double ni = static_cast<double>(counts[i]);
            const double gap = means_hat(b, m) - means_hat(i, m);
            z = std::min(z, ni * nb * gap * gap / (2.0 * (ni + nb)));
        }
    }
    return z;
}

double f_eval(double x, std::size_t mk) {
    if (!(x > 0.0)) throw Error("f is defined for x > 0");
    if (mk == 0) throw Error("f needs MK >= 1");
    // Same recurrence term_{i+1} = term_i * x / i, carried in log space so
    // that e^{-x} cannot underflow for large MK.
    const double log_x = std::log(x);
    double log_term = -x;
    double max_log = log_term;
    std::vector<double> logs;
    logs.reserve(mk);
    logs.push_back(log_term);
    for (std::size_t i = 1; i < mk; ++i) {
        log_term += log_x - std::log(static_cast<double>(i));
        logs.push_back(log_term);
        max_log = std::max(max_log, log_term);
    }
    if (x <= 0.5 * static_cast<double>(mk)) {
        // Far left of the cutoff the sum is 1 minus a tiny upper tail, whose
        // terms shrink by at least half each step. Summing the tail keeps f
        // monotone where the direct sum would wobble at the last ulp.
        double tail_log = log_term + log_x - std::log(static_cast<double>(mk));
        double tail = 0.0;
        for (std::size_t i = mk + 1; tail_log > -745.0; ++i) {
            tail += std::exp(tail_log);
            tail_log += log_x - std::log(static_cast<double>(i));
        }
        return 1.0 - tail;
    }
    double sum = 0.0;
    for (double l : logs) sum += std::exp(l - max_log);
    return std::min(1.0, std::exp(max_log) * sum);
}

double f_inverse(double delta, std::size_t mk) {
    if (!(delta > 0.0 && delta < 1.0)) throw Error("delta must lie in (0, 1)");
    double lo = std::numeric_limits<double>::epsilon();
    double hi = 1.0;
    while (f_eval(hi, mk) >= delta) hi *= 2.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f_eval(mid, mk) > delta) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

StoppingConfig::StoppingConfig(ThresholdMode mode, double delta, std::size_t mk)
    : mode_(mode), delta_(delta), mk_(mk), f_inv_(0.0) {
    if (!(delta > 0.0 && delta < 1.0)) throw Error("delta must lie in (0, 1)");
    if (mk < 2) throw Error("MK must be at least 2");
    if (mode == ThresholdMode::theoretical) f_inv_ = f_inverse(delta, mk);
}

double threshold(std::uint64_t t, const StoppingConfig& cfg) {
    const double tt = static_cast<double>(std::max<std::uint64_t>(t, 1));
    if (cfg.mode() == ThresholdMode::theoretical) {
        return static_cast<double>(cfg.mk()) * std::log(tt * tt + tt) + cfg.f_inverse_delta();
    }
    return std::log((1.0 + std::log(tt)) / cfg.delta());
}

BestArms recommend(const Matrix& means_hat) {
    BestArms out;
    out.arms.resize(means_hat.cols());
    for (std::size_t m = 0; m < means_hat.cols(); ++m) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < means_hat.rows(); ++i) {
            if (means_hat(i, m) > means_hat(best, m)) best = i;
        }
        out.arms[m] = best;
    }
    return out;
}

}  // namespace mobai
