#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "mobai/instance.hpp"
#include "mobai/matrix.hpp"

namespace mobai {

enum class ThresholdMode { theoretical, practical };

std::string_view to_string(ThresholdMode mode);
ThresholdMode parse_threshold_mode(std::string_view text);

// Chernoff-type statistic
//
//   Z = min_{m, i != best_m} N_i N_best gap^2 / (2 (N_i + N_best))
//
// with best_m the lowest-index empirical argmax. Throws UnvisitedArm if any
// count is zero.
double z_statistic(std::span<const std::uint64_t> counts, const Matrix& means_hat);

// f(x) = sum_{i=1}^{MK} x^{i-1} e^{-x} / (i-1)!, i.e. P(Poisson(x) <= MK - 1).
double f_eval(double x, std::size_t mk);

// Unique x > 0 with f_eval(x, mk) == delta, by bisection to 1e-12.
double f_inverse(double delta, std::size_t mk);

// Confidence level, threshold mode and M*K. f^{-1}(delta) is computed once.
class StoppingConfig {
public:
    StoppingConfig(ThresholdMode mode, double delta, std::size_t mk);

    ThresholdMode mode() const noexcept { return mode_; }
    double delta() const noexcept { return delta_; }
    std::size_t mk() const noexcept { return mk_; }
    double f_inverse_delta() const noexcept { return f_inv_; }

private:
    ThresholdMode mode_;
    double delta_;
    std::size_t mk_;
    double f_inv_;
};

// theoretical: MK log(t^2 + t) + f^{-1}(delta)
// practical:   log((1 + log t) / delta)
double threshold(std::uint64_t t, const StoppingConfig& cfg);

// Strict comparison Z > threshold.
inline bool should_stop(double z, std::uint64_t t, const StoppingConfig& cfg) {
    return z > threshold(t, cfg);
}

// Per-objective lowest-index empirical argmax.
BestArms recommend(const Matrix& means_hat);

}  // namespace mobai
