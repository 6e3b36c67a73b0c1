#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "mobai/instance.hpp"
#include "mobai/matrix.hpp"
#include "mobai/oracle.hpp"

namespace mobai {

// Draws one M-dimensional reward for an arm.
using RewardFn = std::function<std::vector<double>(std::size_t arm)>;

// argmax_i (buffer_i + s_i), lowest index on ties.
std::size_t buffer_tracking_arm(std::span<const double> buffer, std::span<const double> s);

// Largest power of two <= step (step >= 1).
std::uint64_t power_of_two_floor(std::uint64_t step);

// Surrogate-proportion tracking policy.
//
// The first K pulls visit arms 0..K-1 in order. Afterwards each step solves
// one LP for the surrogate proportion s at the current empirical proportion
// (counts + buffer) / t, against a snapshot of the empirical means that is
// refreshed only when the step index crosses a power of two, and pulls
// argmax(buffer + s). observe() then moves the buffer by s - onehot(arm).
class MoBai {
public:
    MoBai(std::size_t arms, std::size_t objectives, double eta);

    std::size_t arms() const noexcept { return arms_; }
    std::size_t objectives() const noexcept { return objectives_; }
    double eta() const noexcept { return eta_; }
    std::uint64_t t() const noexcept { return t_; }
    bool initialized() const noexcept { return t_ >= arms_; }

    std::span<const std::uint64_t> counts() const noexcept { return counts_; }
    std::span<const double> buffer() const noexcept { return buffer_; }
    const Matrix& reward_sums() const noexcept { return sums_; }
    Matrix empirical_means() const;

    // (counts + buffer) / t, defined for t >= 1.
    Proportion empirical_proportion() const;

    // counts at t = K plus the sum of every surrogate proportion tracked
    // since; equals counts + buffer.
    std::span<const double> target_totals() const noexcept { return targets_; }

    // Arm for the next initialization pull (t < K).
    std::size_t initial_arm() const;

    // Throws NotInitialized when t < K.
    std::size_t select_arm();

    // Throws ArmMismatch unless `arm` is the arm that was just selected (or
    // the next initialization arm). Throws Error if the buffer leaves [-1, 1].
    void observe(std::size_t arm, std::span<const double> reward);

    const std::optional<Proportion>& pending() const noexcept { return pending_; }
    const std::optional<Instance>& snapshot() const noexcept { return snapshot_; }
    // Sample count whose means the snapshot holds.
    std::uint64_t snapshot_time() const noexcept { return snapshot_time_; }
    std::size_t snapshot_refreshes() const noexcept { return refreshes_; }
    std::int64_t optimization_ns() const noexcept { return opt_ns_; }

private:
    std::size_t arms_;
    std::size_t objectives_;
    double eta_;
    std::uint64_t t_ = 0;
    std::vector<std::uint64_t> counts_;
    Matrix sums_;
    std::vector<double> buffer_;
    std::vector<double> targets_;

    std::optional<Instance> snapshot_;
    std::optional<AllocationObjective> snapshot_objective_;
    std::uint64_t snapshot_epoch_ = 0;
    std::uint64_t snapshot_time_ = 0;
    std::size_t refreshes_ = 0;

    std::optional<Proportion> pending_;
    std::size_t pending_arm_ = 0;
    std::int64_t opt_ns_ = 0;
};

// True when min_i counts_i < sqrt(t / K), t being the number of pulls so far.
bool needs_forced_exploration(std::span<const std::uint64_t> counts, std::uint64_t t);

// argmax_i counts_i - step * weight_i, lowest index on ties.
std::size_t tracking_arm(std::span<const std::uint64_t> counts, std::span<const double> weight,
                         double step);

// Iterate-and-average allocation over the full simplex (no truncation).
Proportion dtrack_subroutine(const Instance& inst_hat, std::size_t iterations,
                             const std::optional<Proportion>& init = std::nullopt);

// D-tracking baseline: forced exploration of the least-pulled arm (ties
// drawn uniformly from a seeded generator), otherwise track the weight
// returned by dtrack_subroutine on the current empirical instance.
class DTracking {
public:
    DTracking(std::size_t arms, std::size_t objectives, std::size_t iterations, bool warm_start,
              std::uint64_t seed);

    std::size_t arms() const noexcept { return arms_; }
    std::size_t objectives() const noexcept { return objectives_; }
    std::uint64_t t() const noexcept { return t_; }
    bool initialized() const noexcept { return t_ >= arms_; }
    std::span<const std::uint64_t> counts() const noexcept { return counts_; }
    const Matrix& reward_sums() const noexcept { return sums_; }
    Matrix empirical_means() const;

    std::size_t initial_arm() const;
    std::size_t select_arm();
    void observe(std::size_t arm, std::span<const double> reward);

    const std::optional<Proportion>& last_weight() const noexcept { return last_weight_; }
    bool last_forced() const noexcept { return last_forced_; }
    std::int64_t optimization_ns() const noexcept { return opt_ns_; }

private:
    std::size_t arms_;
    std::size_t objectives_;
    std::size_t iterations_;
    bool warm_start_;
    std::mt19937_64 tie_rng_;
    std::uint64_t t_ = 0;
    std::vector<std::uint64_t> counts_;
    Matrix sums_;
    std::optional<Proportion> last_weight_;
    bool last_forced_ = false;
    std::optional<std::size_t> selected_;
    std::int64_t opt_ns_ = 0;
};

// alpha_t = sqrt(2 ln(4 M K t^2 / delta) / t).
double mose_radius(std::uint64_t t, std::size_t mk, double delta);

// Successive elimination run objective by objective. Each round restarts
// with every arm active and uses only its own samples.
class SuccessiveElimination {
public:
    SuccessiveElimination(std::size_t arms, std::size_t objectives, double delta);

    bool finished() const noexcept { return objective_ == objectives_; }
    std::size_t current_objective() const noexcept { return objective_; }
    const std::vector<std::size_t>& active() const noexcept { return active_; }
    std::uint64_t pulls() const noexcept { return t_; }
    const std::vector<std::size_t>& survivors() const noexcept { return survivors_; }

    // Pulls every active arm once, then eliminates. Returns the number of pulls.
    std::size_t sweep(const RewardFn& pull);

private:
    void start_round();

    std::size_t arms_;
    std::size_t objectives_;
    double delta_;
    std::uint64_t t_ = 0;
    std::size_t objective_ = 0;
    std::vector<std::size_t> active_;
    std::vector<double> round_sums_;
    std::uint64_t round_samples_ = 0;
    std::vector<std::size_t> survivors_;
};

struct MoSeResult {
    BestArms arms;
    std::uint64_t pulls = 0;
};

// Throws CapExceeded if the next sweep would take the total past pull_cap.
MoSeResult mose_run(const Instance& inst, double delta, const RewardFn& pull,
                    std::uint64_t pull_cap);

}  // namespace mobai
