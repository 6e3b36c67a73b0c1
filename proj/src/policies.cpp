#include "mobai/policies.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "mobai/error.hpp"
#include "mobai/lp.hpp"

namespace mobai {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ns(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
}

Matrix means_from(const Matrix& sums, std::span<const std::uint64_t> counts) {
    Matrix out(sums.rows(), sums.cols());
    for (std::size_t i = 0; i < sums.rows(); ++i) {
        const double n = static_cast<double>(counts[i]);
        for (std::size_t m = 0; m < sums.cols(); ++m) {
            out(i, m) = counts[i] ? sums(i, m) / n : 0.0;
        }
    }
    return out;
}

void add_reward(Matrix& sums, std::size_t arm, std::span<const double> reward) {
    if (reward.size() != sums.cols()) throw InvalidShape("reward length must equal objective count");
    for (std::size_t m = 0; m < sums.cols(); ++m) sums(arm, m) += reward[m];
}

void check_shape(std::size_t arms, std::size_t objectives) {
    if (arms < 2 || objectives < 1) throw InvalidShape("need at least 2 arms and 1 objective");
}

}  // namespace

std::size_t buffer_tracking_arm(std::span<const double> buffer, std::span<const double> s) {
    std::size_t best = 0;
    double best_score = buffer[0] + s[0];
    for (std::size_t i = 1; i < buffer.size(); ++i) {
        const double score = buffer[i] + s[i];
        if (score > best_score) {
            best = i;
            best_score = score;
        }
    }
    return best;
}

std::uint64_t power_of_two_floor(std::uint64_t step) {
    return step == 0 ? 0 : std::bit_floor(step);
}

MoBai::MoBai(std::size_t arms, std::size_t objectives, double eta)
    : arms_(arms),
      objectives_(objectives),
      eta_(eta),
      counts_(arms, 0),
      sums_(arms, objectives),
      buffer_(arms, 0.0),
      targets_(arms, 0.0) {
    check_shape(arms, objectives);
    if (!(eta > 0.0)) throw Error("eta must be positive");
}

Matrix MoBai::empirical_means() const { return means_from(sums_, counts_); }

Proportion MoBai::empirical_proportion() const {
    Proportion p{std::vector<double>(arms_, 0.0)};
    const double t = static_cast<double>(t_);
    for (std::size_t i = 0; i < arms_; ++i) {
        p.weights[i] = (static_cast<double>(counts_[i]) + buffer_[i]) / t;
    }
    return p;
}

std::size_t MoBai::initial_arm() const {
    if (initialized()) throw Error("initialization pulls are complete");
    return static_cast<std::size_t>(t_);
}

std::size_t MoBai::select_arm() {
    if (!initialized()) {
        throw NotInitialized("select_arm needs every arm pulled once (t = " + std::to_string(t_) +
                             ", K = " + std::to_string(arms_) + ")");
    }
    const std::uint64_t step = t_ + 1;
    const std::uint64_t epoch = power_of_two_floor(step);
    if (!snapshot_ || epoch != snapshot_epoch_) {
        // Means through max(epoch - 1, K), which is the current sample count
        // whenever a refresh happens.
        snapshot_.emplace(empirical_means(), TieMode::lowest_index);
        snapshot_objective_.emplace(*snapshot_);
        snapshot_epoch_ = epoch;
        snapshot_time_ = t_;
        ++refreshes_;
    }

    const Proportion w = empirical_proportion();
    const auto start = Clock::now();
    Surrogate s = surrogate_proportion(*snapshot_objective_, w.weights, eta_);
    opt_ns_ += elapsed_ns(start);

    pending_arm_ = buffer_tracking_arm(buffer_, s.proportion.weights);
    pending_ = std::move(s.proportion);
    return pending_arm_;
}

void MoBai::observe(std::size_t arm, std::span<const double> reward) {
    if (arm >= arms_) throw ArmMismatch("arm index out of range");
    if (!initialized()) {
        if (arm != t_) {
            throw ArmMismatch("initialization expects arm " + std::to_string(t_ + 1) + ", got " +
                              std::to_string(arm + 1));
        }
        add_reward(sums_, arm, reward);
        ++counts_[arm];
        ++t_;
        if (initialized()) {
            for (std::size_t i = 0; i < arms_; ++i) targets_[i] = static_cast<double>(counts_[i]);
        }
        return;
    }
    if (!pending_ || arm != pending_arm_) {
        throw ArmMismatch("observe() must follow select_arm() with the selected arm");
    }
    add_reward(sums_, arm, reward);
    const auto& s = pending_->weights;
    for (std::size_t i = 0; i < arms_; ++i) {
        buffer_[i] += s[i];
        targets_[i] += s[i];
    }
    buffer_[arm] -= 1.0;
    ++counts_[arm];
    ++t_;
    pending_.reset();
    for (std::size_t i = 0; i < arms_; ++i) {
        if (std::abs(buffer_[i]) > 1.0 + 1e-9) {
            throw Error("buffer of arm " + std::to_string(i + 1) + " left [-1, 1] at t = " +
                        std::to_string(t_));
        }
    }
}

bool needs_forced_exploration(std::span<const std::uint64_t> counts, std::uint64_t t) {
    const auto min_count = *std::min_element(counts.begin(), counts.end());
    return static_cast<double>(min_count) <
           std::sqrt(static_cast<double>(t) / static_cast<double>(counts.size()));
}

std::size_t tracking_arm(std::span<const std::uint64_t> counts, std::span<const double> weight,
                         double step) {
    std::size_t best = 0;
    double best_score = static_cast<double>(counts[0]) - step * weight[0];
    for (std::size_t i = 1; i < counts.size(); ++i) {
        const double score = static_cast<double>(counts[i]) - step * weight[i];
        if (score > best_score) {
            best = i;
            best_score = score;
        }
    }
    return best;
}

Proportion dtrack_subroutine(const Instance& inst_hat, std::size_t iterations,
                             const std::optional<Proportion>& init) {
    return optimize_allocation(inst_hat, std::nullopt, iterations, init).weight;
}

DTracking::DTracking(std::size_t arms, std::size_t objectives, std::size_t iterations,
                     bool warm_start, std::uint64_t seed)
    : arms_(arms),
      objectives_(objectives),
      iterations_(iterations),
      warm_start_(warm_start),
      tie_rng_(seed),
      counts_(arms, 0),
      sums_(arms, objectives) {
    check_shape(arms, objectives);
    if (iterations == 0) throw Error("baseline needs at least one iteration");
}

Matrix DTracking::empirical_means() const { return means_from(sums_, counts_); }

std::size_t DTracking::initial_arm() const {
    if (initialized()) throw Error("initialization pulls are complete");
    return static_cast<std::size_t>(t_);
}

std::size_t DTracking::select_arm() {
    if (!initialized()) throw NotInitialized("select_arm needs every arm pulled once");
    const std::uint64_t step = t_ + 1;
    if (needs_forced_exploration(counts_, t_)) {
        last_forced_ = true;
        const auto min_count = *std::min_element(counts_.begin(), counts_.end());
        std::vector<std::size_t> ties;
        for (std::size_t i = 0; i < arms_; ++i) {
            if (counts_[i] == min_count) ties.push_back(i);
        }
        std::uniform_int_distribution<std::size_t> pick(0, ties.size() - 1);
        selected_ = ties.size() == 1 ? ties.front() : ties[pick(tie_rng_)];
        return *selected_;
    }
    last_forced_ = false;
    const Instance inst_hat(empirical_means(), TieMode::lowest_index);
    std::optional<Proportion> init;
    if (warm_start_) init = last_weight_;
    const auto start = Clock::now();
    last_weight_ = dtrack_subroutine(inst_hat, iterations_, init);
    opt_ns_ += elapsed_ns(start);
    selected_ = tracking_arm(counts_, last_weight_->weights, static_cast<double>(step));
    return *selected_;
}

void DTracking::observe(std::size_t arm, std::span<const double> reward) {
    if (arm >= arms_) throw ArmMismatch("arm index out of range");
    if (!initialized()) {
        if (arm != t_) throw ArmMismatch("initialization pulls go in arm order");
    } else if (!selected_ || *selected_ != arm) {
        throw ArmMismatch("observe() must follow select_arm() with the selected arm");
    }
    add_reward(sums_, arm, reward);
    ++counts_[arm];
    ++t_;
    selected_.reset();
}

double mose_radius(std::uint64_t t, std::size_t mk, double delta) {
    const double tt = static_cast<double>(t);
    return std::sqrt(2.0 * std::log(4.0 * static_cast<double>(mk) * tt * tt / delta) / tt);
}

SuccessiveElimination::SuccessiveElimination(std::size_t arms, std::size_t objectives,
                                             double delta)
    : arms_(arms), objectives_(objectives), delta_(delta) {
    check_shape(arms, objectives);
    if (!(delta > 0.0 && delta < 1.0)) throw Error("delta must lie in (0, 1)");
    start_round();
}

void SuccessiveElimination::start_round() {
    active_.resize(arms_);
    for (std::size_t i = 0; i < arms_; ++i) active_[i] = i;
    round_sums_.assign(arms_, 0.0);
    round_samples_ = 0;
}

std::size_t SuccessiveElimination::sweep(const RewardFn& pull) {
    if (finished()) throw Error("successive elimination already finished");
    for (std::size_t arm : active_) {
        const std::vector<double> r = pull(arm);
        if (r.size() != objectives_) throw InvalidShape("reward length must equal objective count");
        round_sums_[arm] += r[objective_];
    }
    const std::size_t pulled = active_.size();
    t_ += pulled;
    ++round_samples_;

    // Every active arm has round_samples_ samples this round.
    const double n = static_cast<double>(round_samples_);
    const double alpha = mose_radius(t_, arms_ * objectives_, delta_);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t arm : active_) best = std::max(best, round_sums_[arm] / n);
    std::erase_if(active_, [&](std::size_t arm) { return best - round_sums_[arm] / n > 2.0 * alpha; });

    if (active_.size() == 1) {
        survivors_.push_back(active_.front());
        ++objective_;
        if (!finished()) start_round();
    }
    return pulled;
}

MoSeResult mose_run(const Instance& inst, double delta, const RewardFn& pull,
                    std::uint64_t pull_cap) {
    SuccessiveElimination se(inst.arms(), inst.objectives(), delta);
    while (!se.finished()) {
        if (se.pulls() + se.active().size() > pull_cap) {
            throw CapExceeded("successive elimination exceeded the pull cap of " +
                              std::to_string(pull_cap));
        }
        se.sweep(pull);
    }
    return MoSeResult{BestArms{se.survivors()}, se.pulls()};
}

}  // namespace mobai
