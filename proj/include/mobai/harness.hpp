#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mobai/instance.hpp"
#include "mobai/stopping.hpp"

namespace mobai {

// Reward stream: means(arm, .) plus independent N(0, 1) noise per objective.
std::vector<double> sample_rewards(const Instance& inst, std::size_t arm, std::mt19937_64& rng);

// Generator seeding used by trials. Rewards and tie-breaking draw from
// separate mt19937_64 streams derived from the trial seed.
std::mt19937_64 reward_stream(std::uint64_t seed);
std::uint64_t tie_break_seed(std::uint64_t seed);

enum class PolicyKind { mobai, baseline, mose };

struct PolicySpec {
    PolicyKind kind = PolicyKind::mobai;
    double eta = 0.1;             // mobai
    std::size_t iterations = 20;  // baseline
    bool warm_start = false;      // baseline

    // "mobai", "baseline", "baseline-warm" or "mose".
    std::string name() const;
};

PolicySpec parse_policy(const std::string& name, double eta, std::size_t iterations,
                        bool warm_start);

struct TrialConfig {
    std::shared_ptr<const Instance> instance;
    PolicySpec policy;
    double delta = 0.1;
    ThresholdMode threshold = ThresholdMode::practical;
    std::uint64_t seed = 0;
    std::uint64_t pull_cap = 10'000'000;
    bool non_stopping = false;

    void validate() const;
};

struct TrialResult {
    std::size_t trial = 0;
    std::uint64_t tau = 0;
    BestArms recommendation;
    bool correct = false;
    bool capped = false;
    std::string error;  // non-empty when the trial failed
    std::int64_t wall_opt_ns = 0;
    std::int64_t wall_total_ns = 0;
    std::uint64_t seed = 0;
};

TrialResult run_trial(const TrialConfig& cfg);

struct BatchSummary {
    std::string policy;
    double delta = 0.0;
    std::size_t trials = 0;
    double tau_mean = 0.0;
    double tau_std = 0.0;  // sample standard deviation
    double error_rate = 0.0;
    double opt_ms_mean = 0.0;
};

struct BatchResult {
    std::vector<TrialResult> trials;  // indexed by trial number
    BatchSummary summary;
};

// Trial i runs with seed base_seed + i. Up to `workers` threads.
BatchResult run_batch(const TrialConfig& tmpl, std::size_t trials, std::uint64_t base_seed,
                      std::size_t workers);

// Mean and sample std of tau over completed trials; failed, capped and
// incorrect trials all count as errors.
BatchSummary summarize(const TrialConfig& tmpl, std::span<const TrialResult> results);

// Columns: trial, policy, eta, iter, delta, threshold_mode, tau, correct,
// wall_opt_ns, wall_total_ns, seed. `correct` is 1, 0, "capped" or "failed".
void write_results_header(std::ostream& out);
void write_result_row(std::ostream& out, const TrialConfig& cfg, const TrialResult& r);
void write_results_csv(std::ostream& out, const TrialConfig& cfg,
                       std::span<const TrialResult> results);

// Columns: policy, delta, trials, tau_mean, tau_std, error_rate, opt_ms_mean.
void write_summary_csv(std::ostream& out, const BatchSummary& summary);

struct LowerBoundReport {
    double c_star = 0.0;        // 1 / value of the iteration over the full simplex
    double c_tilde = 0.0;       // 1 / value of the iteration over the truncated simplex
    double value_full = 0.0;
    double value_truncated = 0.0;
    std::vector<double> weight_full;
    std::vector<double> weight_truncated;
    std::optional<double> grid_c_star;
    std::optional<double> grid_c_tilde;
    double eta = 0.0;
    std::size_t iterations = 0;
    // c_tilde >= c_star / (1 + eta), up to the iteration tolerance.
    bool relaxation_holds = false;
    // (delta, c_star * log(1 / (4 delta)))
    std::vector<std::pair<double, double>> predicted_tau;
};

LowerBoundReport lowerbound_report(const Instance& inst, double eta, std::size_t iterations,
                                   std::optional<std::size_t> grid_resolution,
                                   const std::vector<double>& deltas);

void print_lowerbound_report(std::ostream& out, const LowerBoundReport& report);

}  // namespace mobai
