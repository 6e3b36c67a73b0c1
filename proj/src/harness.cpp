#include "mobai/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

#include "mobai/error.hpp"
#include "mobai/oracle.hpp"
#include "mobai/policies.hpp"

namespace mobai {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

template <typename Policy>
void drive(Policy& policy, const TrialConfig& cfg, std::mt19937_64& rng, TrialResult& out) {
    const Instance& inst = *cfg.instance;
    const StoppingConfig stop(cfg.threshold, cfg.delta, inst.arms() * inst.objectives());
    auto pull = [&](std::size_t arm) {
        const std::vector<double> reward = sample_rewards(inst, arm, rng);
        policy.observe(arm, reward);
    };
    while (!policy.initialized()) pull(policy.initial_arm());
    while (true) {
        const std::uint64_t t = policy.t();
        if (!cfg.non_stopping &&
            should_stop(z_statistic(policy.counts(), policy.empirical_means()), t, stop)) {
            break;
        }
        if (t >= cfg.pull_cap) {
            out.capped = !cfg.non_stopping;
            break;
        }
        pull(policy.select_arm());
    }
    out.tau = policy.t();
    out.recommendation = recommend(policy.empirical_means());
    out.wall_opt_ns = policy.optimization_ns();
}

void drive_mose(const TrialConfig& cfg, std::mt19937_64& rng, TrialResult& out) {
    const Instance& inst = *cfg.instance;
    SuccessiveElimination se(inst.arms(), inst.objectives(), cfg.delta);
    const RewardFn pull = [&](std::size_t arm) { return sample_rewards(inst, arm, rng); };
    while (!se.finished()) {
        if (se.pulls() + se.active().size() > cfg.pull_cap) {
            out.capped = true;
            break;
        }
        se.sweep(pull);
    }
    out.tau = se.pulls();
    out.recommendation.arms = se.survivors();
    while (out.recommendation.arms.size() < inst.objectives()) {
        out.recommendation.arms.push_back(se.active().front());
    }
}

}  // namespace

std::vector<double> sample_rewards(const Instance& inst, std::size_t arm, std::mt19937_64& rng) {
    if (arm >= inst.arms()) throw InvalidShape("arm index out of range");
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> r(inst.objectives());
    for (std::size_t m = 0; m < r.size(); ++m) r[m] = inst.mean(arm, m) + noise(rng);
    return r;
}

std::mt19937_64 reward_stream(std::uint64_t seed) { return std::mt19937_64(splitmix64(seed)); }

std::uint64_t tie_break_seed(std::uint64_t seed) {
    return splitmix64(seed ^ 0x5851f42d4c957f2dULL);
}

std::string PolicySpec::name() const {
    switch (kind) {
        case PolicyKind::mobai:
            return "mobai";
        case PolicyKind::baseline:
            return warm_start ? "baseline-warm" : "baseline";
        case PolicyKind::mose:
            return "mose";
    }
    return "unknown";
}

PolicySpec parse_policy(const std::string& name, double eta, std::size_t iterations,
                        bool warm_start) {
    PolicySpec spec;
    spec.eta = eta;
    spec.iterations = iterations;
    spec.warm_start = warm_start;
    if (name == "mobai") {
        spec.kind = PolicyKind::mobai;
    } else if (name == "baseline") {
        spec.kind = PolicyKind::baseline;
    } else if (name == "baseline-warm") {
        spec.kind = PolicyKind::baseline;
        spec.warm_start = true;
    } else if (name == "mose") {
        spec.kind = PolicyKind::mose;
    } else {
        throw Error("unknown policy '" + name + "' (mobai, baseline, baseline-warm, mose)");
    }
    return spec;
}

void TrialConfig::validate() const {
    if (!instance) throw Error("trial has no instance");
    if (!(delta > 0.0 && delta < 1.0)) throw Error("delta must lie in (0, 1)");
    if (policy.kind == PolicyKind::mobai && !(policy.eta > 0.0)) throw Error("eta must be positive");
    if (policy.kind == PolicyKind::baseline && policy.iterations < 1) {
        throw Error("baseline needs iter >= 1");
    }
    if (policy.kind == PolicyKind::mose && non_stopping) {
        throw Error("successive elimination has no non-stopping mode");
    }
    if (pull_cap < instance->arms()) throw Error("pull cap must be at least the arm count");
    (void)best_arms(*instance, TieMode::strict);
}

TrialResult run_trial(const TrialConfig& cfg) {
    cfg.validate();
    const auto start = Clock::now();
    TrialResult out;
    out.seed = cfg.seed;
    std::mt19937_64 rng = reward_stream(cfg.seed);
    const Instance& inst = *cfg.instance;

    switch (cfg.policy.kind) {
        case PolicyKind::mobai: {
            MoBai policy(inst.arms(), inst.objectives(), cfg.policy.eta);
            drive(policy, cfg, rng, out);
            break;
        }
        case PolicyKind::baseline: {
            DTracking policy(inst.arms(), inst.objectives(), cfg.policy.iterations,
                             cfg.policy.warm_start, tie_break_seed(cfg.seed));
            drive(policy, cfg, rng, out);
            break;
        }
        case PolicyKind::mose:
            drive_mose(cfg, rng, out);
            break;
    }
    out.correct = !out.capped && out.recommendation == best_arms(inst, TieMode::strict);
    out.wall_total_ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
    return out;
}

BatchResult run_batch(const TrialConfig& tmpl, std::size_t trials, std::uint64_t base_seed,
                      std::size_t workers) {
    if (trials == 0) throw Error("a batch needs at least one trial");
    tmpl.validate();
    BatchResult batch;
    batch.trials.resize(trials);
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < trials; i = next.fetch_add(1)) {
            TrialConfig cfg = tmpl;
            cfg.seed = base_seed + i;
            TrialResult r;
            try {
                r = run_trial(cfg);
            } catch (const std::exception& e) {
                r = TrialResult{};
                r.seed = cfg.seed;
                r.error = e.what();
            }
            r.trial = i;
            batch.trials[i] = std::move(r);
        }
    };

    const std::size_t n = std::clamp<std::size_t>(workers, 1, trials);
    if (n == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n);
        for (std::size_t w = 0; w < n; ++w) pool.emplace_back(work);
    }
    batch.summary = summarize(tmpl, batch.trials);
    return batch;
}

BatchSummary summarize(const TrialConfig& tmpl, std::span<const TrialResult> results) {
    BatchSummary s;
    s.policy = tmpl.policy.name();
    s.delta = tmpl.delta;
    s.trials = results.size();
    std::size_t completed = 0;
    std::size_t errors = 0;
    double tau_sum = 0.0;
    double opt_sum = 0.0;
    for (const auto& r : results) {
        if (!r.correct) ++errors;
        if (!r.error.empty()) continue;
        ++completed;
        tau_sum += static_cast<double>(r.tau);
        opt_sum += static_cast<double>(r.wall_opt_ns) / 1e6;
    }
    if (completed > 0) {
        s.tau_mean = tau_sum / static_cast<double>(completed);
        s.opt_ms_mean = opt_sum / static_cast<double>(completed);
    }
    if (completed > 1) {
        double ss = 0.0;
        for (const auto& r : results) {
            if (!r.error.empty()) continue;
            const double d = static_cast<double>(r.tau) - s.tau_mean;
            ss += d * d;
        }
        s.tau_std = std::sqrt(ss / static_cast<double>(completed - 1));
    }
    s.error_rate = results.empty() ? 0.0
                                   : static_cast<double>(errors) / static_cast<double>(results.size());
    return s;
}

void write_results_header(std::ostream& out) {
    out << "trial,policy,eta,iter,delta,threshold_mode,tau,correct,wall_opt_ns,wall_total_ns,seed\n";
}

void write_result_row(std::ostream& out, const TrialConfig& cfg, const TrialResult& r) {
    const bool mobai = cfg.policy.kind == PolicyKind::mobai;
    const bool baseline = cfg.policy.kind == PolicyKind::baseline;
    out << r.trial << ',' << cfg.policy.name() << ',' << (mobai ? fmt_double(cfg.policy.eta) : "")
        << ',' << (baseline ? std::to_string(cfg.policy.iterations) : "") << ','
        << fmt_double(cfg.delta) << ',' << to_string(cfg.threshold) << ',' << r.tau << ',';
    if (!r.error.empty()) {
        out << "failed";
    } else if (r.capped) {
        out << "capped";
    } else {
        out << (r.correct ? '1' : '0');
    }
    out << ',' << r.wall_opt_ns << ',' << r.wall_total_ns << ',' << r.seed << '\n';
}

void write_results_csv(std::ostream& out, const TrialConfig& cfg,
                       std::span<const TrialResult> results) {
    write_results_header(out);
    for (const auto& r : results) write_result_row(out, cfg, r);
}

void write_summary_csv(std::ostream& out, const BatchSummary& s) {
    out << "policy,delta,trials,tau_mean,tau_std,error_rate,opt_ms_mean\n";
    out << s.policy << ',' << fmt_double(s.delta) << ',' << s.trials << ',' << fmt_double(s.tau_mean)
        << ',' << fmt_double(s.tau_std) << ',' << fmt_double(s.error_rate) << ','
        << fmt_double(s.opt_ms_mean) << '\n';
}

LowerBoundReport lowerbound_report(const Instance& inst, double eta, std::size_t iterations,
                                   std::optional<std::size_t> grid_resolution,
                                   const std::vector<double>& deltas) {
    if (!(eta > 0.0)) throw Error("eta must be positive");
    const AllocationObjective objective(inst);
    const AllocationResult full = optimize_allocation(objective, std::nullopt, iterations);
    const AllocationResult truncated = optimize_allocation(objective, eta, iterations);

    LowerBoundReport rep;
    rep.eta = eta;
    rep.iterations = iterations;
    rep.value_full = full.value;
    rep.value_truncated = truncated.value;
    rep.c_star = 1.0 / full.value;
    rep.c_tilde = 1.0 / truncated.value;
    rep.weight_full = full.weight.weights;
    rep.weight_truncated = truncated.weight.weights;
    rep.relaxation_holds = rep.c_tilde >= rep.c_star / (1.0 + eta) * (1.0 - 1e-6);
    if (grid_resolution && inst.arms() <= 4) {
        const double grid_full = c_star_oracle_grid(inst, 0.0, *grid_resolution).value;
        const double grid_trunc = c_star_oracle_grid(inst, eta, *grid_resolution).value;
        rep.grid_c_star = 1.0 / grid_full;
        rep.grid_c_tilde = 1.0 / grid_trunc;
        rep.relaxation_holds = rep.relaxation_holds &&
                               *rep.grid_c_tilde >= *rep.grid_c_star / (1.0 + eta) * (1.0 - 1e-6);
    }
    for (double d : deltas) rep.predicted_tau.emplace_back(d, rep.c_star * std::log(1.0 / (4.0 * d)));
    return rep;
}

void print_lowerbound_report(std::ostream& out, const LowerBoundReport& r) {
    auto weights = [&](const std::vector<double>& w) {
        out << '[';
        for (std::size_t i = 0; i < w.size(); ++i) out << (i ? ", " : "") << fmt_double(w[i]);
        out << ']';
    };
    out << "iterations       " << r.iterations << '\n';
    out << "c_star           " << fmt_double(r.c_star) << '\n';
    out << "oracle_weight    ";
    weights(r.weight_full);
    out << '\n';
    out << "eta              " << fmt_double(r.eta) << '\n';
    out << "c_tilde          " << fmt_double(r.c_tilde) << '\n';
    out << "truncated_weight ";
    weights(r.weight_truncated);
    out << '\n';
    if (r.grid_c_star) out << "grid_c_star      " << fmt_double(*r.grid_c_star) << '\n';
    if (r.grid_c_tilde) out << "grid_c_tilde     " << fmt_double(*r.grid_c_tilde) << '\n';
    out << "c_tilde >= c_star/(1+eta): " << (r.relaxation_holds ? "yes" : "NO") << '\n';
    out << "delta,predicted_tau\n";
    for (const auto& [d, tau] : r.predicted_tau) out << fmt_double(d) << ',' << fmt_double(tau) << '\n';
}

}  // namespace mobai
