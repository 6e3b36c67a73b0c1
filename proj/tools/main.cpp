#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mobai/error.hpp"
#include "mobai/harness.hpp"
#include "mobai/instance.hpp"
#include "verify.hpp"

using namespace mobai;
using json = nlohmann::json;

namespace {

// Turns a flat JSON object of long flag names into command-line tokens.
// They are placed ahead of the real flags, so the real flags win.
std::vector<std::string> config_args(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error("config " + path + ": " + e.what());
    }
    if (!j.is_object()) throw Error("config " + path + " must hold a JSON object");
    std::vector<std::string> args;
    for (const auto& [key, value] : j.items()) {
        std::string flag = "--" + key;
        for (char& c : flag) {
            if (c == '_') c = '-';
        }
        if (flag == "--config") throw Error("config files cannot nest");
        if (value.is_boolean()) {
            args.push_back(flag + "=" + (value.get<bool>() ? "true" : "false"));
        } else if (value.is_array()) {
            args.push_back(flag);
            for (const auto& v : value) args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        } else {
            args.push_back(flag);
            args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
        }
    }
    return args;
}

struct InstanceSource {
    std::string path;
    std::optional<std::size_t> k;
    std::optional<std::size_t> m;
    std::uint64_t gen_seed = 0;
    double scale = 1.0;

    void add_to(CLI::App* app) {
        app->add_option("--instance", path, "instance CSV (header K,M then K rows)");
        app->add_option("--k", k, "arms of a synthetic instance (instead of --instance)");
        app->add_option("--m", m, "objectives of a synthetic instance");
        app->add_option("--gen-seed", gen_seed, "seed of the synthetic instance");
        app->add_option("--scale", scale, "multiply every mean in the CSV by this factor");
    }

    Instance load() const {
        if (!path.empty()) return load_instance_csv(path, scale);
        if (k && m) return gen_synthetic(*k, *m, gen_seed);
        throw Error("give --instance or both --k and --m");
    }
};

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-objective best arm identification: simulation and lower-bound tools"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "write a synthetic instance");
    std::size_t gen_k = 0, gen_m = 0;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    gen->add_option("--k", gen_k, "number of arms")->required()->check(CLI::Range(2, 1 << 20));
    gen->add_option("--m", gen_m, "number of objectives")->required()->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output CSV")->required();

    // run
    auto* run = app.add_subcommand("run", "run a batch of seeded trials");
    run->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::string config_path;
    run->add_option("--config", config_path, "JSON file with any of the flags below; flags win");
    InstanceSource run_src;
    run_src.add_to(run);
    std::string policy = "mobai", threshold = "practical", out_path, summary_path;
    double eta = 0.1, delta = 0.1;
    std::size_t iter = 20, trials = 1;
    std::uint64_t seed = 0, cap = 10'000'000;
    std::size_t workers = 0;
    bool warm = false, non_stopping = false;
    run->add_option("--policy", policy, "mobai | baseline | baseline-warm | mose")
        ->check(CLI::IsMember({"mobai", "baseline", "baseline-warm", "mose"}));
    run->add_option("--eta", eta, "MO-BAI truncation parameter")->check(CLI::PositiveNumber);
    run->add_option("--iter", iter, "baseline subroutine iterations")->check(CLI::PositiveNumber);
    run->add_flag("--warm-start", warm, "baseline starts each subroutine from its last weight");
    run->add_option("--delta", delta, "confidence level")->check(CLI::Range(0.0, 1.0));
    run->add_option("--threshold", threshold, "practical | theoretical")
        ->check(CLI::IsMember({"practical", "theoretical"}));
    run->add_option("--trials", trials, "number of trials")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "trial i uses seed + i");
    run->add_option("--workers", workers, "parallel workers (default: all cores)")
        ->envname("MOBAI_WORKERS");
    run->add_option("--cap", cap, "pull cap per trial");
    run->add_option("--out", out_path, "per-trial results CSV (required)");
    run->add_option("--summary", summary_path, "summary CSV (also printed)");
    run->add_flag("--non-stopping", non_stopping, "ignore the stopping rule and pull until --cap");

    // lowerbound
    auto* lb = app.add_subcommand("lowerbound", "characteristic constants of an instance");
    InstanceSource lb_src;
    lb_src.add_to(lb);
    double lb_eta = 0.1;
    std::size_t lb_iters = 100000;
    std::optional<std::size_t> lb_grid;
    std::vector<double> lb_deltas{0.1, 0.01, 0.001, 1e-6};
    bool lb_json = false;
    lb->add_option("--eta", lb_eta, "truncation parameter")->check(CLI::PositiveNumber);
    lb->add_option("--iters", lb_iters, "iterations of the averaging scheme")->check(CLI::PositiveNumber);
    lb->add_option("--grid", lb_grid, "grid resolution for the brute-force oracle (K <= 4)")
        ->check(CLI::PositiveNumber);
    lb->add_option("--deltas", lb_deltas, "confidence levels for the predicted stopping time");
    lb->add_flag("--json", lb_json, "print JSON instead of text");

    auto* ver = app.add_subcommand("verify", "cross-check the library against reference computations");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed() && !config_path.empty()) {
        std::vector<std::string> args;
        try {
            args = config_args(config_path);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 2;
        }
        // Re-parse as: run <config flags> <command-line flags>.
        bool after_run = false;
        args.insert(args.begin(), "run");
        for (int i = 1; i < argc; ++i) {
            const std::string a = argv[i];
            if (after_run) args.push_back(a);
            if (a == "run") after_run = true;
        }
        std::reverse(args.begin(), args.end());
        app.clear();
        try {
            app.parse(args);
        } catch (const CLI::ParseError& e) {
            return app.exit(e);
        }
    }

    try {
        if (gen->parsed()) {
            save_instance_csv(gen_out, gen_synthetic(gen_k, gen_m, gen_seed));
            std::cout << gen_out << '\n';
            return 0;
        }

        if (run->parsed()) {
            if (out_path.empty()) throw Error("run needs --out");
            TrialConfig cfg;
            cfg.instance = std::make_shared<const Instance>(run_src.load());
            cfg.policy = parse_policy(policy, eta, iter, warm);
            cfg.delta = delta;
            cfg.threshold = parse_threshold_mode(threshold);
            cfg.pull_cap = cap;
            cfg.non_stopping = non_stopping;
            if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
            const BatchResult batch = run_batch(cfg, trials, seed, workers);
            auto out = open_out(out_path);
            write_results_csv(out, cfg, batch.trials);
            if (!summary_path.empty()) {
                auto s = open_out(summary_path);
                write_summary_csv(s, batch.summary);
            }
            write_summary_csv(std::cout, batch.summary);
            for (const auto& r : batch.trials) {
                if (!r.error.empty()) std::cerr << "trial " << r.trial << " failed: " << r.error << '\n';
            }
            return 0;
        }

        if (lb->parsed()) {
            const Instance inst = lb_src.load();
            const LowerBoundReport rep = lowerbound_report(inst, lb_eta, lb_iters, lb_grid, lb_deltas);
            if (lb_json) {
                json j{{"c_star", rep.c_star},
                       {"c_tilde", rep.c_tilde},
                       {"eta", rep.eta},
                       {"iterations", rep.iterations},
                       {"oracle_weight", rep.weight_full},
                       {"truncated_weight", rep.weight_truncated},
                       {"relaxation_holds", rep.relaxation_holds}};
                if (rep.grid_c_star) j["grid_c_star"] = *rep.grid_c_star;
                if (rep.grid_c_tilde) j["grid_c_tilde"] = *rep.grid_c_tilde;
                for (const auto& [d, tau] : rep.predicted_tau) {
                    j["predicted_tau"].push_back({{"delta", d}, {"tau", tau}});
                }
                std::cout << j.dump(2) << '\n';
            } else {
                print_lowerbound_report(std::cout, rep);
            }
            return rep.relaxation_holds ? 0 : 1;
        }

        if (ver->parsed()) return run_verify(std::cout) == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
