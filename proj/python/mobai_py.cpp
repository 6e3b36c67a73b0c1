#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mobai/error.hpp"
#include "mobai/harness.hpp"
#include "mobai/lp.hpp"
#include "mobai/oracle.hpp"
#include "mobai/stopping.hpp"

namespace py = pybind11;
using namespace mobai;

namespace {

std::vector<std::vector<double>> to_rows(const Matrix& m) {
    std::vector<std::vector<double>> out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) out[r].assign(m.row(r).begin(), m.row(r).end());
    return out;
}

TieMode parse_tie(const std::string& s) {
    if (s == "strict") return TieMode::strict;
    if (s == "lowest_index") return TieMode::lowest_index;
    throw Error("tie mode must be 'strict' or 'lowest_index'");
}

py::dict trial_dict(const TrialResult& r) {
    py::dict d;
    d["trial"] = r.trial;
    d["tau"] = r.tau;
    d["recommendation"] = r.recommendation.arms;
    d["correct"] = r.correct;
    d["capped"] = r.capped;
    d["error"] = r.error;
    d["wall_opt_ns"] = r.wall_opt_ns;
    d["wall_total_ns"] = r.wall_total_ns;
    d["seed"] = r.seed;
    return d;
}

py::dict summary_dict(const BatchSummary& s) {
    py::dict d;
    d["policy"] = s.policy;
    d["delta"] = s.delta;
    d["trials"] = s.trials;
    d["tau_mean"] = s.tau_mean;
    d["tau_std"] = s.tau_std;
    d["error_rate"] = s.error_rate;
    d["opt_ms_mean"] = s.opt_ms_mean;
    return d;
}

TrialConfig make_config(const Instance& inst, const std::string& policy, double eta,
                        std::size_t iterations, bool warm_start, double delta,
                        const std::string& threshold_mode, std::uint64_t pull_cap,
                        bool non_stopping) {
    TrialConfig cfg;
    cfg.instance = std::make_shared<const Instance>(inst);
    cfg.policy = parse_policy(policy, eta, iterations, warm_start);
    cfg.delta = delta;
    cfg.threshold = parse_threshold_mode(threshold_mode);
    cfg.pull_cap = pull_cap;
    cfg.non_stopping = non_stopping;
    cfg.validate();
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multi-objective best arm identification";
    py::register_exception<Error>(m, "MobaiError", PyExc_ValueError);

    py::class_<Instance>(m, "Instance")
        .def(py::init([](const std::vector<std::vector<double>>& rows, const std::string& tie) {
                 return Instance(rows, parse_tie(tie));
             }),
             py::arg("means"), py::arg("tie_mode") = "strict")
        .def_property_readonly("arms", &Instance::arms)
        .def_property_readonly("objectives", &Instance::objectives)
        .def_property_readonly("means", [](const Instance& i) { return to_rows(i.means()); })
        .def("best_arms", [](const Instance& i) { return best_arms(i).arms; })
        .def("gaps", [](const Instance& i) { return to_rows(gaps(i).gaps); })
        .def("to_csv", [](const Instance& i) {
            std::ostringstream out;
            write_instance_csv(out, i);
            return out.str();
        })
        .def_static("from_csv", [](const std::string& text, double scale) {
            std::istringstream in(text);
            return parse_instance_csv(in, scale);
        }, py::arg("text"), py::arg("scale") = 1.0)
        .def("__repr__", [](const Instance& i) {
            return "Instance(arms=" + std::to_string(i.arms()) +
                   ", objectives=" + std::to_string(i.objectives()) + ")";
        });

    m.def("gen_synthetic", &gen_synthetic, py::arg("arms"), py::arg("objectives"), py::arg("seed"));
    m.def("load_instance", [](const std::string& path, double scale) {
        return load_instance_csv(path, scale);
    }, py::arg("path"), py::arg("scale") = 1.0);

    m.def("g", [](const Instance& i, const std::vector<double>& w) { return g(i, w); },
          py::arg("instance"), py::arg("w"));
    m.def("h", [](const Instance& i, const std::vector<double>& w, const std::vector<double>& z) {
        return h(i, w, z);
    }, py::arg("instance"), py::arg("w"), py::arg("z"));
    m.def("grad_g_term", [](const Instance& i, const std::vector<double>& w, std::size_t arm,
                            std::size_t objective) { return grad_g_term(i, w, arm, objective); },
          py::arg("instance"), py::arg("w"), py::arg("arm"), py::arg("objective"));
    m.def("eta_floor", &eta_floor, py::arg("arms"), py::arg("eta"));

    m.def("surrogate_proportion", [](const Instance& i, const std::vector<double>& w, double eta) {
        const Surrogate s = surrogate_proportion(i, w, eta);
        return py::make_tuple(s.proportion.weights, s.value);
    }, py::arg("instance"), py::arg("w"), py::arg("eta"),
       "Return (s, h(w, s)) maximizing the linearization over the truncated simplex.");

    m.def("optimize_allocation", [](const Instance& i, std::optional<double> eta,
                                    std::size_t iterations) {
        const AllocationResult r = optimize_allocation(i, eta, iterations);
        return py::make_tuple(r.weight.weights, r.value);
    }, py::arg("instance"), py::arg("eta") = py::none(), py::arg("iterations") = 2000);

    m.def("z_statistic", [](const std::vector<std::uint64_t>& counts,
                            const std::vector<std::vector<double>>& means) {
        return z_statistic(counts, Matrix::from_rows(means));
    }, py::arg("counts"), py::arg("means_hat"));
    m.def("f_eval", &f_eval, py::arg("x"), py::arg("mk"));
    m.def("f_inverse", &f_inverse, py::arg("delta"), py::arg("mk"));
    m.def("threshold", [](std::uint64_t t, const std::string& mode, double delta, std::size_t mk) {
        return threshold(t, StoppingConfig(parse_threshold_mode(mode), delta, mk));
    }, py::arg("t"), py::arg("mode"), py::arg("delta"), py::arg("mk"));

    m.def("run_trial", [](const Instance& inst, const std::string& policy, std::uint64_t seed,
                          double eta, std::size_t iterations, bool warm_start, double delta,
                          const std::string& thr, std::uint64_t pull_cap, bool non_stopping) {
        TrialConfig cfg = make_config(inst, policy, eta, iterations, warm_start, delta, thr,
                                      pull_cap, non_stopping);
        cfg.seed = seed;
        TrialResult r;
        {
            py::gil_scoped_release release;
            r = run_trial(cfg);
        }
        return trial_dict(r);
    }, py::arg("instance"), py::arg("policy") = "mobai", py::arg("seed") = 0,
       py::arg("eta") = 0.1, py::arg("iterations") = 20, py::arg("warm_start") = false,
       py::arg("delta") = 0.1, py::arg("threshold") = "practical",
       py::arg("pull_cap") = 10'000'000, py::arg("non_stopping") = false);

    m.def("run_batch", [](const Instance& inst, const std::string& policy, std::size_t trials,
                          std::uint64_t seed, std::size_t workers, double eta,
                          std::size_t iterations, bool warm_start, double delta,
                          const std::string& thr, std::uint64_t pull_cap) {
        const TrialConfig cfg = make_config(inst, policy, eta, iterations, warm_start, delta, thr,
                                            pull_cap, false);
        BatchResult b;
        {
            py::gil_scoped_release release;
            b = run_batch(cfg, trials, seed, workers);
        }
        py::list rows;
        for (const auto& r : b.trials) rows.append(trial_dict(r));
        return py::make_tuple(rows, summary_dict(b.summary));
    }, py::arg("instance"), py::arg("policy") = "mobai", py::arg("trials") = 10,
       py::arg("seed") = 0, py::arg("workers") = 1, py::arg("eta") = 0.1,
       py::arg("iterations") = 20, py::arg("warm_start") = false, py::arg("delta") = 0.1,
       py::arg("threshold") = "practical", py::arg("pull_cap") = 10'000'000);

    m.def("lowerbound_report", [](const Instance& inst, double eta, std::size_t iterations,
                                  std::optional<std::size_t> grid,
                                  const std::vector<double>& deltas) {
        const LowerBoundReport r = lowerbound_report(inst, eta, iterations, grid, deltas);
        py::dict d;
        d["c_star"] = r.c_star;
        d["c_tilde"] = r.c_tilde;
        d["value_full"] = r.value_full;
        d["value_truncated"] = r.value_truncated;
        d["weight_full"] = r.weight_full;
        d["weight_truncated"] = r.weight_truncated;
        d["grid_c_star"] = r.grid_c_star;
        d["grid_c_tilde"] = r.grid_c_tilde;
        d["eta"] = r.eta;
        d["iterations"] = r.iterations;
        d["relaxation_holds"] = r.relaxation_holds;
        d["predicted_tau"] = r.predicted_tau;
        return d;
    }, py::arg("instance"), py::arg("eta") = 0.1, py::arg("iterations") = 2000,
       py::arg("grid") = py::none(), py::arg("deltas") = std::vector<double>{});

    m.attr("__all__") = py::make_tuple(
        "MobaiError", "Instance", "gen_synthetic", "load_instance", "g", "h", "grad_g_term",
        "eta_floor", "surrogate_proportion", "optimize_allocation", "z_statistic", "f_eval",
        "f_inverse", "threshold", "run_trial", "run_batch", "lowerbound_report");
}
