#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "vc/chaos.hpp"
#include "vc/io.hpp"
#include "vc/yamada_watanabe.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

vc::SystemSpec system_from_text(const std::string& cfg) {
    const json j = vc::parse_json_text(cfg, "system config");
    return vc::parse_system(j);
}

py::dict ensemble_to_dict(const vc::PathEnsemble& ens) {
    py::dict d;
    d["M"] = ens.M;
    d["d"] = ens.d;
    d["n_nodes"] = ens.meta.grid.n_steps + 1;
    d["T"] = ens.meta.grid.T;
    d["states"] = ens.states;  // path-major (i, node, coord)
    return d;
}

py::dict fit_to_dict(const vc::RateFit& f) {
    py::dict d;
    d["slope"] = f.slope;
    d["intercept"] = f.intercept;
    d["r_squared"] = f.r_squared;
    d["degenerate"] = f.degenerate;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "mean-field stochastic Volterra simulation core";

    m.def("delta_from_epsilon", &vc::delta_from_epsilon, py::arg("epsilon"));
    m.def("epsilon_n", &vc::epsilon_n, py::arg("d"), py::arg("delta"), py::arg("N"));
    m.def(
        "fit_rate",
        [](const std::vector<double>& N, const std::vector<double>& value) {
            return fit_to_dict(vc::fit_rate(N, value));
        },
        py::arg("N"), py::arg("value"));

    m.def(
        "wasserstein_1d",
        [](const std::vector<double>& a, const std::vector<double>& b, double p) {
            return vc::wasserstein_1d(p, a, b);
        },
        py::arg("a"), py::arg("b"), py::arg("p") = 1.0);
    m.def(
        "wasserstein_exact",
        [](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
           double p) {
            auto pack = [](const std::vector<std::vector<double>>& pts) {
                vc::EmpiricalMeasure m;
                m.n = static_cast<int>(pts.size());
                m.d = pts.empty() ? 1 : static_cast<int>(pts[0].size());
                for (const auto& row : pts) {
                    if (static_cast<int>(row.size()) != m.d)
                        throw vc::DimensionMismatch("ragged point list");
                    m.pts.insert(m.pts.end(), row.begin(), row.end());
                }
                return m;
            };
            return vc::wasserstein_exact(p, pack(a), pack(b));
        },
        py::arg("a"), py::arg("b"), py::arg("p") = 1.0);

    m.def(
        "simulate",
        [](const std::string& config, int N, double T, int n_steps, std::uint64_t seed,
           int threads) {
            const vc::SystemSpec sys = system_from_text(config);
            const vc::TimeGrid grid{T, n_steps};
            vc::NoisePlan noise(seed);
            vc::EngineOptions opts;
            opts.threads = threads;
            return ensemble_to_dict(vc::simulate_particle_system(N, grid, sys, noise, opts));
        },
        py::arg("config"), py::arg("N"), py::arg("T"), py::arg("n_steps"), py::arg("seed") = 0,
        py::arg("threads") = 1);

    m.def(
        "picard",
        [](const std::string& config, double T, int n_steps, int M_law, double tol,
           int max_iters, std::uint64_t seed, int threads) {
            const vc::SystemSpec sys = system_from_text(config);
            vc::PicardConfig cfg;
            cfg.M_law = M_law;
            cfg.tol = tol;
            cfg.max_iters = max_iters;
            cfg.validate();
            const vc::PicardResult res =
                vc::picard_solve(vc::TimeGrid{T, n_steps}, sys, cfg, seed, threads);
            py::dict d;
            d["iterations_used"] = res.iterations_used;
            d["gap_history"] = res.gap_history;
            d["converged"] = res.converged;
            std::vector<double> means;
            for (int k = 0; k <= res.law.grid.n_steps; ++k)
                means.push_back(res.law.at(k).mean()[0]);
            d["node_means"] = means;
            return d;
        },
        py::arg("config"), py::arg("T"), py::arg("n_steps"), py::arg("M_law") = 1024,
        py::arg("tol") = 1e-3, py::arg("max_iters") = 25, py::arg("seed") = 0,
        py::arg("threads") = 1);

    m.def(
        "chaos",
        [](const std::string& config, int threads) {
            vc::ExperimentConfig cfg = vc::parse_experiment_config(config);
            const vc::ChaosReport rep = vc::run_chaos_experiment(cfg, threads);
            return vc::report_to_json(rep);
        },
        py::arg("config"), py::arg("threads") = 1);

    m.def(
        "gc_bench",
        [](int d, double delta, const std::vector<int>& N_list, int n_reps,
           std::uint64_t seed) {
            const vc::GCBenchmark gc = vc::glivenko_cantelli_benchmark(
                d, delta, N_list, vc::InitSampler::gaussian(0.0, 1.0), n_reps, seed);
            py::dict out;
            out["N_list"] = gc.N_list;
            out["value"] = gc.value;
            out["epsilon_N"] = gc.epsilon;
            out["estimator"] = gc.estimator;
            out["fit"] = fit_to_dict(gc.fit);
            return out;
        },
        py::arg("d"), py::arg("delta"), py::arg("N_list"), py::arg("n_reps"),
        py::arg("seed") = 0);

    py::class_<vc::YWSequence>(m, "YWSequence")
        .def(py::init([](double xi, int n_max) { return vc::YWSequence::build(xi, n_max); }),
             py::arg("xi"), py::arg("n_max"))
        .def_property_readonly("a", [](const vc::YWSequence& s) { return s.a(); })
        .def("phi", &vc::YWSequence::phi, py::arg("x"), py::arg("n"))
        .def("phi_prime", &vc::YWSequence::phi_prime, py::arg("x"), py::arg("n"))
        .def("phi_second", &vc::YWSequence::phi_second, py::arg("x"), py::arg("n"))
        .def("psi", &vc::YWSequence::psi, py::arg("x"), py::arg("n"));

    py::register_exception<vc::ConfigError>(m, "ConfigError", PyExc_ValueError);
}
