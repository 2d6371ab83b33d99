#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "vc/chaos.hpp"
#include "vc/io.hpp"
#include "vc/parallel.hpp"
#include "vc/yamada_watanabe.hpp"

namespace {

using nlohmann::json;

struct GlobalArgs {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
};

json load_config(const GlobalArgs& g) {
    if (g.config.empty()) throw vc::ConfigError("--config is required");
    return vc::parse_json_text(vc::read_text_file(g.config), g.config);
}

std::string out_dir(const GlobalArgs& g, const std::string& fallback) {
    std::string dir = g.out.empty() ? fallback : g.out;
    if (dir.empty()) dir = "out";
    std::filesystem::create_directories(dir);
    return dir;
}

void check_version(const json& j) {
    if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer() ||
        j.at("schema_version").get<int>() != 1)
        throw vc::ConfigError("config needs schema_version = 1");
}

std::uint64_t pick_seed(const GlobalArgs& g, const json& j) {
    if (g.seed_set) return g.seed;
    if (j.contains("seed")) return j.at("seed").get<std::uint64_t>();
    return 0;
}

int cmd_simulate(const GlobalArgs& g) {
    const json j = load_config(g);
    check_version(j);
    vc::check_keys(j, "simulate config",
                   {"schema_version", "kernel_mu", "kernel_sigma", "drift", "diffusion",
                    "init", "grid", "N"},
                   {"d", "diffusion_weight_mode", "seed", "exp_fast_path"});
    const vc::SystemSpec sys = vc::parse_system(j);
    const vc::TimeGrid grid = vc::parse_grid(j.at("grid"));
    const int N = j.at("N").get<int>();
    vc::NoisePlan noise(pick_seed(g, j));
    vc::EngineOptions opts;
    opts.threads = g.threads;
    if (j.contains("exp_fast_path")) opts.exp_fast_path = j.at("exp_fast_path").get<bool>();
    const vc::PathEnsemble ens = vc::simulate_particle_system(N, grid, sys, noise, opts);
    const std::string dir = out_dir(g, "out");
    vc::write_text_file(dir + "/ensemble.csv", vc::ensemble_csv(ens));
    std::cout << "wrote " << dir << "/ensemble.csv (" << N << " paths, "
              << grid.n_steps + 1 << " nodes)\n";
    return 0;
}

int cmd_picard(const GlobalArgs& g) {
    const json j = load_config(g);
    check_version(j);
    vc::check_keys(j, "picard config",
                   {"schema_version", "kernel_mu", "kernel_sigma", "drift", "diffusion",
                    "init", "grid", "picard"},
                   {"d", "diffusion_weight_mode", "seed", "delta"});
    const vc::SystemSpec sys = vc::parse_system(j);
    const vc::TimeGrid grid = vc::parse_grid(j.at("grid"));
    vc::PicardConfig cfg = vc::parse_picard(j.at("picard"));
    if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
    cfg.validate();
    const vc::PicardResult res =
        vc::picard_solve(grid, sys, cfg, pick_seed(g, j), g.threads);
    const std::string dir = out_dir(g, "out");
    vc::write_text_file(dir + "/picard.json", vc::picard_to_json(res, cfg.M_law));
    vc::write_text_file(dir + "/law.csv", vc::law_flow_csv(res.law));
    std::cout << "picard converged in " << res.iterations_used << " iterations, final gap "
              << (res.gap_history.empty() ? 0.0 : res.gap_history.back()) << "\n";
    return 0;
}

int cmd_chaos(const GlobalArgs& g) {
    const json j = load_config(g);
    vc::ExperimentConfig cfg = vc::parse_experiment_config(j.dump());
    if (g.seed_set) cfg.master_seed = g.seed;
    if (!g.out.empty()) cfg.output_dir = g.out;
    const vc::ChaosReport rep = vc::run_chaos_experiment(cfg, g.threads);
    std::cout << "chaos experiment done: slope(pathwise)=" << rep.fit_pathwise.slope
              << " slope(wasserstein)=" << rep.fit_wasserstein.slope
              << " slope(debiased)=" << rep.fit_debiased.slope << "\n"
              << "reports in " << cfg.output_dir << "\n";
    return 0;
}

int cmd_gc_bench(const GlobalArgs& g) {
    const json j = load_config(g);
    check_version(j);
    vc::check_keys(j, "gc-bench config", {"schema_version", "d", "delta", "N_list", "n_reps"},
                   {"init", "seed"});
    const int d = j.at("d").get<int>();
    const double delta = j.at("delta").get<double>();
    std::vector<int> N_list;
    for (const auto& e : j.at("N_list")) N_list.push_back(e.get<int>());
    const int n_reps = j.at("n_reps").get<int>();
    const vc::InitSampler sampler =
        j.contains("init") ? vc::parse_init(j.at("init")) : vc::InitSampler::gaussian(0.0, 1.0);
    const vc::GCBenchmark gc =
        vc::glivenko_cantelli_benchmark(d, delta, N_list, sampler, n_reps, pick_seed(g, j));
    const std::string dir = out_dir(g, "out");
    vc::write_text_file(dir + "/gc.json", vc::gc_to_json(gc));
    vc::write_text_file(dir + "/gc.csv", vc::gc_to_csv(gc));
    std::cout << "gc benchmark slope " << gc.fit.slope << " (" << gc.estimator << ")\n";
    return 0;
}

int cmd_verify_kernel(const GlobalArgs& g) {
    const json j = load_config(g);
    check_version(j);
    vc::check_keys(j, "verify-kernel config", {"schema_version", "kernel"},
                   {"gamma", "epsilon", "n_pairs", "T", "seed"});
    const vc::KernelSpec spec = vc::parse_kernel(j.at("kernel"), "kernel");
    const double T = j.contains("T") ? j.at("T").get<double>() : 1.0;
    vc::KernelAssumptionReport rep;
    if (spec.singular()) {
        for (const char* key : {"gamma", "epsilon", "n_pairs"})
            if (!j.contains(key))
                throw vc::ConfigError(std::string("singular kernel check needs \"") + key +
                                      "\"");
        rep = vc::verify_assumption_singular(spec, j.at("gamma").get<double>(),
                                             j.at("epsilon").get<double>(),
                                             j.at("n_pairs").get<int>(), pick_seed(g, j), T);
    } else {
        rep = vc::verify_assumption_smooth(spec, T);
    }
    json out;
    out["kernel"] = spec.describe();
    out["assumption"] = rep.assumption_id == vc::AssumptionId::Singular ? "singular"
                        : rep.assumption_id == vc::AssumptionId::Smooth ? "smooth"
                                                                          : "convolutional";
    out["satisfied"] = rep.satisfied;
    out["estimated_L"] = rep.estimated_L;
    out["mu_line_L"] = rep.mu_line_L;
    out["sigma_line_L"] = rep.sigma_line_L;
    out["growth_slope_mu"] = rep.growth_slope_mu;
    out["growth_slope_sigma"] = rep.growth_slope_sigma;
    out["c1"] = rep.c1;
    out["c2"] = rep.c2;
    out["worst_pair"] = {rep.worst_pair.first, rep.worst_pair.second};
    out["samples_checked"] = rep.samples_checked;
    const std::string text = out.dump(2) + "\n";
    std::cout << text;
    if (!g.out.empty()) vc::write_text_file(out_dir(g, "out") + "/kernel_check.json", text);
    return rep.satisfied ? 0 : 3;
}

int cmd_rates(const GlobalArgs& g) {
    const json j = load_config(g);
    check_version(j);
    vc::check_keys(j, "rates config", {"schema_version", "d", "N_list"},
                   {"delta", "epsilon"});
    const int d = j.at("d").get<int>();
    double delta;
    if (j.contains("delta")) delta = j.at("delta").get<double>();
    else if (j.contains("epsilon")) delta = vc::delta_from_epsilon(j.at("epsilon").get<double>());
    else throw vc::ConfigError("rates config needs delta or epsilon");
    std::string csv = "N,epsilon_N\n";
    for (const auto& e : j.at("N_list")) {
        const int N = e.get<int>();
        csv += std::to_string(N) + "," +
               vc::fmt17(vc::epsilon_n(d, delta, static_cast<std::uint64_t>(N))) + "\n";
    }
    std::cout << csv;
    if (!g.out.empty()) vc::write_text_file(out_dir(g, "out") + "/rates.csv", csv);
    return 0;
}

int cmd_yw_dump(const GlobalArgs& g) {
    const json j = load_config(g);
    check_version(j);
    vc::check_keys(j, "yw-dump config", {"schema_version", "xi", "n_max"},
                   {"points", "x_max"});
    const double xi = j.at("xi").get<double>();
    const int n_max = j.at("n_max").get<int>();
    const int points = j.contains("points") ? j.at("points").get<int>() : 512;
    const double x_max = j.contains("x_max") ? j.at("x_max").get<double>() : 2.0;
    const vc::YWSequence seq = vc::YWSequence::build(xi, n_max);
    std::string csv = "n,x,phi,phi_prime,phi_second\n";
    for (int n = 1; n <= n_max; ++n)
        for (int i = 0; i < points; ++i) {
            const double x = -x_max + 2.0 * x_max * i / (points - 1.0);
            csv += std::to_string(n) + "," + vc::fmt17(x) + "," + vc::fmt17(seq.phi(x, n)) +
                   "," + vc::fmt17(seq.phi_prime(x, n)) + "," +
                   vc::fmt17(seq.phi_second(x, n)) + "\n";
        }
    const std::string dir = out_dir(g, "out");
    vc::write_text_file(dir + "/yw.csv", csv);
    std::cout << "wrote " << dir << "/yw.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mean-field stochastic Volterra simulator and chaos-rate harness"};
    app.require_subcommand(1);

    GlobalArgs g;
    app.add_option("--config", g.config, "JSON config path")->expected(1);
    app.add_option("--seed", g.seed, "master seed override")->expected(1);
    app.add_option("--threads", g.threads, "worker threads (VC_THREADS overrides)")
        ->expected(1);
    app.add_option("--out", g.out, "output directory override")->expected(1);

    auto* simulate = app.add_subcommand("simulate", "run the interacting particle system");
    auto* picard = app.add_subcommand("picard", "solve the mean-field law by iteration");
    auto* chaos = app.add_subcommand("chaos", "propagation-of-chaos rate experiment");
    auto* gc = app.add_subcommand("gc-bench", "empirical-measure convergence benchmark");
    auto* verify = app.add_subcommand("verify-kernel", "kernel admissibility checks");
    auto* rates = app.add_subcommand("rates", "reference rate table");
    auto* yw = app.add_subcommand("yw-dump", "regularization function tables");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    g.seed_set = app.count("--seed") > 0;

    try {
        if (simulate->parsed()) return cmd_simulate(g);
        if (picard->parsed()) return cmd_picard(g);
        if (chaos->parsed()) return cmd_chaos(g);
        if (gc->parsed()) return cmd_gc_bench(g);
        if (verify->parsed()) return cmd_verify_kernel(g);
        if (rates->parsed()) return cmd_rates(g);
        if (yw->parsed()) return cmd_yw_dump(g);
    } catch (const vc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const vc::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
