#include "vc/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>

namespace vc {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << content;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json parse_json_text(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("invalid JSON in " + what);
    return j;
}

void check_keys(const json& obj, const std::string& ctx,
                const std::vector<std::string>& required,
                const std::vector<std::string>& optional) {
    if (!obj.is_object()) throw ConfigError(ctx + ": expected a JSON object");
    for (const auto& item : obj.items()) {
        const auto& k = item.key();
        bool known = false;
        for (const auto& r : required) known = known || k == r;
        for (const auto& o : optional) known = known || k == o;
        if (!known) throw ConfigError(ctx + ": unknown key \"" + k + "\"");
    }
    for (const auto& r : required)
        if (!obj.contains(r)) throw ConfigError(ctx + ": missing required key \"" + r + "\"");
}

namespace {

double num(const json& j, const std::string& ctx, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError(ctx + ": \"" + std::string(key) + "\" must be a number");
    return v.get<double>();
}

int integer(const json& j, const std::string& ctx, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number_integer())
        throw ConfigError(ctx + ": \"" + std::string(key) + "\" must be an integer");
    return v.get<int>();
}

std::vector<double> num_array(const json& j, const std::string& ctx, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_array()) throw ConfigError(ctx + ": \"" + std::string(key) + "\" must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number())
            throw ConfigError(ctx + ": \"" + std::string(key) + "\" must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

}  // namespace

KernelSpec parse_kernel(const json& j, const std::string& ctx) {
    check_keys(j, ctx, {"family"}, {"alpha", "scale", "rate", "c", "u", "k", "dk", "horizon"});
    const std::string fam = j.at("family").get<std::string>();
    if (fam == "fractional") {
        check_keys(j, ctx, {"family", "alpha"}, {});
        return KernelSpec::fractional(num(j, ctx, "alpha"));
    }
    if (fam == "exp_convolution") {
        check_keys(j, ctx, {"family", "scale", "rate"}, {});
        return KernelSpec::exp_convolution(num(j, ctx, "scale"), num(j, ctx, "rate"));
    }
    if (fam == "constant") {
        check_keys(j, ctx, {"family", "c"}, {});
        return KernelSpec::constant(num(j, ctx, "c"));
    }
    if (fam == "smooth_convolution") {
        check_keys(j, ctx, {"family", "u", "k", "dk", "horizon"}, {});
        return KernelSpec::smooth_convolution(num_array(j, ctx, "u"), num_array(j, ctx, "k"),
                                              num_array(j, ctx, "dk"), num(j, ctx, "horizon"));
    }
    throw ConfigError(ctx + ": unknown kernel family \"" + fam + "\"");
}

DriftSpec parse_drift(const json& j) {
    const std::string ctx = "drift";
    check_keys(j, ctx, {"family"}, {"a", "b", "c", "theta"});
    const std::string fam = j.at("family").get<std::string>();
    if (fam == "zero") {
        check_keys(j, ctx, {"family"}, {});
        return DriftSpec::zero();
    }
    if (fam == "linear_mean_field") {
        check_keys(j, ctx, {"family", "a", "b", "c"}, {});
        return DriftSpec::linear_mean_field(num(j, ctx, "a"), num(j, ctx, "b"),
                                            num(j, ctx, "c"));
    }
    if (fam == "time_modulated") {
        check_keys(j, ctx, {"family", "a", "b", "c", "theta"}, {});
        return DriftSpec::time_modulated(num(j, ctx, "a"), num(j, ctx, "b"), num(j, ctx, "c"),
                                         num(j, ctx, "theta"));
    }
    throw ConfigError(ctx + ": unknown drift family \"" + fam + "\"");
}

DiffusionSpec parse_diffusion(const json& j) {
    const std::string ctx = "diffusion";
    check_keys(j, ctx, {"family"}, {"s", "s0", "s1", "s2", "c", "eta"});
    const std::string fam = j.at("family").get<std::string>();
    if (fam == "constant_vol") {
        check_keys(j, ctx, {"family", "s"}, {});
        return DiffusionSpec::constant_vol(num(j, ctx, "s"));
    }
    if (fam == "affine") {
        check_keys(j, ctx, {"family", "s0", "s1"}, {});
        return DiffusionSpec::affine(num(j, ctx, "s0"), num(j, ctx, "s1"));
    }
    if (fam == "affine_mean") {
        check_keys(j, ctx, {"family", "s0", "s1", "s2"}, {});
        return DiffusionSpec::affine_mean(num(j, ctx, "s0"), num(j, ctx, "s1"),
                                          num(j, ctx, "s2"));
    }
    if (fam == "holder_power") {
        check_keys(j, ctx, {"family", "c", "eta"}, {});
        return DiffusionSpec::holder_power(num(j, ctx, "c"), num(j, ctx, "eta"));
    }
    throw ConfigError(ctx + ": unknown diffusion family \"" + fam + "\"");
}

InitSampler parse_init(const json& j) {
    const std::string ctx = "init";
    check_keys(j, ctx, {"family"}, {"x0", "mean", "sd", "lo", "hi"});
    const std::string fam = j.at("family").get<std::string>();
    if (fam == "dirac") {
        check_keys(j, ctx, {"family", "x0"}, {});
        return InitSampler::dirac(num(j, ctx, "x0"));
    }
    if (fam == "gaussian") {
        check_keys(j, ctx, {"family", "mean", "sd"}, {});
        return InitSampler::gaussian(num(j, ctx, "mean"), num(j, ctx, "sd"));
    }
    if (fam == "uniform") {
        check_keys(j, ctx, {"family", "lo", "hi"}, {});
        return InitSampler::uniform(num(j, ctx, "lo"), num(j, ctx, "hi"));
    }
    throw ConfigError(ctx + ": unknown init family \"" + fam + "\"");
}

TimeGrid parse_grid(const json& j) {
    check_keys(j, "grid", {"T", "n_steps"}, {});
    return TimeGrid{num(j, "grid", "T"), integer(j, "grid", "n_steps")};
}

PicardConfig parse_picard(const json& j) {
    const std::string ctx = "picard";
    check_keys(j, ctx, {"M_law", "tol", "max_iters"}, {"common_random_numbers"});
    PicardConfig cfg;
    cfg.M_law = integer(j, ctx, "M_law");
    cfg.tol = num(j, ctx, "tol");
    cfg.max_iters = integer(j, ctx, "max_iters");
    if (j.contains("common_random_numbers")) {
        if (!j.at("common_random_numbers").is_boolean())
            throw ConfigError("picard: \"common_random_numbers\" must be boolean");
        cfg.common_random_numbers = j.at("common_random_numbers").get<bool>();
    }
    return cfg;
}

SystemSpec parse_system(const json& j) {
    SystemSpec sys;
    sys.k_mu = parse_kernel(j.at("kernel_mu"), "kernel_mu");
    sys.k_sigma = parse_kernel(j.at("kernel_sigma"), "kernel_sigma");
    sys.drift = parse_drift(j.at("drift"));
    sys.diffusion = parse_diffusion(j.at("diffusion"));
    sys.init = parse_init(j.at("init"));
    sys.d = j.contains("d") ? integer(j, "config", "d") : 1;
    if (sys.d < 1) throw ConfigError("dimension must be >= 1");
    std::string mode = "auto";
    if (j.contains("diffusion_weight_mode"))
        mode = j.at("diffusion_weight_mode").get<std::string>();
    if (mode == "auto") sys.mode = default_mode(sys.k_sigma);
    else if (mode == "left_point") sys.mode = DiffusionWeightMode::LeftPoint;
    else if (mode == "variance_matched") sys.mode = DiffusionWeightMode::VarianceMatched;
    else throw ConfigError("unknown diffusion_weight_mode \"" + mode + "\"");
    return sys;
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    const json j = parse_json_text(json_text, "experiment config");
    const std::string ctx = "experiment config";
    check_keys(j, ctx,
               {"schema_version", "setting", "kernel_mu", "kernel_sigma", "drift", "diffusion",
                "init", "grid", "N_list", "n_replications", "picard", "master_seed"},
               {"d", "gamma", "epsilon", "p", "estimator_policy", "output_dir",
                "diffusion_weight_mode"});
    ExperimentConfig cfg;
    cfg.schema_version = integer(j, ctx, "schema_version");
    if (cfg.schema_version != 1)
        throw ConfigError("experiment config: unsupported schema_version");

    const std::string setting = j.at("setting").get<std::string>();
    if (setting == "lipschitz_multi_d") cfg.setting = Setting::LipschitzMultiD;
    else if (setting == "holder_one_d") cfg.setting = Setting::HolderOneD;
    else throw ConfigError("experiment config: unknown setting \"" + setting + "\"");

    cfg.system = parse_system(j);
    cfg.grid = parse_grid(j.at("grid"));

    const auto& nl = j.at("N_list");
    if (!nl.is_array()) throw ConfigError("experiment config: N_list must be an array");
    for (const auto& e : nl) {
        if (!e.is_number_integer())
            throw ConfigError("experiment config: N_list must hold integers");
        cfg.N_list.push_back(e.get<int>());
    }
    cfg.n_replications = integer(j, ctx, "n_replications");
    cfg.picard = parse_picard(j.at("picard"));
    cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("gamma")) cfg.gamma = num(j, ctx, "gamma");
    if (j.contains("epsilon")) cfg.epsilon = num(j, ctx, "epsilon");
    if (j.contains("p")) cfg.p_moment = num(j, ctx, "p");
    if (j.contains("estimator_policy"))
        cfg.estimator_policy = j.at("estimator_policy").get<std::string>();
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();

    cfg.validate_and_finalize();
    return cfg;
}

json rate_fit_json(const RateFit& f) {
    json j;
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["r_squared"] = f.r_squared;
    j["degenerate"] = f.degenerate;
    return j;
}

namespace {

json config_json(const ExperimentConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    j["setting"] =
        cfg.setting == Setting::HolderOneD ? "holder_one_d" : "lipschitz_multi_d";
    j["kernel_mu"] = cfg.system.k_mu.describe();
    j["kernel_sigma"] = cfg.system.k_sigma.describe();
    j["diffusion_weight_mode"] = cfg.system.mode == DiffusionWeightMode::VarianceMatched
                                     ? "variance_matched"
                                     : "left_point";
    j["drift"] = cfg.system.drift.describe();
    j["diffusion"] = cfg.system.diffusion.describe();
    j["init"] = cfg.system.init.describe();
    j["d"] = cfg.system.d;
    j["grid"] = {{"T", cfg.grid.T}, {"n_steps", cfg.grid.n_steps}};
    j["N_list"] = cfg.N_list;
    j["n_replications"] = cfg.n_replications;
    j["picard"] = {{"M_law", cfg.picard.M_law},
                   {"tol", cfg.picard.tol},
                   {"max_iters", cfg.picard.max_iters},
                   {"common_random_numbers", cfg.picard.common_random_numbers}};
    j["master_seed"] = cfg.master_seed;
    j["delta"] = cfg.delta;
    j["gamma"] = cfg.gamma;
    j["epsilon"] = cfg.epsilon;
    j["p"] = cfg.p_moment;
    j["estimator_policy"] = cfg.estimator_policy;
    return j;
}

}  // namespace

std::string report_to_json(const ChaosReport& rep) {
    json j;
    j["config"] = config_json(rep.config);
    json rows = json::array();
    for (const auto& r : rep.rows) {
        json row;
        row["N"] = r.N;
        row["epsilon_N"] = r.epsilon_n;
        row["sup_pathwise_delta"] = r.sup_pathwise;
        row["sup_wasserstein_delta"] = r.sup_wasserstein;
        row["sup_reference_bias_delta"] = r.sup_bias;
        row["sup_debiased_delta"] = r.sup_debiased;
        row["estimator"] = r.estimator;
        rows.push_back(row);
    }
    j["rows"] = rows;
    j["fits"] = {{"pathwise", rate_fit_json(rep.fit_pathwise)},
                 {"wasserstein", rate_fit_json(rep.fit_wasserstein)},
                 {"debiased", rate_fit_json(rep.fit_debiased)}};
    j["provenance"] = {{"master_seed", rep.config.master_seed},
                       {"threads", rep.threads_used},
                       {"runtime_seconds", rep.runtime_seconds}};
    return j.dump(2) + "\n";
}

std::string errors_csv(const ChaosReport& rep) {
    std::ostringstream os;
    os << "N,t,metric,value,estimator\n";
    const auto& grid = rep.config.grid;
    for (std::size_t idx = 0; idx < rep.details.size(); ++idx) {
        const auto& cr = rep.details[idx];
        const std::string& est = rep.rows[idx].estimator;
        for (int k = 0; k <= grid.n_steps; ++k) {
            const auto t = fmt17(grid.node(k));
            const auto kk = static_cast<std::size_t>(k);
            os << cr.N << ',' << t << ",pathwise_delta,"
               << fmt17(cr.mean_pathwise_error_delta[kk]) << ",coupled-paths\n";
            os << cr.N << ',' << t << ",wasserstein_delta,"
               << fmt17(cr.wasserstein_error_delta[kk]) << ',' << est << '\n';
            os << cr.N << ',' << t << ",reference_bias_delta,"
               << fmt17(cr.reference_bias_delta[kk]) << ',' << est << '\n';
            os << cr.N << ',' << t << ",debiased_delta," << fmt17(cr.debiased_error_delta[kk])
               << ',' << est << '\n';
        }
    }
    return os.str();
}

std::string rates_csv(const ChaosReport& rep) {
    std::ostringstream os;
    os << "N,epsilon_N,metric,value,debiased\n";
    for (const auto& r : rep.rows) {
        os << r.N << ',' << fmt17(r.epsilon_n) << ",pathwise_delta," << fmt17(r.sup_pathwise)
           << ',' << fmt17(r.sup_pathwise) << '\n';
        os << r.N << ',' << fmt17(r.epsilon_n) << ",wasserstein_delta,"
           << fmt17(r.sup_wasserstein) << ',' << fmt17(r.sup_debiased) << '\n';
    }
    return os.str();
}

std::string gc_to_json(const GCBenchmark& gc) {
    json j;
    j["d"] = gc.d;
    j["delta"] = gc.delta;
    j["n_reps"] = gc.n_reps;
    j["N_list"] = gc.N_list;
    j["value"] = gc.value;
    j["epsilon_N"] = gc.epsilon;
    j["fit"] = rate_fit_json(gc.fit);
    j["estimator"] = gc.estimator;
    return j.dump(2) + "\n";
}

std::string gc_to_csv(const GCBenchmark& gc) {
    std::ostringstream os;
    os << "N,epsilon_N,metric,value,estimator\n";
    for (std::size_t i = 0; i < gc.N_list.size(); ++i)
        os << gc.N_list[i] << ',' << fmt17(gc.epsilon[i]) << ",gc_wasserstein_delta,"
           << fmt17(gc.value[i]) << ',' << gc.estimator << '\n';
    return os.str();
}

std::string picard_to_json(const PicardResult& res, int M_law) {
    json j;
    j["converged"] = res.converged;
    j["iterations_used"] = res.iterations_used;
    j["gap_history"] = res.gap_history;
    j["M_law"] = M_law;
    j["grid"] = {{"T", res.law.grid.T}, {"n_steps", res.law.grid.n_steps}};
    json means = json::array();
    for (int k = 0; k <= res.law.grid.n_steps; ++k) means.push_back(res.law.at(k).mean());
    j["node_means"] = means;
    return j.dump(2) + "\n";
}

std::string law_flow_csv(const LawFlow& law) {
    std::ostringstream os;
    os << "k,t";
    for (int c = 0; c < law.dim(); ++c) os << ",mean_" << c;
    os << ",second_moment\n";
    for (int k = 0; k <= law.grid.n_steps; ++k) {
        os << k << ',' << fmt17(law.grid.node(k));
        const auto m = law.at(k).mean();
        for (double v : m) os << ',' << fmt17(v);
        os << ',' << fmt17(moment(law.at(k), 2.0)) << '\n';
    }
    return os.str();
}

std::string measure_csv(const EmpiricalMeasure& m) {
    std::ostringstream os;
    for (int i = 0; i < m.n; ++i) {
        for (int c = 0; c < m.d; ++c) os << (c ? "," : "") << fmt17(m.x(i, c));
        os << '\n';
    }
    return os.str();
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

std::string ensemble_csv(const PathEnsemble& ens) {
    std::ostringstream os;
    const auto& m = ens.meta;
    os << "# grid T=" << fmt17(m.grid.T) << " n_steps=" << m.grid.n_steps << " d=" << ens.d
       << "\n# seed=" << m.seed << "\n# spec_hash="
       << fnv1a(m.kernel_mu + '|' + m.kernel_sigma + '|' + m.drift + '|' + m.diffusion + '|' +
                m.init)
       << "\n";
    const int nodes = m.grid.n_steps + 1;
    for (int i = 0; i < ens.M; ++i) {
        bool first = true;
        for (int k = 0; k < nodes; ++k)
            for (int c = 0; c < ens.d; ++c) {
                os << (first ? "" : ",") << fmt17(ens.state(i, k, c));
                first = false;
            }
        os << '\n';
    }
    return os.str();
}

RunLog::RunLog(const std::string& path) : out_(path, std::ios::app) {
    if (!out_) throw ConfigError("cannot open run log: " + path);
}

void RunLog::line(const std::string& msg) {
    const auto now = std::chrono::system_clock::now();
    const auto tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tmv{};
    gmtime_r(&tt, &tmv);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tmv);
    out_ << buf << ' ' << msg << '\n';
    out_.flush();
}

}  // namespace vc
