#include "vc/chaos.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <memory>

#include "vc/io.hpp"
#include "vc/parallel.hpp"

namespace vc {

double delta_from_epsilon(double epsilon) {
    if (!(epsilon > 0.0))
        throw NonPositiveEpsilon("delta_from_epsilon needs epsilon > 0, got " +
                                 std::to_string(epsilon));
    return (4.0 + 2.0 * epsilon) / epsilon;
}

double epsilon_n(int d, double delta, std::uint64_t N) {
    const double n = static_cast<double>(N);
    const double dd = static_cast<double>(d);
    if (dd < 2.0 * delta) return 1.0 / std::sqrt(n);
    if (dd == 2.0 * delta) return std::log2(1.0 + n) / std::sqrt(n);
    return std::pow(n, -delta / dd);
}

RateFit fit_rate(const std::vector<double>& N, const std::vector<double>& value) {
    if (N.size() != value.size())
        throw ConfigError("fit_rate needs one value per N");
    RateFit f;
    if (N.size() < 2) {
        f.degenerate = true;
        return f;
    }
    for (double v : value)
        if (!(v > 0.0) || !std::isfinite(v)) {
            f.degenerate = true;
            return f;
        }
    const std::size_t m = N.size();
    std::vector<double> lx(m), ly(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!(N[i] > 0.0)) {
            f.degenerate = true;
            return f;
        }
        lx[i] = std::log(N[i]);
        ly[i] = std::log(value[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) {
        f.degenerate = true;
        return f;
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (syy == 0.0) {
        f.r_squared = 1.0;
    } else {
        f.r_squared = std::clamp(1.0 - (syy - f.slope * sxy) / syy, 0.0, 1.0);
    }
    return f;
}

void ExperimentConfig::validate_and_finalize() {
    if (schema_version != 1) throw ConfigError("unsupported schema_version");
    if (N_list.size() < 4)
        throw ConfigError("N_list needs at least 4 entries for a rate fit, got " +
                          std::to_string(N_list.size()));
    for (std::size_t i = 0; i < N_list.size(); ++i) {
        if (N_list[i] < 2) throw ConfigError("N_list entries must be >= 2");
        if (i > 0 && N_list[i] <= N_list[i - 1])
            throw ConfigError("N_list must be strictly increasing");
    }
    if (n_replications < 1) throw ConfigError("n_replications must be >= 1");
    if (estimator_policy != "auto")
        throw ConfigError("unsupported estimator policy \"" + estimator_policy + "\"");
    if (!(grid.T > 0.0) || grid.n_steps < 1)
        throw ConfigError("grid needs T > 0 and n_steps >= 1");
    if (system.d < 1) throw ConfigError("dimension must be >= 1");

    if (setting == Setting::HolderOneD) {
        if (system.d != 1)
            throw ConfigError("the one-dimensional Hoelder setting needs d = 1");
        if (system.diffusion.measure_dependent())
            throw ConfigError(
                "the one-dimensional Hoelder setting needs a measure-free diffusion");
        if (system.k_mu.singular() || system.k_sigma.singular())
            throw ConfigError("the one-dimensional Hoelder setting needs smooth kernels");
        delta = 1.0;
    } else {
        delta = delta_from_epsilon(epsilon);
        if (!(gamma > 0.0 && gamma <= 0.5))
            throw ConfigError("gamma must lie in (0, 1/2]");
        const double p_min = std::max(1.0 / gamma, 1.0 + 2.0 / epsilon);
        if (p_moment == 0.0) {
            p_moment = p_min + 1.0;
        } else if (!(p_moment > p_min)) {
            throw ConfigError("p must exceed max(1/gamma, 1 + 2/epsilon) = " +
                              std::to_string(p_min));
        }
    }
    picard.delta = delta;
    picard.validate();
    if (picard.M_law < 4 * N_list.back())
        throw ConfigError("reference cloud too small: M_law must be >= 4 * max(N_list)");
}

namespace {

double sup_of(const std::vector<double>& v) {
    double s = v.empty() ? 0.0 : v[0];
    for (double x : v) s = std::max(s, x);
    return s;
}

void refit(ChaosReport& rep) {
    std::vector<double> Ns, pw, ws, db;
    for (const auto& r : rep.rows) {
        Ns.push_back(static_cast<double>(r.N));
        pw.push_back(r.sup_pathwise);
        ws.push_back(r.sup_wasserstein);
        db.push_back(r.sup_debiased);
    }
    rep.fit_pathwise = fit_rate(Ns, pw);
    rep.fit_wasserstein = fit_rate(Ns, ws);
    rep.fit_debiased = fit_rate(Ns, db);
}

}  // namespace

ChaosReport run_chaos_experiment(const ExperimentConfig& cfg, int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    ChaosReport rep;
    rep.config = cfg;
    rep.config.validate_and_finalize();
    const ExperimentConfig& c = rep.config;
    rep.threads_used = resolve_threads(threads);

    const bool writing = !c.output_dir.empty();
    std::unique_ptr<RunLog> log;
    if (writing) {
        std::filesystem::create_directories(c.output_dir);
        log = std::make_unique<RunLog>(c.output_dir + "/run.log");
        log->line("chaos run start, seed=" + std::to_string(c.master_seed) +
                  " threads=" + std::to_string(rep.threads_used) +
                  " delta=" + fmt17(c.delta));
    }

    auto flush = [&]() {
        if (!writing) return;
        write_text_file(c.output_dir + "/report.json", report_to_json(rep));
        write_text_file(c.output_dir + "/errors.csv", errors_csv(rep));
        write_text_file(c.output_dir + "/rates.csv", rates_csv(rep));
    };

    NoisePlan plan(c.master_seed);
    try {
        for (std::size_t idx = 0; idx < c.N_list.size(); ++idx) {
            const int N = c.N_list[idx];
            const std::uint64_t seed = plan.derive(10, idx);
            CouplingResult cr = synchronous_coupling(N, c.grid, c.system, c.picard,
                                                     c.n_replications, seed, c.delta, threads);
            ChaosRow row;
            row.N = N;
            row.epsilon_n = epsilon_n(c.system.d, c.delta, static_cast<std::uint64_t>(N));
            row.sup_pathwise = sup_of(cr.mean_pathwise_error_delta);
            row.sup_wasserstein = sup_of(cr.wasserstein_error_delta);
            row.sup_bias = sup_of(cr.reference_bias_delta);
            row.sup_debiased = sup_of(cr.debiased_error_delta);
            row.estimator = cr.estimator;
            rep.rows.push_back(row);
            rep.details.push_back(std::move(cr));
            refit(rep);
            rep.runtime_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (log)
                log->line("N=" + std::to_string(N) + " sup_pathwise=" +
                          fmt17(row.sup_pathwise) + " sup_wasserstein=" +
                          fmt17(row.sup_wasserstein) + " sup_debiased=" +
                          fmt17(row.sup_debiased) + " estimator=" + row.estimator);
            flush();
        }
    } catch (...) {
        refit(rep);
        if (log) log->line("aborted after " + std::to_string(rep.rows.size()) + " N values");
        flush();
        throw;
    }
    refit(rep);
    rep.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (log)
        log->line("chaos run done, slopes pathwise=" + fmt17(rep.fit_pathwise.slope) +
                  " wasserstein=" + fmt17(rep.fit_wasserstein.slope) +
                  " debiased=" + fmt17(rep.fit_debiased.slope));
    flush();
    return rep;
}

GCBenchmark glivenko_cantelli_benchmark(int d, double delta, const std::vector<int>& N_list,
                                        const InitSampler& sampler, int n_reps,
                                        std::uint64_t seed) {
    if (d < 1) throw ConfigError("glivenko_cantelli_benchmark needs d >= 1");
    if (!(delta >= 1.0)) throw ConfigError("glivenko_cantelli_benchmark needs delta >= 1");
    if (n_reps < 1) throw ConfigError("glivenko_cantelli_benchmark needs n_reps >= 1");
    GCBenchmark out;
    out.d = d;
    out.delta = delta;
    out.n_reps = n_reps;
    out.N_list = N_list;
    out.estimator = d == 1 ? estimator_label_sorted() : estimator_label_exact();

    NoisePlan plan(seed);
    auto draw_cloud = [&](std::uint64_t plan_seed, int n) {
        EmpiricalMeasure m;
        m.n = n;
        m.d = d;
        m.pts.resize(static_cast<std::size_t>(n) * d);
        NoisePlan p(plan_seed);
        for (int i = 0; i < n; ++i)
            sampler.draw(p, static_cast<std::uint64_t>(i),
                         m.pts.data() + static_cast<std::size_t>(i) * d, d);
        return m;
    };

    for (std::size_t idx = 0; idx < N_list.size(); ++idx) {
        const int N = N_list[idx];
        if (N < 1) throw ConfigError("glivenko_cantelli_benchmark needs N >= 1");
        std::vector<double> per_rep(static_cast<std::size_t>(n_reps));
        for (int rep = 0; rep < n_reps; ++rep) {
            const std::uint64_t tag =
                (static_cast<std::uint64_t>(idx) << 32) | static_cast<std::uint64_t>(rep);
            const EmpiricalMeasure cloud = draw_cloud(plan.derive(1, tag), N);
            const EmpiricalMeasure ref = draw_cloud(plan.derive(2, tag), 16 * N);
            NoisePlan sub_plan(plan.derive(3, tag));
            const auto perm = sub_plan.permutation(0, static_cast<std::uint32_t>(16 * N));
            EmpiricalMeasure sub;
            sub.n = N;
            sub.d = d;
            sub.pts.resize(static_cast<std::size_t>(N) * d);
            for (int i = 0; i < N; ++i)
                for (int c = 0; c < d; ++c) sub.pts[static_cast<std::size_t>(i) * d + c] =
                    ref.x(static_cast<int>(perm[static_cast<std::size_t>(i)]), c);
            const double w = d == 1 ? wasserstein_1d(delta, cloud.scalars(), sub.scalars())
                                    : wasserstein_exact(delta, cloud, sub);
            per_rep[static_cast<std::size_t>(rep)] = std::pow(w, delta);
        }
        out.value.push_back(stable_sum(per_rep) / static_cast<double>(n_reps));
        out.epsilon.push_back(epsilon_n(d, delta, static_cast<std::uint64_t>(N)));
    }
    std::vector<double> Ns;
    for (int n : N_list) Ns.push_back(static_cast<double>(n));
    out.fit = fit_rate(Ns, out.value);
    return out;
}

double holder_regularity_diagnostic(const PathEnsemble& ensemble, double q,
                                    const std::vector<int>& lag_steps) {
    if (ensemble.M < 1000)
        throw InsufficientPaths("regularity diagnostic needs M >= 1000, got " +
                                std::to_string(ensemble.M));
    if (!(q > 0.0)) throw ConfigError("regularity diagnostic needs q > 0");
    if (lag_steps.size() < 2)
        throw ConfigError("regularity diagnostic needs at least two lags");
    const int n_steps = ensemble.meta.grid.n_steps;
    const double dt = ensemble.meta.grid.dt();
    const int d = ensemble.d;

    std::vector<double> lh, lv;
    std::vector<double> pool;
    for (int h : lag_steps) {
        if (h < 1 || h > n_steps)
            throw ConfigError("lag " + std::to_string(h) + " falls outside the grid");
        pool.clear();
        pool.reserve(static_cast<std::size_t>(ensemble.M) * (n_steps - h + 1));
        for (int i = 0; i < ensemble.M; ++i)
            for (int k = 0; k + h <= n_steps; ++k) {
                double s2 = 0.0;
                for (int c = 0; c < d; ++c) {
                    const double diff = ensemble.state(i, k + h, c) - ensemble.state(i, k, c);
                    s2 += diff * diff;
                }
                pool.push_back(std::pow(std::sqrt(s2), q));
            }
        const double est = stable_sum(pool) / static_cast<double>(pool.size());
        if (!(est > 0.0))
            throw ConfigError("regularity diagnostic saw a zero increment moment");
        lh.push_back(std::log(static_cast<double>(h) * dt));
        lv.push_back(std::log(est));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lh.size(); ++i) {
        mx += lh[i];
        my += lv[i];
    }
    mx /= static_cast<double>(lh.size());
    my /= static_cast<double>(lh.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lh.size(); ++i) {
        sxx += (lh[i] - mx) * (lh[i] - mx);
        sxy += (lh[i] - mx) * (lv[i] - my);
    }
    if (sxx == 0.0) throw ConfigError("regularity diagnostic needs distinct lags");
    return sxy / sxx / q;
}

std::vector<MomentRow> moment_diagnostic(const PathEnsemble& ensemble,
                                         const std::vector<double>& q_list) {
    std::vector<MomentRow> out;
    const int nodes = ensemble.meta.grid.n_steps + 1;
    for (double q : q_list) {
        MomentRow row;
        row.q = q;
        std::vector<double> per_node(static_cast<std::size_t>(nodes));
        for (int k = 0; k < nodes; ++k)
            per_node[static_cast<std::size_t>(k)] = moment(ensemble.node_measure(k), q);
        row.sup_moment = sup_of(per_node);
        std::vector<double> sorted = per_node;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t m = sorted.size();
        const double median =
            m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
        row.blow_up = row.sup_moment > 10.0 * median && row.sup_moment > 0.0;
        out.push_back(row);
    }
    return out;
}

}  // namespace vc
