#include "vc/mckean.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vc/detail/history_sum.hpp"
#include "vc/parallel.hpp"

namespace vc {

using detail::HistorySum;

namespace {

EmpiricalMeasure subcloud(const EmpiricalMeasure& m, const std::uint32_t* idx, int count) {
    std::vector<double> flat(static_cast<std::size_t>(count) * m.d);
    for (int i = 0; i < count; ++i)
        for (int c = 0; c < m.d; ++c)
            flat[static_cast<std::size_t>(i) * m.d + c] = m.x(static_cast<int>(idx[i]), c);
    return EmpiricalMeasure(count, m.d, std::move(flat));
}

// W_delta with the estimator picked by shape: sorted coupling in 1-D, exact
// assignment for small clouds, sliced otherwise.
double w_delta(double delta, const EmpiricalMeasure& a, const EmpiricalMeasure& b,
               std::uint64_t slice_seed, std::string* label = nullptr) {
    if (a.d == 1) {
        if (label) *label = estimator_label_sorted();
        return wasserstein_1d(delta, a.pts, b.pts);
    }
    if (a.n <= 512) {
        if (label) *label = estimator_label_exact();
        return wasserstein_exact(delta, a, b);
    }
    constexpr int kProjections = 128;
    if (label) *label = estimator_label_sliced(kProjections);
    return wasserstein_sliced(delta, a, b, kProjections, slice_seed);
}

double flow_gap(double delta, const LawFlow& a, const LawFlow& b, std::uint64_t slice_seed) {
    double gap = 0.0;
    for (int k = 0; k <= a.grid.n_steps; ++k)
        gap = std::max(gap, w_delta(delta, a.at(k), b.at(k),
                                    slice_seed + static_cast<std::uint64_t>(k)));
    return gap;
}

LawFlow flow_of(const PathEnsemble& ens) {
    std::vector<EmpiricalMeasure> ms;
    ms.reserve(static_cast<std::size_t>(ens.meta.grid.n_steps) + 1);
    for (int k = 0; k <= ens.meta.grid.n_steps; ++k) ms.push_back(ens.node_measure(k));
    return LawFlow(ens.meta.grid, std::move(ms));
}

}  // namespace

PicardResult picard_solve(const TimeGrid& grid, const SystemSpec& sys, const PicardConfig& cfg,
                          std::uint64_t master_seed, int threads) {
    cfg.validate();
    NoisePlan plan(master_seed);
    const NoisePlan law_plan(plan.derive(1, 0));

    // rho^0: constant-in-time flow of the initial law.
    std::vector<double> init_flat(static_cast<std::size_t>(cfg.M_law) * sys.d);
    for (int i = 0; i < cfg.M_law; ++i)
        sys.init.draw(law_plan, static_cast<std::uint64_t>(i),
                      init_flat.data() + static_cast<std::size_t>(i) * sys.d, sys.d);
    LawFlow law = LawFlow::constant(grid, EmpiricalMeasure(cfg.M_law, sys.d, init_flat));

    EngineOptions opts;
    opts.threads = threads;
    PicardResult res;
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        const NoisePlan iter_plan(
            cfg.common_random_numbers ? law_plan.master_seed()
                                      : plan.derive(2, static_cast<std::uint64_t>(iter)));
        auto ens = simulate_frozen_law(grid, sys.k_mu, sys.k_sigma, sys.drift, sys.diffusion,
                                       law, sys.init, iter_plan, cfg.M_law, sys.mode, opts);
        LawFlow next = flow_of(ens);
        const double gap =
            flow_gap(cfg.delta, next, law, plan.derive(4, static_cast<std::uint64_t>(iter)));
        res.gap_history.push_back(gap);
        law = std::move(next);
        res.iterations_used = iter;
        if (gap < cfg.tol) {
            res.converged = true;
            break;
        }
    }
    if (!res.converged) {
        std::ostringstream os;
        os << "Picard iteration did not reach tol=" << cfg.tol << " within "
           << cfg.max_iters << " sweeps (last gap " << res.gap_history.back() << ")";
        throw NotConverged(res.gap_history, os.str());
    }
    res.law = std::move(law);
    return res;
}

PathEnsemble simulate_particle_system(int N, const TimeGrid& grid, const SystemSpec& sys,
                                      const NoisePlan& noise, const EngineOptions& opts) {
    if (N < 1) throw ConfigError("particle system needs N >= 1");
    if (opts.stream_map && static_cast<int>(opts.stream_map->size()) < N)
        throw LengthMismatch("stream map shorter than the particle count");
    const int d = sys.d;
    const int n = grid.n_steps;
    const double sqdt = std::sqrt(grid.dt());
    const bool zero_drift = sys.drift.family == DriftSpec::Family::Zero;

    WeightTable mu_tab, sig_tab;
    const bool mu_fast =
        opts.exp_fast_path && sys.k_mu.family == KernelFamily::ExpConvolution;
    const bool sig_fast =
        opts.exp_fast_path && sys.k_sigma.family == KernelFamily::ExpConvolution;
    if (!zero_drift && !mu_fast) mu_tab = build_drift_table(sys.k_mu, grid);
    if (!sig_fast) sig_tab = build_diffusion_table(sys.k_sigma, grid, sys.mode);
    const auto mu_sum = HistorySum::drift(sys.k_mu, grid, mu_fast, &mu_tab);
    const auto sig_sum = HistorySum::diffusion(sys.k_sigma, grid, sys.mode, sig_fast, &sig_tab);

    PathEnsemble ens;
    ens.meta.seed = noise.master_seed();
    ens.meta.grid = grid;
    ens.meta.d = d;
    ens.meta.kernel_mu = sys.k_mu.describe();
    ens.meta.kernel_sigma = sys.k_sigma.describe();
    ens.meta.drift = sys.drift.describe();
    ens.meta.diffusion = sys.diffusion.describe();
    ens.meta.init = sys.init.describe();
    ens.meta.mode = sys.mode;
    ens.meta.drift_is_zero = zero_drift;
    ens.meta.kernel_sigma_constant = sys.k_sigma.family == KernelFamily::Constant;
    ens.M = N;
    ens.d = d;
    ens.states.assign(static_cast<std::size_t>(N) * (n + 1) * d, 0.0);

    auto state_ptr = [&](int i, int k) {
        return ens.states.data() +
               (static_cast<std::size_t>(i) * (n + 1) + static_cast<std::size_t>(k)) * d;
    };

    std::vector<std::uint64_t> streams(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
        streams[static_cast<std::size_t>(i)] =
            opts.stream_map ? (*opts.stream_map)[static_cast<std::size_t>(i)]
                            : opts.stream_offset + static_cast<std::uint64_t>(i);

    parallel_for(static_cast<std::size_t>(N), opts.threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const std::uint64_t init_stream =
                opts.init_stream_map ? (*opts.init_stream_map)[i] : streams[i];
            sys.init.draw(noise, init_stream, state_ptr(static_cast<int>(i), 0), d);
        }
    });

    // Lockstep over time: empirical mean of the current states feeds every
    // particle's coefficients, then each particle advances independently.
    std::vector<double> F(static_cast<std::size_t>(N) * n * d);
    std::vector<double> G(static_cast<std::size_t>(N) * n * d);
    std::vector<double> mu_run(static_cast<std::size_t>(N) * d, 0.0);
    std::vector<double> sig_run(static_cast<std::size_t>(N) * d, 0.0);
    std::vector<double> m1(static_cast<std::size_t>(d));
    std::vector<double> col(static_cast<std::size_t>(N));
    for (int j = 0; j < n; ++j) {
        const double tj = grid.node(j);
        for (int c = 0; c < d; ++c) {
            for (int i = 0; i < N; ++i) col[static_cast<std::size_t>(i)] = state_ptr(i, j)[c];
            m1[static_cast<std::size_t>(c)] = stable_sum(col) / N;
        }
        parallel_for(
            static_cast<std::size_t>(N), opts.threads, [&](std::size_t lo, std::size_t hi) {
                std::vector<double> dB(static_cast<std::size_t>(d));
                for (std::size_t i = lo; i < hi; ++i) {
                    const double* xj = state_ptr(static_cast<int>(i), j);
                    double* Fi = F.data() + (i * n + static_cast<std::size_t>(j)) * d;
                    double* Gi = G.data() + (i * n + static_cast<std::size_t>(j)) * d;
                    if (!zero_drift)
                        for (int c = 0; c < d; ++c)
                            Fi[c] = sys.drift.value(tj, xj[c], m1[static_cast<std::size_t>(c)]);
                    noise.normals(NoisePlan::Increments, streams[i],
                                  static_cast<std::uint64_t>(j), dB.data(), d);
                    for (int c = 0; c < d; ++c)
                        Gi[c] = sys.diffusion.value(tj, xj[c], m1[static_cast<std::size_t>(c)]) *
                                sqdt * dB[static_cast<std::size_t>(c)];
                    double* xk = state_ptr(static_cast<int>(i), j + 1);
                    for (int c = 0; c < d; ++c) {
                        double acc = state_ptr(static_cast<int>(i), 0)[c];
                        const std::size_t slot = i * d + static_cast<std::size_t>(c);
                        if (!zero_drift) {
                            if (mu_sum.exp_path) {
                                mu_run[slot] = mu_sum.decay * mu_run[slot] + Fi[c];
                                acc += mu_sum.prefactor * mu_run[slot];
                            } else {
                                const double* w = mu_sum.table->row(j + 1);
                                double s = 0.0;
                                for (int l = 0; l <= j; ++l)
                                    s += w[l] * F[(i * n + static_cast<std::size_t>(l)) * d + c];
                                acc += s;
                            }
                        }
                        if (sig_sum.exp_path) {
                            sig_run[slot] = sig_sum.decay * sig_run[slot] + Gi[c];
                            acc += sig_sum.prefactor * sig_run[slot];
                        } else {
                            const double* w = sig_sum.table->row(j + 1);
                            double s = 0.0;
                            for (int l = 0; l <= j; ++l)
                                s += w[l] * G[(i * n + static_cast<std::size_t>(l)) * d + c];
                            acc += s;
                        }
                        xk[c] = acc;
                    }
                    for (int c = 0; c < d; ++c)
                        if (!std::isfinite(xk[c])) {
                            std::ostringstream os;
                            os << "non-finite state at particle " << i << ", node " << (j + 1);
                            throw NonFiniteState(i, static_cast<std::size_t>(j) + 1, os.str());
                        }
                }
            });
    }
    return ens;
}

CouplingResult synchronous_coupling(int N, const TimeGrid& grid, const SystemSpec& sys,
                                    const PicardConfig& cfg, int n_replications,
                                    std::uint64_t master_seed, double delta, int threads) {
    if (N < 2) throw ConfigError("synchronous coupling needs N >= 2");
    if (n_replications < 1) throw ConfigError("synchronous coupling needs n_replications >= 1");
    if (!(delta >= 1.0)) throw ConfigError("synchronous coupling needs delta >= 1");
    if (cfg.M_law < 4 * N) {
        std::ostringstream os;
        os << "reference cloud M_law=" << cfg.M_law << " must be at least 4N=" << 4 * N;
        throw ReferenceTooSmall(os.str());
    }

    NoisePlan plan(master_seed);
    const auto ref = picard_solve(grid, sys, cfg, plan.derive(1, 0), threads);

    const int n = grid.n_steps;
    CouplingResult out;
    out.N = N;
    out.n_replications = n_replications;
    out.delta = delta;
    out.master_seed = master_seed;
    out.mean_pathwise_error_delta.assign(static_cast<std::size_t>(n) + 1, 0.0);
    out.wasserstein_error_delta.assign(static_cast<std::size_t>(n) + 1, 0.0);
    out.reference_bias_delta.assign(static_cast<std::size_t>(n) + 1, 0.0);
    out.debiased_error_delta.assign(static_cast<std::size_t>(n) + 1, 0.0);

    EngineOptions opts;
    opts.threads = threads;
    std::vector<double> vals(static_cast<std::size_t>(N));
    for (int r = 0; r < n_replications; ++r) {
        const NoisePlan rep_plan(plan.derive(2, static_cast<std::uint64_t>(r)));
        auto particles = simulate_particle_system(N, grid, sys, rep_plan, opts);
        auto limits = simulate_frozen_law(grid, sys.k_mu, sys.k_sigma, sys.drift,
                                          sys.diffusion, ref.law, sys.init, rep_plan, N,
                                          sys.mode, opts);
        const NoisePlan sub_plan(plan.derive(3, static_cast<std::uint64_t>(r)));
        const auto perm = sub_plan.permutation(0, static_cast<std::uint32_t>(cfg.M_law));
        for (int k = 0; k <= n; ++k) {
            for (int i = 0; i < N; ++i) {
                double s2 = 0.0;
                for (int c = 0; c < sys.d; ++c) {
                    const double diff = particles.state(i, k, c) - limits.state(i, k, c);
                    s2 += diff * diff;
                }
                vals[static_cast<std::size_t>(i)] = std::pow(std::sqrt(s2), delta);
            }
            out.mean_pathwise_error_delta[static_cast<std::size_t>(k)] +=
                stable_sum(vals) / N;

            const auto emp = particles.node_measure(k);
            const auto& ref_cloud = ref.law.at(k);
            const auto ref_a = subcloud(ref_cloud, perm.data(), N);
            const auto ref_b = subcloud(ref_cloud, perm.data() + N, N);
            const auto ref_c = subcloud(ref_cloud, perm.data() + 2 * N, N);
            const std::uint64_t ws =
                sub_plan.derive(5, static_cast<std::uint64_t>(k));
            std::string label;
            const double w_emp = w_delta(delta, emp, ref_a, ws, &label);
            const double w_ref = w_delta(delta, ref_b, ref_c, ws + 1);
            out.estimator = label;
            out.wasserstein_error_delta[static_cast<std::size_t>(k)] +=
                std::pow(w_emp, delta);
            out.reference_bias_delta[static_cast<std::size_t>(k)] += std::pow(w_ref, delta);
        }
    }
    const double inv_r = 1.0 / n_replications;
    for (int k = 0; k <= n; ++k) {
        out.mean_pathwise_error_delta[static_cast<std::size_t>(k)] *= inv_r;
        out.wasserstein_error_delta[static_cast<std::size_t>(k)] *= inv_r;
        out.reference_bias_delta[static_cast<std::size_t>(k)] *= inv_r;
        out.debiased_error_delta[static_cast<std::size_t>(k)] =
            out.wasserstein_error_delta[static_cast<std::size_t>(k)] -
            out.reference_bias_delta[static_cast<std::size_t>(k)];
    }
    return out;
}

bool exchangeability_check(int N, const TimeGrid& grid, const SystemSpec& sys,
                           std::uint64_t master_seed,
                           const std::vector<std::uint32_t>& permutation) {
    if (static_cast<int>(permutation.size()) != N)
        throw LengthMismatch("permutation length != N");
    std::vector<char> seen(static_cast<std::size_t>(N), 0);
    for (auto p : permutation) {
        if (p >= static_cast<std::uint32_t>(N) || seen[p])
            throw ConfigError("permutation is not a bijection of {0..N-1}");
        seen[p] = 1;
    }
    NoisePlan plan(master_seed);
    auto base = simulate_particle_system(N, grid, sys, plan);
    std::vector<std::uint64_t> mapped(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
        mapped[static_cast<std::size_t>(i)] = permutation[static_cast<std::size_t>(i)];
    EngineOptions opts;
    opts.stream_map = &mapped;
    auto permuted = simulate_particle_system(N, grid, sys, plan, opts);
    const int n = grid.n_steps;
    for (int i = 0; i < N; ++i)
        for (int k = 0; k <= n; ++k)
            for (int c = 0; c < sys.d; ++c)
                if (permuted.state(i, k, c) !=
                    base.state(static_cast<int>(permutation[static_cast<std::size_t>(i)]), k, c))
                    return false;
    return true;
}

}  // namespace vc
