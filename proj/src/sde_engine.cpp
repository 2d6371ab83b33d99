#include "vc/sde_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vc/detail/history_sum.hpp"
#include "vc/parallel.hpp"

namespace vc {

using detail::HistorySum;

InitSampler InitSampler::dirac(double x0) {
    if (!std::isfinite(x0)) throw ConfigError("Dirac initial condition must be finite");
    InitSampler s;
    s.family = Family::Dirac;
    s.x0 = x0;
    return s;
}

InitSampler InitSampler::gaussian(double mean, double sd) {
    if (!std::isfinite(mean) || !(sd >= 0.0) || !std::isfinite(sd))
        throw ConfigError("Gaussian initial condition needs finite mean and sd >= 0");
    InitSampler s;
    s.family = Family::Gaussian;
    s.mean = mean;
    s.sd = sd;
    return s;
}

InitSampler InitSampler::uniform(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo <= hi))
        throw ConfigError("Uniform initial condition needs lo <= hi, both finite");
    InitSampler s;
    s.family = Family::Uniform;
    s.lo = lo;
    s.hi = hi;
    return s;
}

void InitSampler::draw(const NoisePlan& plan, std::uint64_t stream, double* out, int d) const {
    switch (family) {
        case Family::Dirac:
            for (int c = 0; c < d; ++c) out[c] = x0;
            break;
        case Family::Gaussian: {
            plan.normals(NoisePlan::Init, stream, 0, out, d);
            for (int c = 0; c < d; ++c) out[c] = mean + sd * out[c];
            break;
        }
        case Family::Uniform: {
            for (int c = 0; c < d; ++c)
                out[c] = lo + (hi - lo) *
                                  plan.uniform(NoisePlan::Init, stream, 0,
                                               static_cast<std::uint64_t>(c));
            break;
        }
    }
}

std::string InitSampler::describe() const {
    std::ostringstream os;
    switch (family) {
        case Family::Dirac: os << "dirac(" << x0 << ")"; break;
        case Family::Gaussian: os << "gaussian(mean=" << mean << ", sd=" << sd << ")"; break;
        case Family::Uniform: os << "uniform(lo=" << lo << ", hi=" << hi << ")"; break;
    }
    return os.str();
}

EmpiricalMeasure PathEnsemble::node_measure(int k) const {
    std::vector<double> flat(static_cast<std::size_t>(M) * d);
    for (int i = 0; i < M; ++i)
        for (int c = 0; c < d; ++c)
            flat[static_cast<std::size_t>(i) * d + c] = state(i, k, c);
    return EmpiricalMeasure(M, d, std::move(flat));
}

PathEnsemble simulate_frozen_law(const TimeGrid& grid, const KernelSpec& k_mu,
                                 const KernelSpec& k_sigma, const DriftSpec& drift,
                                 const DiffusionSpec& diffusion, const LawFlow& law,
                                 const InitSampler& init, const NoisePlan& noise, int M,
                                 DiffusionWeightMode mode, const EngineOptions& opts) {
    if (M < 1) throw ConfigError("simulate_frozen_law needs M >= 1");
    if (law.grid.n_steps != grid.n_steps || law.grid.T != grid.T)
        throw DimensionMismatch("law flow grid does not match the simulation grid");
    if (opts.stream_map && static_cast<int>(opts.stream_map->size()) < M)
        throw LengthMismatch("stream map shorter than the path count");
    const int d = law.dim();
    const int n = grid.n_steps;
    const double dt = grid.dt();
    const double sqdt = std::sqrt(dt);
    const bool zero_drift = drift.family == DriftSpec::Family::Zero;

    // Law means per node, read by every path.
    std::vector<double> law_m1(static_cast<std::size_t>(n + 1) * d);
    for (int k = 0; k <= n; ++k) {
        const auto m = law.at(k).mean();
        for (int c = 0; c < d; ++c) law_m1[static_cast<std::size_t>(k) * d + c] = m[c];
    }

    WeightTable mu_tab, sig_tab;
    const bool mu_fast =
        opts.exp_fast_path && k_mu.family == KernelFamily::ExpConvolution;
    const bool sig_fast =
        opts.exp_fast_path && k_sigma.family == KernelFamily::ExpConvolution;
    if (!zero_drift && !mu_fast) mu_tab = build_drift_table(k_mu, grid);
    if (!sig_fast) sig_tab = build_diffusion_table(k_sigma, grid, mode);
    const auto mu_sum = HistorySum::drift(k_mu, grid, mu_fast, &mu_tab);
    const auto sig_sum = HistorySum::diffusion(k_sigma, grid, mode, sig_fast, &sig_tab);

    PathEnsemble ens;
    ens.meta.seed = noise.master_seed();
    ens.meta.grid = grid;
    ens.meta.d = d;
    ens.meta.kernel_mu = k_mu.describe();
    ens.meta.kernel_sigma = k_sigma.describe();
    ens.meta.drift = drift.describe();
    ens.meta.diffusion = diffusion.describe();
    ens.meta.init = init.describe();
    ens.meta.mode = mode;
    ens.meta.drift_is_zero = zero_drift;
    ens.meta.kernel_sigma_constant = k_sigma.family == KernelFamily::Constant;
    ens.M = M;
    ens.d = d;
    ens.states.assign(static_cast<std::size_t>(M) * (n + 1) * d, 0.0);

    parallel_for(static_cast<std::size_t>(M), opts.threads, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> F(static_cast<std::size_t>(n) * d);
        std::vector<double> G(static_cast<std::size_t>(n) * d);
        std::vector<double> dB(static_cast<std::size_t>(d));
        std::vector<double> mu_run(static_cast<std::size_t>(d));
        std::vector<double> sig_run(static_cast<std::size_t>(d));
        for (std::size_t i = lo; i < hi; ++i) {
            const std::uint64_t stream =
                opts.stream_map ? (*opts.stream_map)[i]
                                : opts.stream_offset + static_cast<std::uint64_t>(i);
            const std::uint64_t init_stream =
                opts.init_stream_map ? (*opts.init_stream_map)[i] : stream;
            double* px = ens.states.data() + i * (static_cast<std::size_t>(n) + 1) * d;
            init.draw(noise, init_stream, px, d);
            std::fill(mu_run.begin(), mu_run.end(), 0.0);
            std::fill(sig_run.begin(), sig_run.end(), 0.0);
            for (int j = 0; j < n; ++j) {
                const double tj = grid.node(j);
                const double* xj = px + static_cast<std::size_t>(j) * d;
                const double* m1 = law_m1.data() + static_cast<std::size_t>(j) * d;
                if (!zero_drift)
                    for (int c = 0; c < d; ++c)
                        F[static_cast<std::size_t>(j) * d + c] = drift.value(tj, xj[c], m1[c]);
                noise.normals(NoisePlan::Increments, stream, static_cast<std::uint64_t>(j),
                              dB.data(), d);
                for (int c = 0; c < d; ++c)
                    G[static_cast<std::size_t>(j) * d + c] =
                        diffusion.value(tj, xj[c], m1[c]) * sqdt * dB[static_cast<std::size_t>(c)];
                double* xk = px + (static_cast<std::size_t>(j) + 1) * d;
                for (int c = 0; c < d; ++c) {
                    double acc = px[c];
                    if (!zero_drift) {
                        if (mu_sum.exp_path) {
                            mu_run[static_cast<std::size_t>(c)] =
                                mu_sum.decay * mu_run[static_cast<std::size_t>(c)] +
                                F[static_cast<std::size_t>(j) * d + c];
                            acc += mu_sum.prefactor * mu_run[static_cast<std::size_t>(c)];
                        } else {
                            const double* w = mu_sum.table->row(j + 1);
                            double s = 0.0;
                            for (int l = 0; l <= j; ++l)
                                s += w[l] * F[static_cast<std::size_t>(l) * d + c];
                            acc += s;
                        }
                    }
                    if (sig_sum.exp_path) {
                        sig_run[static_cast<std::size_t>(c)] =
                            sig_sum.decay * sig_run[static_cast<std::size_t>(c)] +
                            G[static_cast<std::size_t>(j) * d + c];
                        acc += sig_sum.prefactor * sig_run[static_cast<std::size_t>(c)];
                    } else {
                        const double* w = sig_sum.table->row(j + 1);
                        double s = 0.0;
                        for (int l = 0; l <= j; ++l)
                            s += w[l] * G[static_cast<std::size_t>(l) * d + c];
                        acc += s;
                    }
                    xk[c] = acc;
                }
                for (int c = 0; c < d; ++c)
                    if (!std::isfinite(xk[c])) {
                        std::ostringstream os;
                        os << "non-finite state at path " << i << ", node " << (j + 1);
                        throw NonFiniteState(i, static_cast<std::size_t>(j) + 1, os.str());
                    }
            }
        }
    });
    return ens;
}

MartingaleReport martingale_check(const PathEnsemble& ensemble) {
    if (!ensemble.meta.drift_is_zero || !ensemble.meta.kernel_sigma_constant)
        throw InvalidDiagnostic(
            "martingale check requires zero drift and a constant diffusion kernel");
    MartingaleReport rep;
    const int n = ensemble.meta.grid.n_steps;
    rep.node_pass.assign(static_cast<std::size_t>(n) + 1, 1);
    if (ensemble.M < 2) {
        rep.inconclusive = true;
        rep.pass = true;
        return rep;
    }
    const double root_m = std::sqrt(static_cast<double>(ensemble.M));
    rep.pass = true;
    for (int k = 1; k <= n; ++k) {
        for (int c = 0; c < ensemble.d; ++c) {
            std::vector<double> diffs(static_cast<std::size_t>(ensemble.M));
            for (int i = 0; i < ensemble.M; ++i)
                diffs[static_cast<std::size_t>(i)] =
                    ensemble.state(i, k, c) - ensemble.state(i, 0, c);
            const double mean = stable_sum(diffs) / ensemble.M;
            std::vector<double> sq(diffs.size());
            for (std::size_t i = 0; i < diffs.size(); ++i) {
                const double dd = diffs[i] - mean;
                sq[i] = dd * dd;
            }
            const double sd = std::sqrt(stable_sum(std::move(sq)) / (ensemble.M - 1));
            const double band = 4.0 * sd / root_m;
            const double ratio = band > 0.0 ? std::abs(mean) / band
                                            : (mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
            if (ratio > rep.worst_ratio) {
                rep.worst_ratio = ratio;
                rep.worst_node = k;
            }
            if (ratio > 1.0) {
                rep.node_pass[static_cast<std::size_t>(k)] = 0;
                rep.pass = false;
            }
        }
    }
    return rep;
}

}  // namespace vc
