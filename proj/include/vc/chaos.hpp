#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vc/mckean.hpp"

namespace vc {

// delta = (4 + 2 eps) / eps, the Wasserstein order tied to the moment
// bookkeeping; satisfies 2/(2+eps) + 2/delta = 1.
double delta_from_epsilon(double epsilon);

// Reference empirical-measure convergence rate: N^{-1/2} for d < 2 delta,
// N^{-1/2} log2(1+N) at the boundary, N^{-delta/d} above it.
double epsilon_n(int d, double delta, std::uint64_t N);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    // set when a value is non-positive and a log-log fit is undefined
    bool degenerate = false;
};

// Least squares of log(value) against log(N).
RateFit fit_rate(const std::vector<double>& N, const std::vector<double>& value);

enum class Setting { LipschitzMultiD, HolderOneD };

struct ExperimentConfig {
    int schema_version = 1;
    Setting setting = Setting::LipschitzMultiD;
    SystemSpec system;
    TimeGrid grid{1.0, 256};
    std::vector<int> N_list;
    int n_replications = 8;
    PicardConfig picard;
    std::uint64_t master_seed = 0;
    std::string output_dir = "out";
    std::string estimator_policy = "auto";
    // Setting I admissibility bookkeeping; delta is derived from epsilon.
    double gamma = 0.25;
    double epsilon = 2.0;
    double p_moment = 0.0;  // 0 means "derive the minimal documented value"
    double delta = 1.0;

    void validate_and_finalize();
};

struct ChaosRow {
    int N = 0;
    double epsilon_n = 0.0;
    double sup_pathwise = 0.0;
    double sup_wasserstein = 0.0;
    double sup_bias = 0.0;
    double sup_debiased = 0.0;
    std::string estimator;
};

struct ChaosReport {
    ExperimentConfig config;
    std::vector<ChaosRow> rows;
    RateFit fit_pathwise, fit_wasserstein, fit_debiased;
    // per-node metric curves for errors.csv, one entry per completed N
    std::vector<CouplingResult> details;
    double runtime_seconds = 0.0;
    int threads_used = 1;
};

// Runs synchronous coupling for every N in cfg.N_list, takes sup over grid
// nodes of each metric, fits log-log slopes, and (when out_dir is not
// empty) writes report.json, errors.csv, rates.csv and run.log there,
// flushing after every N. A failure mid-run still leaves the completed-N
// rows on disk.
ChaosReport run_chaos_experiment(const ExperimentConfig& cfg, int threads = 1);

struct GCBenchmark {
    int d = 1;
    double delta = 1.0;
    int n_reps = 0;
    std::vector<int> N_list;
    std::vector<double> value;      // E[W_delta(cloud, reference)^delta]
    std::vector<double> epsilon;    // reference rate per N
    RateFit fit;
    std::string estimator;
};

// Empirical-measure convergence benchmark: an N-point i.i.d. cloud against
// an equal-size subsample (without replacement) of an independent reference
// cloud of size 16N. d = 1 uses the sorted coupling; d >= 2 the exact
// assignment, which caps N at 512.
GCBenchmark glivenko_cantelli_benchmark(int d, double delta, const std::vector<int>& N_list,
                                        const InitSampler& sampler, int n_reps,
                                        std::uint64_t seed);

// Hoelder regularity estimate from an ensemble: regress the log of the
// Monte Carlo estimate of E|X_{t+h} - X_t|^q on log h over the given lag
// multiples of the grid step; returns slope / q.
double holder_regularity_diagnostic(const PathEnsemble& ensemble, double q,
                                    const std::vector<int>& lag_steps);

struct MomentRow {
    double q = 0.0;
    double sup_moment = 0.0;
    bool blow_up = false;  // max node moment exceeds 10x the median node moment
};

std::vector<MomentRow> moment_diagnostic(const PathEnsemble& ensemble,
                                         const std::vector<double>& q_list);

}  // namespace vc
