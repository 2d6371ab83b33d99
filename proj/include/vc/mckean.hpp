#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vc/measures.hpp"
#include "vc/sde_engine.hpp"

namespace vc {

// Everything that defines one mean-field Volterra system.
struct SystemSpec {
    KernelSpec k_mu;
    KernelSpec k_sigma;
    DiffusionWeightMode mode = DiffusionWeightMode::LeftPoint;
    DriftSpec drift;
    DiffusionSpec diffusion;
    InitSampler init;
    int d = 1;

    bool measure_free() const {
        return !drift.measure_dependent() && !diffusion.measure_dependent();
    }
};

struct PicardConfig {
    int M_law = 1024;
    double tol = 1e-3;
    int max_iters = 25;
    double delta = 1.0;
    bool common_random_numbers = true;

    void validate() const {
        if (M_law < 2) throw ConfigError("Picard law cloud needs M_law >= 2");
        if (!(tol > 0.0)) throw ConfigError("Picard tolerance must be positive");
        if (max_iters < 1) throw ConfigError("Picard needs max_iters >= 1");
        if (!(delta >= 1.0)) throw ConfigError("Picard Wasserstein order needs delta >= 1");
    }
};

struct PicardResult {
    LawFlow law;
    int iterations_used = 0;
    std::vector<double> gap_history;  // sup_t W_delta between successive flows
    bool converged = false;
};

// Fixed-point iteration on the law flow: rho^0 is the constant-in-time
// initial law; each sweep simulates M_law paths against the frozen flow and
// replaces it with their empirical marginals. Reuses one noise plan across
// sweeps by default (common random numbers), so a measure-independent system
// is a fixed point after a single sweep, exactly. Throws NotConverged with
// the gap history when max_iters sweeps leave the gap above tol.
PicardResult picard_solve(const TimeGrid& grid, const SystemSpec& sys, const PicardConfig& cfg,
                          std::uint64_t master_seed, int threads = 1);

// Interacting N-particle system: at every step the drift/diffusion read the
// empirical measure of the N current states. Particle i consumes noise
// stream i (or its image under opts.stream_map).
PathEnsemble simulate_particle_system(int N, const TimeGrid& grid, const SystemSpec& sys,
                                      const NoisePlan& noise, const EngineOptions& opts = {});

struct CouplingResult {
    int N = 0;
    int n_replications = 0;
    double delta = 1.0;
    std::uint64_t master_seed = 0;
    std::string estimator;
    // Per grid node, averaged over replications (and particles where
    // applicable): E|X^{N,i}_t - Xbar^i_t|^delta, E W_delta(emp, ref)^delta,
    // the same Wasserstein statistic between two disjoint reference
    // subsamples (pure sampling noise), and their difference.
    std::vector<double> mean_pathwise_error_delta;
    std::vector<double> wasserstein_error_delta;
    std::vector<double> reference_bias_delta;
    std::vector<double> debiased_error_delta;
};

// Synchronous coupling of the particle system with N limit copies driven by
// the same initial draws and increments, against a Picard reference law of
// size M_law >= 4N. Per replication, three disjoint reference subsamples of
// size N feed the Wasserstein statistic and its sampling-noise companion.
CouplingResult synchronous_coupling(int N, const TimeGrid& grid, const SystemSpec& sys,
                                    const PicardConfig& cfg, int n_replications,
                                    std::uint64_t master_seed, double delta, int threads = 1);

// True iff permuting the noise streams and initial draws permutes the path
// matrix bit-exactly.
bool exchangeability_check(int N, const TimeGrid& grid, const SystemSpec& sys,
                           std::uint64_t master_seed,
                           const std::vector<std::uint32_t>& permutation);

}  // namespace vc
