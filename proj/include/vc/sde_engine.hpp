#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vc/coefficients.hpp"
#include "vc/errors.hpp"
#include "vc/grid.hpp"
#include "vc/kernels.hpp"
#include "vc/measures.hpp"
#include "vc/rng.hpp"

namespace vc {

// Initial-condition sampler; scalar parameters broadcast across coordinates
// with independent draws per coordinate. All families have every moment
// finite, which the mean-field theory requires of X_0.
struct InitSampler {
    enum class Family { Dirac, Gaussian, Uniform };
    Family family = Family::Dirac;
    double x0 = 0.0, mean = 0.0, sd = 1.0, lo = 0.0, hi = 1.0;

    static InitSampler dirac(double x0);
    static InitSampler gaussian(double mean, double sd);
    static InitSampler uniform(double lo, double hi);

    void draw(const NoisePlan& plan, std::uint64_t stream, double* out, int d) const;
    std::string describe() const;
};

struct EnsembleMeta {
    std::uint64_t seed = 0;
    TimeGrid grid{1.0, 1};
    int d = 1;
    std::string kernel_mu, kernel_sigma, drift, diffusion, init;
    DiffusionWeightMode mode = DiffusionWeightMode::LeftPoint;
    bool drift_is_zero = false;
    bool kernel_sigma_constant = false;
};

// M sample paths on the grid; states laid out path-major:
// states[(i * n_nodes + k) * d + c].
struct PathEnsemble {
    EnsembleMeta meta;
    int M = 0;
    int d = 1;
    std::vector<double> states;

    double state(int i, int k, int c = 0) const {
        return states[(static_cast<std::size_t>(i) * (meta.grid.n_steps + 1) +
                       static_cast<std::size_t>(k)) *
                          d +
                      c];
    }
    EmpiricalMeasure node_measure(int k) const;
};

struct EngineOptions {
    int threads = 1;
    // Use the exponential-kernel running recursion instead of the direct
    // O(n^2) history sum for whichever of the two kernels is exponential.
    bool exp_fast_path = false;
    // Noise stream for path i is stream_map[i] when given, else
    // stream_offset + i. Coupled runs pass the same streams to both systems.
    const std::vector<std::uint64_t>* stream_map = nullptr;
    std::uint64_t stream_offset = 0;
    // Initial draws normally follow stream_map; tests can decouple them.
    const std::vector<std::uint64_t>* init_stream_map = nullptr;
};

// Euler scheme for the Volterra SDE with the law flow frozen:
//   X_{t_k} = X_0 + sum_{j<k} wmu_{j,k} mu(t_j, X_{t_j}, rho_{t_j})
//                 + sum_{j<k} wsig_{j,k} sigma(t_j, X_{t_j}[, rho_{t_j}]) dB_j
// Paths are independent given the law; the result is a pure function of
// (inputs, noise seed) regardless of thread count.
PathEnsemble simulate_frozen_law(const TimeGrid& grid, const KernelSpec& k_mu,
                                 const KernelSpec& k_sigma, const DriftSpec& drift,
                                 const DiffusionSpec& diffusion, const LawFlow& law,
                                 const InitSampler& init, const NoisePlan& noise, int M,
                                 DiffusionWeightMode mode, const EngineOptions& opts = {});

struct MartingaleReport {
    bool pass = false;
    bool inconclusive = false;
    double worst_ratio = 0.0;  // max over nodes of |mean| / (4 sd / sqrt(M))
    int worst_node = 0;
    std::vector<char> node_pass;
};

// Zero-drift constant-kernel sanity check: the node means of X_t - X_0 must
// sit within 4 standard errors of zero.
MartingaleReport martingale_check(const PathEnsemble& ensemble);

}  // namespace vc
