#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "vc/errors.hpp"
#include "vc/grid.hpp"
#include "vc/interp.hpp"

namespace vc {

enum class KernelFamily { Fractional, ExpConvolution, Constant, SmoothConvolution };
enum class DiffusionWeightMode { LeftPoint, VarianceMatched };
enum class AssumptionId { Singular, Smooth, Convolutional };

// Two-argument Volterra kernel K(s, t) on the simplex 0 <= s <= t <= horizon.
// Families:
//   Fractional:        K(s,t) = (t-s)^(-alpha), singular on the diagonal
//   ExpConvolution:    K(s,t) = scale * exp(-rate (t-s))
//   Constant:          K(s,t) = scale
//   SmoothConvolution: K(s,t) = Ktilde(t-s), profile and derivative tabulated
struct KernelSpec {
    KernelFamily family = KernelFamily::Constant;
    double alpha = 0.0;
    double scale = 1.0;
    double rate = 0.0;
    std::vector<double> tab_u, tab_k, tab_dk;
    std::shared_ptr<const CubicInterp> tab_interp;
    double horizon = std::numeric_limits<double>::infinity();
    // admissibility metadata carried into reports; no runtime behaviour
    double claimed_gamma = 0.0;
    double claimed_epsilon = 0.0;

    bool singular() const { return family == KernelFamily::Fractional; }

    static KernelSpec fractional(double alpha);
    static KernelSpec constant(double c);
    static KernelSpec exp_convolution(double c, double lambda);
    static KernelSpec smooth_convolution(std::vector<double> u, std::vector<double> k,
                                         std::vector<double> dk, double horizon);

    std::string describe() const;
};

// Default diffusion-weight policy: variance matching for singular kernels,
// left-point sampling for smooth ones.
inline DiffusionWeightMode default_mode(const KernelSpec& spec) {
    return spec.singular() ? DiffusionWeightMode::VarianceMatched
                           : DiffusionWeightMode::LeftPoint;
}

double eval_kernel(const KernelSpec& spec, double s, double t);

// Drift weights w_{j,k} = int_{t_j}^{t_{j+1}} K(s, t_k) ds for j < k.
std::vector<double> drift_weights(const KernelSpec& spec, const TimeGrid& grid, int k);

// Diffusion weights for j < k. LeftPoint: K(t_j, t_k). VarianceMatched:
// ((1/dt) int_{t_j}^{t_{j+1}} K(s, t_k)^2 ds)^(1/2), so each weighted
// increment carries exactly the Ito-isometry variance of its subinterval.
std::vector<double> diffusion_weights(const KernelSpec& spec, const TimeGrid& grid, int k,
                                      DiffusionWeightMode mode);

// Packed lower-triangular tables of the above for every k = 1..n_steps;
// row k holds k entries starting at offset k(k-1)/2.
struct WeightTable {
    int n = 0;
    std::vector<double> w;
    const double* row(int k) const { return w.data() + static_cast<std::size_t>(k) * (k - 1) / 2; }
};

WeightTable build_drift_table(const KernelSpec& spec, const TimeGrid& grid);
WeightTable build_diffusion_table(const KernelSpec& spec, const TimeGrid& grid,
                                  DiffusionWeightMode mode);

struct KernelAssumptionReport {
    AssumptionId assumption_id = AssumptionId::Singular;
    bool satisfied = false;
    // Singular check: smallest L covering every sampled inequality, per line
    // and overall, plus the log-log growth of the per-gap-stratum worst ratio
    // (a negative slope means the ratio blows up as the gap shrinks).
    double estimated_L = 0.0;
    double mu_line_L = 0.0;
    double sigma_line_L = 0.0;
    double growth_slope_mu = 0.0;
    double growth_slope_sigma = 0.0;
    // Smooth check constants: c1 is the diagonal lower bound, c2 the largest
    // of the derivative bounds.
    double c1 = 0.0;
    double c2 = 0.0;
    std::pair<double, double> worst_pair{0.0, 0.0};
    std::size_t samples_checked = 0;
};

// Samples (t, t') pairs with gap strata emphasising small gaps and checks the
// four singular-kernel integral inequalities with exponents gamma(1+eps) and
// gamma(2+eps). satisfied means no divergence of the worst ratio was detected
// as the gap shrinks and all integrals are finite.
KernelAssumptionReport verify_assumption_singular(const KernelSpec& spec, double gamma,
                                                  double epsilon, int n_pairs,
                                                  std::uint64_t seed, double T = 1.0);

// Finite-difference checks of the smooth-kernel conditions on a 512-point
// grid: bounded time derivative, non-degenerate diagonal, bounded first
// partials and mixed-partial integral. Rejects singular families.
KernelAssumptionReport verify_assumption_smooth(const KernelSpec& spec, double T = 1.0);

}  // namespace vc
