#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vc/errors.hpp"
#include "vc/measures.hpp"

namespace vc {

// Drift families mu(t, x, rho), applied componentwise with m1(rho) the mean
// of the measure argument:
//   LinearMeanField: a*x + b*m1 + c
//   TimeModulated:   (1 + theta*sin t) * (a*x + b*m1 + c)
//   Zero
struct DriftSpec {
    enum class Family { LinearMeanField, TimeModulated, Zero };
    Family family = Family::Zero;
    double a = 0.0, b = 0.0, c = 0.0;
    double theta = 0.0;

    static DriftSpec zero();
    static DriftSpec linear_mean_field(double a, double b, double c);
    static DriftSpec time_modulated(double a, double b, double c, double theta);

    bool measure_dependent() const { return family != Family::Zero && b != 0.0; }
    double lipschitz_x() const { return std::abs(a) * (1.0 + std::abs(theta)); }
    double lipschitz_measure() const { return std::abs(b) * (1.0 + std::abs(theta)); }
    std::string describe() const;

    // Hot-path form: the caller supplies the precomputed measure mean.
    double value(double t, double x, double m1) const;
};

// Diffusion families; all built-ins act diagonally, so a d-dimensional
// evaluation is the vector of per-coordinate values:
//   Affine:      s0 + s1*x
//   AffineMean:  s0 + s1*x + s2*m1(rho)   (the only measure-dependent one)
//   HolderPower: c*|x|^eta, eta in [1/2, 1]
//   ConstantVol: s0
struct DiffusionSpec {
    enum class Family { Affine, AffineMean, HolderPower, ConstantVol };
    Family family = Family::ConstantVol;
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    double c = 0.0;
    double eta = 1.0;

    static DiffusionSpec constant_vol(double s);
    static DiffusionSpec affine(double s0, double s1);
    static DiffusionSpec affine_mean(double s0, double s1, double s2);
    static DiffusionSpec holder_power(double c, double eta);

    bool measure_dependent() const { return family == Family::AffineMean; }
    double holder_exponent() const { return family == Family::HolderPower ? eta : 1.0; }
    double holder_constant() const;
    std::string describe() const;

    double value(double t, double x, double m1) const;
};

struct MeasureSummary {
    std::vector<double> mean;
    std::vector<std::pair<double, double>> moments;  // (q, m_q)
    std::size_t sample_count = 0;
};

MeasureSummary summarize(const EmpiricalMeasure& rho, const std::vector<double>& qs = {});

// Componentwise drift evaluation against an empirical measure.
std::vector<double> eval_drift(const DriftSpec& spec, double t, const std::vector<double>& x,
                               const EmpiricalMeasure& rho);

// Diagonal of the diffusion matrix. The measure is required exactly when
// the family reads it (AffineMean).
std::vector<double> eval_diffusion(const DiffusionSpec& spec, double t,
                                   const std::vector<double>& x,
                                   const std::optional<EmpiricalMeasure>& rho = std::nullopt);

// Sampled upper estimate of the Hoelder quotient
// max |sigma(x)-sigma(y)| / |x-y|^eta over pairs in [-box, box].
double estimate_holder_constant(const DiffusionSpec& spec, int n_pairs, double box,
                                std::uint64_t seed);

}  // namespace vc
