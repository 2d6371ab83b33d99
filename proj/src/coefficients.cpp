#include "vc/coefficients.hpp"

#include <cmath>
#include <sstream>

#include "vc/rng.hpp"

namespace vc {

DriftSpec DriftSpec::zero() { return DriftSpec{}; }

DriftSpec DriftSpec::linear_mean_field(double a, double b, double c) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c))
        throw ConfigError("linear mean-field drift needs finite coefficients");
    DriftSpec s;
    s.family = Family::LinearMeanField;
    s.a = a;
    s.b = b;
    s.c = c;
    return s;
}

DriftSpec DriftSpec::time_modulated(double a, double b, double c, double theta) {
    auto s = linear_mean_field(a, b, c);
    if (!std::isfinite(theta)) throw ConfigError("time modulation amplitude must be finite");
    s.family = Family::TimeModulated;
    s.theta = theta;
    return s;
}

std::string DriftSpec::describe() const {
    std::ostringstream os;
    switch (family) {
        case Family::Zero: os << "zero"; break;
        case Family::LinearMeanField:
            os << "linear_mean_field(a=" << a << ", b=" << b << ", c=" << c << ")";
            break;
        case Family::TimeModulated:
            os << "time_modulated(a=" << a << ", b=" << b << ", c=" << c << ", theta=" << theta
               << ")";
            break;
    }
    return os.str();
}

double DriftSpec::value(double t, double x, double m1) const {
    switch (family) {
        case Family::Zero: return 0.0;
        case Family::LinearMeanField: return a * x + b * m1 + c;
        case Family::TimeModulated:
            return (1.0 + theta * std::sin(t)) * (a * x + b * m1 + c);
    }
    return 0.0;
}

DiffusionSpec DiffusionSpec::constant_vol(double s) {
    if (!std::isfinite(s)) throw ConfigError("constant volatility must be finite");
    DiffusionSpec d;
    d.family = Family::ConstantVol;
    d.s0 = s;
    return d;
}

DiffusionSpec DiffusionSpec::affine(double s0, double s1) {
    if (!std::isfinite(s0) || !std::isfinite(s1))
        throw ConfigError("affine diffusion needs finite coefficients");
    DiffusionSpec d;
    d.family = Family::Affine;
    d.s0 = s0;
    d.s1 = s1;
    return d;
}

DiffusionSpec DiffusionSpec::affine_mean(double s0, double s1, double s2) {
    auto d = affine(s0, s1);
    if (!std::isfinite(s2)) throw ConfigError("affine diffusion needs finite coefficients");
    d.family = Family::AffineMean;
    d.s2 = s2;
    return d;
}

DiffusionSpec DiffusionSpec::holder_power(double c, double eta) {
    if (!(c > 0.0)) throw ConfigError("Hoelder diffusion needs c > 0");
    if (!(eta >= 0.5) || !(eta <= 1.0))
        throw ConfigError("Hoelder diffusion needs exponent in [1/2, 1]");
    DiffusionSpec d;
    d.family = Family::HolderPower;
    d.c = c;
    d.eta = eta;
    return d;
}

double DiffusionSpec::holder_constant() const {
    switch (family) {
        case Family::ConstantVol: return 0.0;
        case Family::Affine:
        case Family::AffineMean: return std::abs(s1);
        case Family::HolderPower: return c;
    }
    return 0.0;
}

std::string DiffusionSpec::describe() const {
    std::ostringstream os;
    switch (family) {
        case Family::ConstantVol: os << "constant_vol(" << s0 << ")"; break;
        case Family::Affine: os << "affine(s0=" << s0 << ", s1=" << s1 << ")"; break;
        case Family::AffineMean:
            os << "affine_mean(s0=" << s0 << ", s1=" << s1 << ", s2=" << s2 << ")";
            break;
        case Family::HolderPower: os << "holder_power(c=" << c << ", eta=" << eta << ")"; break;
    }
    return os.str();
}

double DiffusionSpec::value(double, double x, double m1) const {
    switch (family) {
        case Family::ConstantVol: return s0;
        case Family::Affine: return s0 + s1 * x;
        case Family::AffineMean: return s0 + s1 * x + s2 * m1;
        case Family::HolderPower: return c * std::pow(std::abs(x), eta);
    }
    return 0.0;
}

MeasureSummary summarize(const EmpiricalMeasure& rho, const std::vector<double>& qs) {
    MeasureSummary s;
    s.mean = rho.mean();
    s.sample_count = static_cast<std::size_t>(rho.n);
    s.moments.reserve(qs.size());
    for (double q : qs) s.moments.emplace_back(q, moment(rho, q));
    return s;
}

std::vector<double> eval_drift(const DriftSpec& spec, double t, const std::vector<double>& x,
                               const EmpiricalMeasure& rho) {
    if (static_cast<int>(x.size()) != rho.d)
        throw DimensionMismatch("drift: state dimension != measure dimension");
    const auto m1 = rho.mean();
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = spec.value(t, x[i], m1[i]);
    return out;
}

std::vector<double> eval_diffusion(const DiffusionSpec& spec, double t,
                                   const std::vector<double>& x,
                                   const std::optional<EmpiricalMeasure>& rho) {
    std::vector<double> m1(x.size(), 0.0);
    if (spec.measure_dependent()) {
        if (!rho)
            throw MeasureRequired("mean-coupled diffusion needs the empirical measure");
        if (static_cast<int>(x.size()) != rho->d)
            throw DimensionMismatch("diffusion: state dimension != measure dimension");
        m1 = rho->mean();
    }
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = spec.value(t, x[i], m1[i]);
    return out;
}

double estimate_holder_constant(const DiffusionSpec& spec, int n_pairs, double box,
                                std::uint64_t seed) {
    if (n_pairs < 100) throw ConfigError("Hoelder estimate needs at least 100 pairs");
    if (!(box > 0.0)) throw ConfigError("Hoelder estimate needs box > 0");
    const double eta = spec.holder_exponent();
    NoisePlan plan(seed);
    double worst = 0.0;
    for (int k = 0; k < n_pairs; ++k) {
        const auto kk = static_cast<std::uint64_t>(k);
        const double x = box * (2.0 * plan.uniform(NoisePlan::Pairs, 1, kk, 0) - 1.0);
        const double y = box * (2.0 * plan.uniform(NoisePlan::Pairs, 1, kk, 1) - 1.0);
        if (x == y) continue;
        const double num = std::abs(spec.value(0.0, x, 0.0) - spec.value(0.0, y, 0.0));
        worst = std::max(worst, num / std::pow(std::abs(x - y), eta));
    }
    return worst;
}

}  // namespace vc
