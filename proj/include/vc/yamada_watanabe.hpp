#pragma once

#include <vector>

#include "vc/errors.hpp"
#include "vc/interp.hpp"

namespace vc {

// Thresholds a_0 = 1 > a_1 > ... > a_{n_max} > 0 with
// integral of x^{-(1+2 xi)} over (a_n, a_{n-1}) equal to n, in closed form.
std::vector<double> compute_a_sequence(double xi, int n_max);

// Smooth bump supported exactly on (a, b) with unit integral and
// psi(x) <= 2 / (n x^{1+2 xi}) pointwise. Shape: the profile
// x^{-(1+2 xi)} / n multiplied by C-infinity ramps in log x at both ends,
// then rescaled; the common ramp width is chosen by bisection so the
// rescaling stays below the slack the pointwise bound leaves.
struct Mollifier {
    double a = 0.0, b = 0.0;
    double xi = 0.0;
    int n = 1;
    double ramp_fraction = 0.0;  // ramp width as a fraction of log(b/a)/2
    double scale = 1.0;          // normalization constant, must stay <= 2

    double operator()(double x) const;
};

Mollifier build_mollifier(double a_n, double a_prev, int n, double xi);

// The regularization family: phi_n(x) is the double integral of psi_n, an
// even C^2 approximation of |x| with phi_n'' = psi_n(|x|). Evaluation uses
// per-n antiderivative tables on a log-spaced grid; phi_quadrature is the
// slow direct-quadrature evaluation kept for cross-checks.
class YWSequence {
public:
    static YWSequence build(double xi, int n_max);

    double xi() const { return xi_; }
    int n_max() const { return n_max_; }
    const std::vector<double>& a() const { return a_; }
    const Mollifier& mollifier(int n) const { return psi_.at(static_cast<std::size_t>(n - 1)); }

    double psi(double x, int n) const { return mollifier(n)(std::abs(x)); }
    double phi(double x, int n) const;
    double phi_prime(double x, int n) const;   // in (0, 1), sign(x) applied
    double phi_second(double x, int n) const;  // psi_n(|x|)
    double phi_quadrature(double x, int n) const;

private:
    double xi_ = 0.0;
    int n_max_ = 0;
    std::vector<double> a_;
    std::vector<Mollifier> psi_;
    struct Table {
        double lo = 0.0, hi = 0.0;
        double tail_offset = 0.0;  // phi(x) = x - tail_offset for x >= hi
        CubicInterp value;         // phi on log-spaced nodes in [lo, hi]
        CubicInterp slope;         // cumulative integral of psi, the cdf
    };
    std::vector<Table> tables_;
};

double phi_n(double x, const YWSequence& seq, int n);

}  // namespace vc
