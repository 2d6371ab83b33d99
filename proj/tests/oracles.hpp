#pragma once

// Slow, independent reference implementations used only to freeze expected
// values in the test suite. Nothing here may call into the library's own
// numerics beyond basic types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "vc/measures.hpp"

namespace oracle {

// Composite Simpson on a fixed fine grid; deliberately different from the
// adaptive Gauss-Kronrod integrator in the library.
template <class F>
double simpson(F&& f, double a, double b, int intervals = 4096) {
    if (intervals % 2) ++intervals;
    const double h = (b - a) / intervals;
    double s = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Exact W_p^p between equal-size clouds by enumerating all N! assignments.
inline double brute_force_wpp(const vc::EmpiricalMeasure& a, const vc::EmpiricalMeasure& b,
                              double p) {
    std::vector<int> perm(static_cast<std::size_t>(a.n));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (int i = 0; i < a.n; ++i) {
            double s2 = 0.0;
            for (int c = 0; c < a.d; ++c) {
                const double diff = a.x(i, c) - b.x(perm[static_cast<std::size_t>(i)], c);
                s2 += diff * diff;
            }
            cost += std::pow(std::sqrt(s2), p);
        }
        best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best / a.n;
}

inline double brute_force_wp(const vc::EmpiricalMeasure& a, const vc::EmpiricalMeasure& b,
                             double p) {
    return std::pow(brute_force_wpp(a, b, p), 1.0 / p);
}

// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t m = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    }
    return sxy / sxx;
}

}  // namespace oracle
