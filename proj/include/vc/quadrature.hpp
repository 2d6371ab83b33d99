#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "vc/errors.hpp"

namespace vc {
namespace gk {

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
inline constexpr double xgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double wgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
void rule(F&& f, double a, double b, double& value, double& error) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = wgk[7] * fc;
    double resg = wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double x = h * xgk[i];
        const double fsum = f(c - x) + f(c + x);
        resk += wgk[i] * fsum;
        if (i % 2 == 1) resg += wg[i / 2] * fsum;
    }
    value = resk * h;
    error = std::abs((resk - resg) * h);
}

}  // namespace gk

// Adaptive Gauss-Kronrod integration; subdivides the segment with the
// largest error estimate until the tolerance is met.
template <class F>
double integrate(F&& f, double a, double b, double rtol = 1e-8, double atol = 0.0,
                 int max_segments = 4096) {
    if (a == b) return 0.0;
    struct Seg {
        double a, b, value, error;
    };
    std::vector<Seg> segs;
    double v, e;
    gk::rule(f, a, b, v, e);
    segs.push_back({a, b, v, e});
    for (int iter = 0; iter < max_segments; ++iter) {
        double total = 0.0, err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            total += segs[i].value;
            err += segs[i].error;
            if (segs[i].error > segs[worst].error) worst = i;
        }
        if (err <= std::max(atol, rtol * std::abs(total)) || err == 0.0) return total;
        const Seg s = segs[worst];
        const double mid = 0.5 * (s.a + s.b);
        if (mid <= s.a || mid >= s.b) return total;  // interval exhausted at rounding scale
        Seg left{s.a, mid, 0, 0}, right{mid, s.b, 0, 0};
        gk::rule(f, left.a, left.b, left.value, left.error);
        gk::rule(f, right.a, right.b, right.value, right.error);
        segs[worst] = left;
        segs.push_back(right);
    }
    throw QuadratureFailure("adaptive Gauss-Kronrod did not converge");
}

// Fixed 3-point Gauss-Legendre rule on [a, b].
template <class F>
double gauss3(F&& f, double a, double b) {
    constexpr double x1 = 0.7745966692414834;  // sqrt(3/5)
    constexpr double w0 = 0.8888888888888889;
    constexpr double w1 = 0.5555555555555556;
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    return h * (w0 * f(c) + w1 * (f(c - h * x1) + f(c + h * x1)));
}

}  // namespace vc
