#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "vc/errors.hpp"

namespace vc {

// Cubic Hermite interpolant on an ascending node set. Slopes either come
// from the caller or from the Fritsch-Carlson monotone rule, which keeps
// the interpolant monotone wherever the data is.
class CubicInterp {
public:
    static CubicInterp with_slopes(std::vector<double> x, std::vector<double> y,
                                   std::vector<double> dy) {
        CubicInterp c;
        c.init(std::move(x), std::move(y), std::move(dy));
        return c;
    }

    static CubicInterp monotone(std::vector<double> x, std::vector<double> y) {
        const std::size_t n = x.size();
        if (n < 2 || y.size() != n) throw LengthMismatch("CubicInterp: need >= 2 nodes");
        std::vector<double> d(n - 1), m(n);
        for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        m[0] = d[0];
        m[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                m[i] = 0.0;
            } else {
                // harmonic mean weighted by interval widths
                const double w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
                const double w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
                m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (d[i] == 0.0) {
                m[i] = m[i + 1] = 0.0;
            } else {
                const double a = m[i] / d[i], b = m[i + 1] / d[i];
                const double s = a * a + b * b;
                if (s > 9.0) {
                    const double t = 3.0 / std::sqrt(s);
                    m[i] = t * a * d[i];
                    m[i + 1] = t * b * d[i];
                }
            }
        }
        CubicInterp c;
        c.init(std::move(x), std::move(y), std::move(m));
        return c;
    }

    double min_x() const { return x_.front(); }
    double max_x() const { return x_.back(); }

    double eval(double x) const {
        const auto [i, u, h] = locate(x);
        const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
        const double h10 = u * (1 - u) * (1 - u);
        const double h01 = u * u * (3 - 2 * u);
        const double h11 = u * u * (u - 1);
        return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
    }

    double deriv(double x) const {
        const auto [i, u, h] = locate(x);
        const double g00 = 6 * u * (u - 1);
        const double g10 = (1 - u) * (1 - 3 * u);
        const double g01 = -g00;
        const double g11 = u * (3 * u - 2);
        return (g00 * y_[i] + g01 * y_[i + 1]) / h + g10 * m_[i] + g11 * m_[i + 1];
    }

private:
    void init(std::vector<double> x, std::vector<double> y, std::vector<double> m) {
        if (x.size() < 2 || x.size() != y.size() || x.size() != m.size())
            throw LengthMismatch("CubicInterp: node/value/slope sizes disagree");
        for (std::size_t i = 0; i + 1 < x.size(); ++i)
            if (!(x[i] < x[i + 1])) throw ConfigError("CubicInterp: nodes must ascend");
        x_ = std::move(x);
        y_ = std::move(y);
        m_ = std::move(m);
    }

    struct Loc {
        std::size_t i;
        double u, h;
    };
    Loc locate(double x) const {
        x = std::clamp(x, x_.front(), x_.back());
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const std::size_t i =
            std::min(x_.size() - 2, static_cast<std::size_t>(std::max<std::ptrdiff_t>(
                                        0, (it - x_.begin()) - 1)));
        const double h = x_[i + 1] - x_[i];
        return {i, (x - x_[i]) / h, h};
    }

    std::vector<double> x_, y_, m_;
};

}  // namespace vc
