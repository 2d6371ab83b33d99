#include "vc/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vc/rng.hpp"

namespace vc {

double stable_sum(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

EmpiricalMeasure::EmpiricalMeasure(int n_, int d_, std::vector<double> flat)
    : n(n_), d(d_), pts(std::move(flat)) {
    if (n < 1 || d < 1) throw ConfigError("empirical measure needs n >= 1, d >= 1");
    if (pts.size() != static_cast<std::size_t>(n) * d)
        throw LengthMismatch("empirical measure: point buffer size != n*d");
    for (double x : pts)
        if (!std::isfinite(x)) throw ConfigError("empirical measure: non-finite coordinate");
}

EmpiricalMeasure EmpiricalMeasure::from_scalars(std::vector<double> xs) {
    const int n = static_cast<int>(xs.size());  // before the move; argument order is unspecified
    return EmpiricalMeasure(n, 1, std::move(xs));
}

std::vector<double> EmpiricalMeasure::mean() const {
    std::vector<double> m(static_cast<std::size_t>(d));
    std::vector<double> col(static_cast<std::size_t>(n));
    for (int c = 0; c < d; ++c) {
        for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = x(i, c);
        m[static_cast<std::size_t>(c)] = stable_sum(col) / n;
    }
    return m;
}

std::vector<double> EmpiricalMeasure::scalars() const {
    if (d != 1) throw DimensionMismatch("scalar view requires d == 1");
    return pts;
}

LawFlow::LawFlow(TimeGrid g, std::vector<EmpiricalMeasure> ms)
    : grid(g), measures(std::move(ms)) {
    if (measures.size() != static_cast<std::size_t>(grid.n_steps) + 1)
        throw LengthMismatch("law flow needs one measure per grid node");
    for (const auto& m : measures)
        if (m.n != measures.front().n || m.d != measures.front().d)
            throw DimensionMismatch("law flow: cloud size or dimension varies across time");
}

LawFlow LawFlow::constant(const TimeGrid& g, EmpiricalMeasure m) {
    std::vector<EmpiricalMeasure> ms(static_cast<std::size_t>(g.n_steps) + 1, m);
    return LawFlow(g, std::move(ms));
}

namespace {

void require_order(double p) {
    if (!(p >= 1.0)) throw ConfigError("Wasserstein order must satisfy p >= 1");
}

}  // namespace

double wasserstein_1d(double p, const std::vector<double>& xs, const std::vector<double>& ys) {
    require_order(p);
    if (xs.size() != ys.size()) throw LengthMismatch("wasserstein_1d: sample sizes differ");
    if (xs.empty()) throw ConfigError("wasserstein_1d: empty samples");
    std::vector<double> a(xs), b(ys);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<double> costs(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        costs[i] = std::pow(std::abs(a[i] - b[i]), p);
    return std::pow(stable_sum(std::move(costs)) / static_cast<double>(a.size()), 1.0 / p);
}

double wasserstein_1d_quantile(double p, std::vector<double> xs, std::vector<double> ys) {
    require_order(p);
    if (xs.empty() || ys.empty()) throw ConfigError("wasserstein_1d_quantile: empty samples");
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    const auto n = xs.size(), m = ys.size();
    std::size_t i = 0, j = 0;
    double u = 0.0;
    std::vector<double> pieces;
    pieces.reserve(n + m);
    while (i < n && j < m) {
        const double ui = static_cast<double>(i + 1) / static_cast<double>(n);
        const double uj = static_cast<double>(j + 1) / static_cast<double>(m);
        const double next = std::min(ui, uj);
        pieces.push_back((next - u) * std::pow(std::abs(xs[i] - ys[j]), p));
        u = next;
        if (ui <= next) ++i;
        if (uj <= next) ++j;
    }
    return std::pow(stable_sum(std::move(pieces)), 1.0 / p);
}

double assignment_cost(const std::vector<double>& cost, int n) {
    if (n < 1) throw ConfigError("assignment needs n >= 1");
    if (cost.size() != static_cast<std::size_t>(n) * n)
        throw LengthMismatch("assignment: cost matrix size != n*n");
    constexpr double kInf = std::numeric_limits<double>::infinity();
    // Shortest augmenting path assignment with dual potentials; rows and
    // columns are 1-based, column 0 is the virtual start.
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> match(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1, kInf);
        std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = match[static_cast<std::size_t>(j0)];
            double delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur =
                    cost[static_cast<std::size_t>(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[match[static_cast<std::size_t>(j)]] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<double> picked(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j)
        picked[static_cast<std::size_t>(j - 1)] =
            cost[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1) * n + (j - 1)];
    return stable_sum(std::move(picked));
}

double wasserstein_exact(double p, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    require_order(p);
    if (mu.d != nu.d) throw DimensionMismatch("wasserstein_exact: dimension mismatch");
    if (mu.n != nu.n) throw LengthMismatch("wasserstein_exact: cloud sizes differ");
    if (mu.n > 512) {
        std::ostringstream os;
        os << "wasserstein_exact: N=" << mu.n
           << " exceeds the 512-point assignment cap; use the sliced estimator";
        throw TooLarge(os.str());
    }
    const int n = mu.n, d = mu.d;
    std::vector<double> cost(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        const double* a = mu.row(i);
        for (int j = 0; j < n; ++j) {
            const double* b = nu.row(j);
            double s2 = 0.0;
            for (int c = 0; c < d; ++c) {
                const double diff = a[c] - b[c];
                s2 += diff * diff;
            }
            cost[static_cast<std::size_t>(i) * n + j] = std::pow(std::sqrt(s2), p);
        }
    }
    return std::pow(assignment_cost(cost, n) / n, 1.0 / p);
}

double wasserstein_sliced(double p, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                          int n_projections, std::uint64_t seed) {
    require_order(p);
    if (mu.d != nu.d) throw DimensionMismatch("wasserstein_sliced: dimension mismatch");
    if (mu.n != nu.n) throw LengthMismatch("wasserstein_sliced: cloud sizes differ");
    if (n_projections < 1) throw ConfigError("wasserstein_sliced: need n_projections >= 1");
    const int d = mu.d;
    NoisePlan plan(seed);
    std::vector<double> dir(static_cast<std::size_t>(d));
    std::vector<double> px(static_cast<std::size_t>(mu.n)), py(static_cast<std::size_t>(nu.n));
    std::vector<double> powers(static_cast<std::size_t>(n_projections));
    for (int k = 0; k < n_projections; ++k) {
        plan.normals(NoisePlan::Slice, static_cast<std::uint64_t>(k), 0, dir.data(), d);
        double norm2 = 0.0;
        for (double c : dir) norm2 += c * c;
        const double inv = 1.0 / std::sqrt(norm2);
        for (int i = 0; i < mu.n; ++i) {
            double sx = 0.0, sy = 0.0;
            for (int c = 0; c < d; ++c) {
                sx += dir[static_cast<std::size_t>(c)] * mu.x(i, c);
                sy += dir[static_cast<std::size_t>(c)] * nu.x(i, c);
            }
            px[static_cast<std::size_t>(i)] = sx * inv;
            py[static_cast<std::size_t>(i)] = sy * inv;
        }
        powers[static_cast<std::size_t>(k)] = std::pow(wasserstein_1d(p, px, py), p);
    }
    return std::pow(stable_sum(std::move(powers)) / n_projections, 1.0 / p);
}

double moment(const EmpiricalMeasure& mu, double q) {
    if (!(q >= 1.0)) throw ConfigError("moment order must satisfy q >= 1");
    std::vector<double> vals(static_cast<std::size_t>(mu.n));
    for (int i = 0; i < mu.n; ++i) {
        double s2 = 0.0;
        for (int c = 0; c < mu.d; ++c) s2 += mu.x(i, c) * mu.x(i, c);
        vals[static_cast<std::size_t>(i)] = std::pow(std::sqrt(s2), q);
    }
    return stable_sum(std::move(vals)) / mu.n;
}

std::string estimator_label_sliced(int n_projections) {
    std::ostringstream os;
    os << "sliced(" << n_projections << ")";
    return os.str();
}

}  // namespace vc
