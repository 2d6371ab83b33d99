#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vc/errors.hpp"
#include "vc/grid.hpp"

namespace vc {

// Sum in ascending order of value. Invariant under permutations of the
// input, which is what makes empirical means independent of particle
// ordering and thread partitioning.
double stable_sum(std::vector<double> v);

// Uniformly weighted point cloud in R^d, stored row-major (point index
// fastest along rows). Immutable once built.
struct EmpiricalMeasure {
    int n = 0;
    int d = 1;
    std::vector<double> pts;

    EmpiricalMeasure() = default;
    EmpiricalMeasure(int n_, int d_, std::vector<double> flat);
    static EmpiricalMeasure from_scalars(std::vector<double> xs);

    double x(int i, int c) const { return pts[static_cast<std::size_t>(i) * d + c]; }
    const double* row(int i) const { return pts.data() + static_cast<std::size_t>(i) * d; }

    // Per-coordinate mean via ascending summation (permutation invariant).
    std::vector<double> mean() const;
    // Scalar view of a 1-D cloud.
    std::vector<double> scalars() const;
};

// One empirical measure per grid node, constant cloud size across time.
struct LawFlow {
    TimeGrid grid;
    std::vector<EmpiricalMeasure> measures;

    LawFlow() = default;
    LawFlow(TimeGrid g, std::vector<EmpiricalMeasure> ms);
    static LawFlow constant(const TimeGrid& g, EmpiricalMeasure m);

    int cloud_size() const { return measures.empty() ? 0 : measures.front().n; }
    int dim() const { return measures.empty() ? 1 : measures.front().d; }
    const EmpiricalMeasure& at(int k) const { return measures[static_cast<std::size_t>(k)]; }
};

// Exact W_p between equal-size 1-D samples via order statistics.
double wasserstein_1d(double p, const std::vector<double>& xs, const std::vector<double>& ys);

// Exact W_p between 1-D samples of possibly different sizes via the
// quantile-function coupling on the merged probability breakpoints.
double wasserstein_1d_quantile(double p, std::vector<double> xs, std::vector<double> ys);

// Exact W_p for equal-size clouds in any dimension by solving the N x N
// optimal assignment with cost |x_i - y_j|^p. N is capped at 512; larger
// inputs are rejected so callers switch to the sliced estimator explicitly.
double wasserstein_exact(double p, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

// Sliced W_p: average of 1-D W_p^p over seeded uniform random directions,
// then the p-th root. Deterministic given the seed.
double wasserstein_sliced(double p, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                          int n_projections, std::uint64_t seed);

// (1/N) sum |x_i|^q with the Euclidean norm.
double moment(const EmpiricalMeasure& mu, double q);

// Minimum-cost perfect matching value for a dense n x n cost matrix
// (row-major); the workhorse behind wasserstein_exact, exposed for tests.
double assignment_cost(const std::vector<double>& cost, int n);

inline std::string estimator_label_exact() { return "exact"; }
inline std::string estimator_label_sorted() { return "sorted-1d"; }
std::string estimator_label_sliced(int n_projections);

}  // namespace vc
