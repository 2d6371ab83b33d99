#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "vc/kernels.hpp"

using vc::DiffusionWeightMode;
using vc::KernelSpec;
using vc::TimeGrid;

namespace {

// Tabulated smooth profile 2 + cos(u) on [0, 2]; dense enough that cubic
// Hermite interpolation error sits far below the tolerances used here.
KernelSpec cosine_table_kernel() {
    const int n = 2000;
    std::vector<double> u(n + 1), k(n + 1), dk(n + 1);
    for (int i = 0; i <= n; ++i) {
        u[i] = 2.0 * i / n;
        k[i] = 2.0 + std::cos(u[i]);
        dk[i] = -std::sin(u[i]);
    }
    return KernelSpec::smooth_convolution(u, k, dk, 2.0);
}

}  // namespace

TEST_CASE("kernel evaluation matches the family formulas") {
    const auto c = KernelSpec::constant(2.5);
    CHECK(vc::eval_kernel(c, 0.0, 0.0) == 2.5);
    CHECK(vc::eval_kernel(c, 0.3, 1.7) == 2.5);

    const auto e = KernelSpec::exp_convolution(1.0, 1.0);
    CHECK(vc::eval_kernel(e, 0.0, 1.0) == doctest::Approx(0.36787944117144233).epsilon(1e-15));
    // convolution identity: only the lag matters (dyadic endpoints keep t-s exact)
    CHECK(vc::eval_kernel(e, 0.25, 1.25) == vc::eval_kernel(e, 0.0, 1.0));
    CHECK(vc::eval_kernel(e, 1.25, 3.75) == vc::eval_kernel(e, 0.0, 2.5));

    const auto f = KernelSpec::fractional(0.25);
    CHECK(vc::eval_kernel(f, 0.0, 16.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(vc::eval_kernel(f, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.singular());
    CHECK(!e.singular());

    const auto tab = cosine_table_kernel();
    CHECK(vc::eval_kernel(tab, 0.0, 0.0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(vc::eval_kernel(tab, 0.5, 1.5) == doctest::Approx(2.0 + std::cos(1.0)).epsilon(1e-10));

    CHECK_THROWS_AS(vc::eval_kernel(f, 1.0, 1.0), vc::SingularAtDiagonal);
    CHECK_THROWS_AS(vc::eval_kernel(c, -0.1, 1.0), vc::OutOfDomain);
    CHECK_THROWS_AS(vc::eval_kernel(c, 1.0, 0.5), vc::OutOfDomain);
    CHECK_THROWS_AS(vc::eval_kernel(tab, 0.0, 2.5), vc::OutOfDomain);

    CHECK_THROWS_AS(KernelSpec::fractional(0.5), vc::ConfigError);
    CHECK_THROWS_AS(KernelSpec::fractional(0.0), vc::ConfigError);
    CHECK_THROWS_AS(KernelSpec::exp_convolution(1.0, -1.0), vc::ConfigError);
}

TEST_CASE("drift weights integrate the kernel over each subinterval") {
    // closed form 0.01^{0.75} / 0.75, cross-checked by adaptive quadrature
    const auto f = KernelSpec::fractional(0.25);
    const auto w1 = vc::drift_weights(f, TimeGrid(0.01, 1), 1);
    REQUIRE(w1.size() == 1);
    CHECK(w1[0] == doctest::Approx(0.0421637021355784).epsilon(1e-12));

    const auto c = KernelSpec::constant(1.0);
    for (double w : vc::drift_weights(c, TimeGrid(1.0, 10), 5))
        CHECK(w == doctest::Approx(0.1).epsilon(1e-15));

    // rate 0 degenerates to the constant kernel
    const auto e0 = vc::drift_weights(KernelSpec::exp_convolution(1.0, 0.0), TimeGrid(1.0, 10), 7);
    for (double w : e0) CHECK(w == doctest::Approx(0.1).epsilon(1e-15));

    // telescoping: fractional weights sum to the full integral exactly
    const auto f3 = KernelSpec::fractional(0.3);
    const TimeGrid g(2.0, 64);
    for (int k : {1, 7, 64}) {
        const auto w = vc::drift_weights(f3, g, k);
        double s = 0.0;
        for (double x : w) s += x;
        const double tk = g.node(k);
        CHECK(s == doctest::Approx(std::pow(tk, 0.7) / 0.7).epsilon(1e-12));
    }

    // smooth kernels: sum of weights equals the running integral
    const auto e = KernelSpec::exp_convolution(1.7, 1.3);
    for (int k : {1, 5, 64}) {
        const auto w = vc::drift_weights(e, g, k);
        double s = 0.0;
        for (double x : w) s += x;
        const double tk = g.node(k);
        CHECK(s == doctest::Approx(1.7 * (1.0 - std::exp(-1.3 * tk)) / 1.3).epsilon(1e-10));
    }

    const auto tab = cosine_table_kernel();
    const TimeGrid gt(2.0, 16);
    const auto wt = vc::drift_weights(tab, gt, 16);
    double st = 0.0;
    for (double x : wt) st += x;
    CHECK(st == doctest::Approx(2.0 * 2.0 + std::sin(2.0)).epsilon(1e-10));

    CHECK_THROWS_AS(vc::drift_weights(c, g, 65), vc::OutOfDomain);
    CHECK_THROWS_AS(vc::drift_weights(c, g, -1), vc::OutOfDomain);
}

TEST_CASE("diffusion weights carry the subinterval variance") {
    const TimeGrid unit(1.0, 1);
    const auto c = KernelSpec::constant(1.0);
    for (auto mode : {DiffusionWeightMode::LeftPoint, DiffusionWeightMode::VarianceMatched})
        CHECK(vc::diffusion_weights(c, TimeGrid(1.0, 4), 3, mode) ==
              std::vector<double>{1.0, 1.0, 1.0});

    // variance matching squares the kernel, so the sign drops
    const auto cneg = KernelSpec::constant(-2.0);
    CHECK(vc::diffusion_weights(cneg, unit, 1, DiffusionWeightMode::LeftPoint)[0] == -2.0);
    CHECK(vc::diffusion_weights(cneg, unit, 1, DiffusionWeightMode::VarianceMatched)[0] == 2.0);

    const auto f = KernelSpec::fractional(0.25);
    const auto vm = vc::diffusion_weights(f, unit, 1, DiffusionWeightMode::VarianceMatched);
    CHECK(vm[0] == doctest::Approx(1.4142135623730951).epsilon(1e-12));

    const auto lp = vc::diffusion_weights(f, TimeGrid(2.0, 2), 2, DiffusionWeightMode::LeftPoint);
    CHECK(lp[0] == doctest::Approx(0.8408964152537145).epsilon(1e-12));
    CHECK(lp[1] == doctest::Approx(1.0).epsilon(1e-15));

    // second-moment identity: sum w^2 dt = int_0^{t_k} K(s, t_k)^2 ds
    auto second_moment = [](const std::vector<double>& w, double dt) {
        double s = 0.0;
        for (double x : w) s += x * x * dt;
        return s;
    };
    const auto f2 = KernelSpec::fractional(0.2);
    const TimeGrid g32(1.0, 32);
    for (int k : {1, 9, 32}) {
        const auto w = vc::diffusion_weights(f2, g32, k, DiffusionWeightMode::VarianceMatched);
        const double tk = g32.node(k);
        CHECK(second_moment(w, g32.dt()) ==
              doctest::Approx(std::pow(tk, 0.6) / 0.6).epsilon(1e-10));
    }
    const auto e = KernelSpec::exp_convolution(1.3, 2.0);
    const TimeGrid g48(1.5, 48);
    for (int k : {1, 16, 48}) {
        const auto w = vc::diffusion_weights(e, g48, k, DiffusionWeightMode::VarianceMatched);
        const double tk = g48.node(k);
        CHECK(second_moment(w, g48.dt()) ==
              doctest::Approx(1.69 * (1.0 - std::exp(-4.0 * tk)) / 4.0).epsilon(1e-10));
    }
    const auto tab = cosine_table_kernel();
    const TimeGrid gt(2.0, 16);
    const auto wtab = vc::diffusion_weights(tab, gt, 16, DiffusionWeightMode::VarianceMatched);
    // int_0^t (2 + cos u)^2 du = 4.5 t + 4 sin t + sin(2t)/4
    CHECK(second_moment(wtab, gt.dt()) ==
          doctest::Approx(4.5 * 2.0 + 4.0 * std::sin(2.0) + 0.25 * std::sin(4.0)).epsilon(1e-8));

    // the squared kernel stops being integrable at alpha = 1/2; the guard
    // must hold even if a spec bypasses the factory range check
    KernelSpec bad;
    bad.family = vc::KernelFamily::Fractional;
    bad.alpha = 0.5;
    CHECK_THROWS_AS(vc::diffusion_weights(bad, unit, 1, DiffusionWeightMode::VarianceMatched),
                    vc::VarianceMatchedUndefined);
}

TEST_CASE("weight tables pack the per-node rows consecutively") {
    const auto f = KernelSpec::fractional(0.25);
    const TimeGrid g(1.0, 8);
    const auto tab = vc::build_drift_table(f, g);
    CHECK(tab.n == 8);
    CHECK(tab.w.size() == 36);
    for (int k = 1; k <= 8; ++k) {
        const auto row = vc::drift_weights(f, g, k);
        for (int j = 0; j < k; ++j) CHECK(tab.row(k)[j] == row[static_cast<std::size_t>(j)]);
    }
    const auto dtab = vc::build_diffusion_table(f, g, DiffusionWeightMode::VarianceMatched);
    for (int k = 1; k <= 8; ++k) {
        const auto row = vc::diffusion_weights(f, g, k, DiffusionWeightMode::VarianceMatched);
        for (int j = 0; j < k; ++j) CHECK(dtab.row(k)[j] == row[static_cast<std::size_t>(j)]);
    }
}

TEST_CASE("singular admissibility check separates exponent regimes") {
    const auto c = KernelSpec::constant(1.0);

    // For a constant kernel the increment integrals are |t'-t| exactly, so
    // the ratio on the second line is g^{1 - gamma(2+eps)}: bounded iff
    // gamma <= 1/(2+eps). gamma = 1/3 at eps = 1 sits on the boundary.
    const auto ok = vc::verify_assumption_singular(c, 1.0 / 3.0, 1.0, 550, 7);
    CHECK(ok.satisfied);
    CHECK(ok.estimated_L >= 0.99);
    CHECK(ok.estimated_L <= 2.0);
    CHECK(ok.samples_checked == 550);
    CHECK(ok.worst_pair.first >= 0.0);
    CHECK(ok.worst_pair.second <= 1.0);
    CHECK(ok.worst_pair.first < ok.worst_pair.second);

    // gamma = 1/2 pushes the second-line exponent to 3/2 > 1: the ratio
    // grows like g^{-1/2} as the gap shrinks
    const auto bad = vc::verify_assumption_singular(c, 0.5, 1.0, 550, 7);
    CHECK(!bad.satisfied);
    CHECK(bad.growth_slope_sigma == doctest::Approx(-0.5).epsilon(0.1));

    // the smallest covering constant grows with the claimed exponent
    const double l1 = vc::verify_assumption_singular(c, 0.20, 1.0, 550, 7).estimated_L;
    const double l2 = vc::verify_assumption_singular(c, 0.25, 1.0, 550, 7).estimated_L;
    const double l3 = vc::verify_assumption_singular(c, 1.0 / 3.0, 1.0, 550, 7).estimated_L;
    CHECK(l1 <= l2 + 1e-12);
    CHECK(l2 <= l3 + 1e-12);

    // fractional kernel: admissible iff gamma <= 1/(2+eps) - alpha
    const auto f = KernelSpec::fractional(0.25);
    CHECK(vc::verify_assumption_singular(f, 0.25, 0.02, 330, 11).satisfied);
    CHECK(vc::verify_assumption_singular(f, 0.12, 0.5, 330, 11).satisfied);
    const auto fbad = vc::verify_assumption_singular(f, 0.49, 1.0, 330, 11);
    CHECK(!fbad.satisfied);

    // reports are deterministic in the seed
    const auto r1 = vc::verify_assumption_singular(f, 0.12, 0.5, 200, 13);
    const auto r2 = vc::verify_assumption_singular(f, 0.12, 0.5, 200, 13);
    CHECK(r1.estimated_L == r2.estimated_L);
    CHECK(r1.worst_pair == r2.worst_pair);

    CHECK_THROWS_AS(vc::verify_assumption_singular(c, 0.0, 1.0, 10, 1), vc::ConfigError);
    CHECK_THROWS_AS(vc::verify_assumption_singular(c, 0.6, 1.0, 10, 1), vc::ConfigError);
    CHECK_THROWS_AS(vc::verify_assumption_singular(c, 0.3, 0.0, 10, 1), vc::NonPositiveEpsilon);
    CHECK_THROWS_AS(vc::verify_assumption_singular(c, 0.3, 1.0, 0, 1), vc::ConfigError);
    CHECK_THROWS_AS(vc::verify_assumption_singular(cosine_table_kernel(), 0.3, 1.0, 10, 1, 3.0),
                    vc::OutOfDomain);
}

TEST_CASE("smooth admissibility check measures the diagonal and derivative bounds") {
    const auto e = vc::verify_assumption_smooth(KernelSpec::exp_convolution(1.0, 1.0));
    CHECK(e.satisfied);
    CHECK(e.c1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.assumption_id == vc::AssumptionId::Convolutional);

    const auto z = vc::verify_assumption_smooth(KernelSpec::constant(0.0));
    CHECK(!z.satisfied);
    CHECK(z.c1 == 0.0);

    const auto e2 = vc::verify_assumption_smooth(KernelSpec::exp_convolution(2.0, 3.0));
    CHECK(e2.satisfied);
    CHECK(e2.c1 == doctest::Approx(2.0).epsilon(1e-12));
    // scale * rate bounds the time derivative and the mixed-partial integral
    CHECK(e2.c2 == doctest::Approx(6.0).epsilon(0.1));

    // diagonal of a convolution kernel is the profile at lag 0: 2 + cos(0) = 3
    const auto tab = vc::verify_assumption_smooth(cosine_table_kernel(), 2.0);
    CHECK(tab.satisfied);
    CHECK(tab.c1 == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(tab.assumption_id == vc::AssumptionId::Convolutional);

    CHECK_THROWS_AS(vc::verify_assumption_smooth(KernelSpec::fractional(0.25)),
                    vc::SingularKernelRejected);
}
