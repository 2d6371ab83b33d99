#pragma once

#include <cmath>

#include "vc/grid.hpp"
#include "vc/kernels.hpp"

namespace vc::detail {

// One term of the Volterra recursion: either direct resummation against a
// packed weight table or, for exponential kernels, the running recursion
// sum_{j<k} A e^{-rate (t_k - t_{j+1})} V_j maintained as
// S <- e^{-rate dt} S + V_j per step, contributing A * S at node k.
struct HistorySum {
    bool exp_path = false;
    const WeightTable* table = nullptr;
    double decay = 1.0;
    double prefactor = 0.0;

    static HistorySum drift(const KernelSpec& k, const TimeGrid& grid, bool want_fast,
                            const WeightTable* tab) {
        HistorySum h;
        if (want_fast && k.family == KernelFamily::ExpConvolution) {
            h.exp_path = true;
            h.decay = std::exp(-k.rate * grid.dt());
            h.prefactor =
                k.rate < 1e-14 ? k.scale * grid.dt() : k.scale * (1.0 - h.decay) / k.rate;
        } else {
            h.table = tab;
        }
        return h;
    }

    static HistorySum diffusion(const KernelSpec& k, const TimeGrid& grid,
                                DiffusionWeightMode mode, bool want_fast,
                                const WeightTable* tab) {
        HistorySum h;
        if (want_fast && k.family == KernelFamily::ExpConvolution) {
            h.exp_path = true;
            h.decay = std::exp(-k.rate * grid.dt());
            if (mode == DiffusionWeightMode::LeftPoint) {
                h.prefactor = k.scale * h.decay;
            } else if (k.rate < 1e-14) {
                h.prefactor = std::abs(k.scale);
            } else {
                const double e2 = std::exp(-2.0 * k.rate * grid.dt());
                h.prefactor =
                    std::sqrt(k.scale * k.scale * (1.0 - e2) / (2.0 * k.rate * grid.dt()));
            }
        } else {
            h.table = tab;
        }
        return h;
    }
};

}  // namespace vc::detail
