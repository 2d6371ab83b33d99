#pragma once

#include "vc/errors.hpp"

namespace vc {

// Uniform time grid t_k = k * dt on [0, T], dt = T / n_steps.
struct TimeGrid {
    double T = 1.0;
    int n_steps = 1;

    TimeGrid() = default;
    TimeGrid(double horizon, int steps) : T(horizon), n_steps(steps) {
        if (!(horizon > 0.0)) throw ConfigError("TimeGrid: T must be positive");
        if (steps < 1) throw ConfigError("TimeGrid: n_steps must be >= 1");
    }

    double dt() const { return T / n_steps; }
    double node(int k) const { return k * dt(); }
    int n_nodes() const { return n_steps + 1; }

    bool operator==(const TimeGrid&) const = default;
};

}  // namespace vc
