#pragma once

#include <cstddef>

#include "signal.hpp"
#include "transforms.hpp"

namespace minphase {

struct GridConfig {
    double dt = 1.0 / 256.0;
    double t_max = 40.0;
    double y_max = 512.0;
    std::size_t n_freq = 65536;
    std::size_t n_circle = 4096;

    TimeGrid time() const { return TimeGrid::make(dt, t_max); }
    FrequencyGrid axis() const { return FrequencyGrid::axis(y_max, n_freq); }
    FrequencyGrid circle() const { return FrequencyGrid::circle(n_circle); }
};

struct Tolerances {
    double selfmap = 1e-3;          // allowed excess of |phi| over 1 (disk metric)
    double division_floor = 1e-10;  // relative floor on identification denominators
    double ill_fraction = 0.01;     // fraction of floored nodes that makes identification fail
    double plain_delay = 1e-3;      // largest delay accepted in plain mode
    double classify = 1e-3;
    double factor_residual = 1e-6;
    double series_radius = 0.6;     // interior points with |z| below this use the Laguerre series
};

struct RunConfig {
    GridConfig grid;
    Tolerances tol;
};

}  // namespace minphase
