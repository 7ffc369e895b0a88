#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"

namespace minphase {

// Uniform samples t_k = k*dt, k = 0..n-1.
struct TimeGrid {
    double dt = 1.0 / 256.0;
    std::size_t n = 10241;

    static TimeGrid make(double dt, double t_max) {
        if (!(dt > 0.0) || !(t_max > 0.0) || !std::isfinite(dt) || !std::isfinite(t_max))
            throw domain_error("time grid needs dt > 0 and t_max > 0");
        const double steps = t_max / dt;
        const double rounded = std::round(steps);
        if (std::abs(steps - rounded) > 1e-6 * std::max(1.0, steps))
            throw quantization_error("t_max is not a multiple of dt");
        return {dt, static_cast<std::size_t>(rounded) + 1};
    }

    double t(std::size_t k) const noexcept { return static_cast<double>(k) * dt; }
    double t_max() const noexcept { return t(n - 1); }

    bool operator==(const TimeGrid& o) const noexcept {
        return n == o.n && std::abs(dt - o.dt) <= 1e-12 * dt;
    }
};

class CausalSignal {
public:
    CausalSignal() = default;
    CausalSignal(TimeGrid grid, std::vector<cplx> values) : grid_(grid), v_(std::move(values)) {
        if (v_.size() != grid_.n) throw incompatible_grid("sample count does not match grid");
    }

    static CausalSignal sample(TimeGrid grid, const std::function<cplx(double)>& f) {
        std::vector<cplx> v(grid.n);
        for (std::size_t k = 0; k < grid.n; ++k) v[k] = f(grid.t(k));
        return {grid, std::move(v)};
    }

    const TimeGrid& grid() const noexcept { return grid_; }
    std::span<const cplx> values() const noexcept { return v_; }
    std::size_t size() const noexcept { return v_.size(); }
    const cplx& operator[](std::size_t k) const { return v_[k]; }

    CausalSignal operator+(const CausalSignal& o) const { return combine(o, 1.0); }
    CausalSignal operator-(const CausalSignal& o) const { return combine(o, -1.0); }
    CausalSignal operator*(cplx c) const {
        std::vector<cplx> v(v_);
        for (auto& x : v) x *= c;
        return {grid_, std::move(v)};
    }

private:
    CausalSignal combine(const CausalSignal& o, double sign) const {
        if (!(grid_ == o.grid_)) throw incompatible_grid("signals live on different grids");
        std::vector<cplx> v(v_);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] += sign * o.v_[k];
        return {grid_, std::move(v)};
    }

    TimeGrid grid_{};
    std::vector<cplx> v_;
};

// The two probe pairs. rho_n are the inverse images of 1 and z, sigma_n of w and 1 (up to scale).
inline CausalSignal rho0(TimeGrid g) {
    return CausalSignal::sample(g, [](double t) { return std::sqrt(2.0) * std::exp(-t); });
}
inline CausalSignal rho1(TimeGrid g) {
    return CausalSignal::sample(g, [](double t) { return std::sqrt(2.0) * std::exp(-t) * (2.0 * t - 1.0); });
}
inline CausalSignal sigma0(TimeGrid g) {
    return CausalSignal::sample(g, [](double t) { return std::exp(-t) * (1.0 - t); });
}
inline CausalSignal sigma1(TimeGrid g) {
    return CausalSignal::sample(g, [](double t) { return t * std::exp(-t); });
}

// <f, g> = int f conj(g) dt.
inline cplx inner_product(const CausalSignal& f, const CausalSignal& g) {
    if (!(f.grid() == g.grid())) throw incompatible_grid("inner product across different grids");
    std::vector<cplx> prod(f.size());
    for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = f[k] * std::conj(g[k]);
    return quad::integrate<cplx>(prod, f.grid().dt);
}

inline double norm(const CausalSignal& f) { return std::sqrt(std::max(0.0, inner_product(f, f).real())); }

// int_0^T |f|^2 dt.
inline double partial_energy(const CausalSignal& f, double T) {
    if (!(T >= 0.0) || T > f.grid().t_max() * (1.0 + 1e-12))
        throw domain_error("partial_energy: T outside [0, t_max]");
    std::vector<double> e(f.size());
    for (std::size_t k = 0; k < e.size(); ++k) e[k] = std::norm(f[k]);
    return quad::integrate_to(e, f.grid().dt, std::min(T, f.grid().t_max()));
}

// (T_tau f)(t) = f(t - tau), zero before tau; samples pushed past t_max are dropped.
inline CausalSignal translate(const CausalSignal& f, double tau) {
    if (!(tau >= 0.0)) throw domain_error("translate: tau must be nonnegative");
    const double dt = f.grid().dt;
    const double steps = tau / dt;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps))
        throw quantization_error("translate: tau is not a multiple of dt");
    const std::size_t s = static_cast<std::size_t>(rounded);
    std::vector<cplx> v(f.size(), cplx{});
    for (std::size_t k = s; k < v.size(); ++k) v[k] = f[k - s];
    return {f.grid(), std::move(v)};
}

}  // namespace minphase
