#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"
#include "signal.hpp"

namespace minphase {

inline constexpr int max_laguerre_degree = 512;

// L_n(x) at every x, by the three-term recurrence.
inline std::vector<double> laguerre_poly(int n, std::span<const double> x) {
    if (n < 0 || n > max_laguerre_degree) throw domain_error("laguerre_poly: degree outside [0, 512]");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double l0 = 1.0, l1 = 1.0 - x[i];
        if (n == 0) {
            out[i] = l0;
            continue;
        }
        for (int k = 1; k < n; ++k) {
            const double l2 = ((2.0 * k + 1.0 - x[i]) * l1 - k * l0) / (k + 1.0);
            l0 = l1;
            l1 = l2;
        }
        out[i] = l1;
    }
    return out;
}

// (-1)^n sqrt(2) e^{-t} L_n(2t): the time-domain image of z^n.
inline CausalSignal basis_function(int n, TimeGrid g) {
    std::vector<double> x(g.n);
    for (std::size_t k = 0; k < g.n; ++k) x[k] = 2.0 * g.t(k);
    const auto L = laguerre_poly(n, x);
    const double sign = n % 2 ? -1.0 : 1.0;
    std::vector<cplx> v(g.n);
    for (std::size_t k = 0; k < g.n; ++k) v[k] = sign * std::sqrt(2.0) * std::exp(-g.t(k)) * L[k];
    return {g, std::move(v)};
}

using LaguerreExpansion = std::vector<cplx>;

// a_n = <f, basis_n>, n < M. All basis functions come out of one sweep of the recurrence.
inline LaguerreExpansion d_map(const CausalSignal& f, std::size_t M) {
    if (M == 0 || M > static_cast<std::size_t>(max_laguerre_degree))
        throw domain_error("d_map: M must be in [1, 512]");
    const TimeGrid g = f.grid();
    std::vector<double> l0(g.n, 1.0), l1(g.n), env(g.n);
    for (std::size_t k = 0; k < g.n; ++k) {
        l1[k] = 1.0 - 2.0 * g.t(k);
        env[k] = std::sqrt(2.0) * std::exp(-g.t(k));
    }
    LaguerreExpansion a(M);
    std::vector<cplx> prod(g.n);
    for (std::size_t n = 0; n < M; ++n) {
        const std::vector<double>& L = n == 0 ? l0 : l1;
        const double sign = n % 2 ? -1.0 : 1.0;
        for (std::size_t k = 0; k < g.n; ++k) prod[k] = f[k] * (sign * env[k] * L[k]);
        a[n] = quad::integrate<cplx>(prod, g.dt);
        if (n >= 1) {
            const double nn = static_cast<double>(n);
            for (std::size_t k = 0; k < g.n; ++k) {
                const double x = 2.0 * g.t(k);
                const double l2 = ((2.0 * nn + 1.0 - x) * l1[k] - nn * l0[k]) / (nn + 1.0);
                l0[k] = l1[k];
                l1[k] = l2;
            }
        }
    }
    return a;
}

// sum_n a_n basis_n on the grid.
inline CausalSignal laguerre_synthesis(std::span<const cplx> a, TimeGrid g) {
    if (a.size() > static_cast<std::size_t>(max_laguerre_degree) + 1)
        throw domain_error("laguerre_synthesis: too many coefficients");
    std::vector<cplx> v(g.n, cplx{});
    for (std::size_t k = 0; k < g.n; ++k) {
        const double t = g.t(k), x = 2.0 * t;
        double l0 = 1.0, l1 = 1.0 - x;
        cplx acc = 0.0;
        for (std::size_t n = 0; n < a.size(); ++n) {
            const double L = n == 0 ? l0 : l1;
            acc += (n % 2 ? -1.0 : 1.0) * a[n] * L;
            if (n >= 1) {
                const double nn = static_cast<double>(n);
                const double l2 = ((2.0 * nn + 1.0 - x) * l1 - nn * l0) / (nn + 1.0);
                l0 = l1;
                l1 = l2;
            }
        }
        v[k] = acc * std::sqrt(2.0) * std::exp(-t);
    }
    return {g, std::move(v)};
}

}  // namespace minphase
