#pragma once

// Inner-outer factorization of boundary samples on a uniform circle grid.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "signal.hpp"
#include "transforms.hpp"

namespace minphase {

struct OuterFactor {
    BoundaryFunction values;
    std::vector<cplx> log_coeffs;  // outer(z) = exp(sum h_n z^n)
    std::size_t floored = 0;       // nodes whose modulus was lifted to the floor

    cplx at(cplx z) const {
        cplx acc = 0.0;
        for (std::size_t n = log_coeffs.size(); n-- > 0;) acc = acc * z + log_coeffs[n];
        return std::exp(acc);
    }
    double center() const { return std::exp(log_coeffs.empty() ? 0.0 : log_coeffs[0].real()); }
};

struct FactorOptions {
    double floor_rel = 1e-12;         // log|G| floor relative to max|G|
    double max_floored_fraction = 0.01;
};

namespace detail {

inline void require_full_circle(const BoundaryFunction& G) {
    if (!G.grid.full_circle()) throw incompatible_grid("factorization needs a uniform full-circle grid");
}

inline double mean_log_modulus(const BoundaryFunction& G, double floor_abs) {
    double s = 0.0;
    for (const auto& v : G.values) s += std::log(std::max(std::abs(v), floor_abs));
    return s / static_cast<double>(G.size());
}

}  // namespace detail

// Outer function with |outer| = |G| on the grid and outer(0) > 0, from the cepstrum of log|G|.
inline OuterFactor outer_factor(const BoundaryFunction& G, const FactorOptions& opt = {}) {
    detail::require_full_circle(G);
    const std::size_t N = G.size();
    double gmax = 0.0;
    for (const auto& v : G.values) gmax = std::max(gmax, std::abs(v));
    if (!(gmax > 0.0) || !std::isfinite(gmax)) throw not_factorizable("boundary function vanishes identically");
    const double floor_abs = opt.floor_rel * gmax;

    std::vector<cplx> lg(N);
    std::size_t floored = 0;
    for (std::size_t j = 0; j < N; ++j) {
        const double a = std::abs(G.values[j]);
        if (a <= floor_abs) ++floored;
        lg[j] = std::log(std::max(a, floor_abs));
    }
    if (static_cast<double>(floored) > opt.max_floored_fraction * static_cast<double>(N))
        throw not_factorizable("boundary function vanishes on too many nodes");

    const double off = G.grid.circle_offset();
    auto c = fft(lg, -1);
    std::vector<cplx> h(N, cplx{});
    for (std::size_t n = 0; n <= N / 2; ++n) {
        const cplx cn = c[n] / static_cast<double>(N) *
                        std::polar(1.0, -2.0 * pi * static_cast<double>(n) * off / static_cast<double>(N));
        h[n] = (n == 0 || n == N / 2) ? cn : 2.0 * cn;
    }
    h[0] = h[0].real();
    std::vector<cplx> hs(N);
    for (std::size_t n = 0; n < N; ++n)
        hs[n] = h[n] * std::polar(1.0, 2.0 * pi * static_cast<double>(n) * off / static_cast<double>(N));
    const auto e = fft(hs, +1);
    std::vector<cplx> out(N);
    for (std::size_t j = 0; j < N; ++j) out[j] = std::exp(e[j]);
    h.resize(N / 2 + 1);
    return {BoundaryFunction(G.grid, std::move(out)), std::move(h), floored};
}

struct DelayEstimate {
    double tau = 0.0;     // clipped at 0
    double raw = 0.0;     // before clipping
    bool clipped = false;
};

namespace detail {

// Slope of the unwrapped phase of r(theta) against tan(theta/2), widening the fitted
// window while consecutive nodes stay resolved.
inline double phase_slope(std::span<const cplx> inner, std::span<const double> theta) {
    const std::size_t N = inner.size();
    std::vector<double> T(N);
    std::vector<std::size_t> order(N);
    for (std::size_t j = 0; j < N; ++j) {
        double th = std::remainder(theta[j], 2.0 * pi);
        T[j] = std::tan(0.5 * th);
        order[j] = j;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return T[a] < T[b]; });

    double tau = 0.0;
    for (double lim : {1.0, 4.0, 16.0, 64.0, 256.0, 1e300}) {
        std::vector<double> x, ph;
        for (std::size_t idx : order) {
            if (std::abs(T[idx]) > lim) continue;
            x.push_back(T[idx]);
            ph.push_back(std::arg(inner[idx] * std::polar(1.0, -tau * T[idx])));
        }
        if (x.size() < 4) continue;
        for (std::size_t i = 1; i < ph.size(); ++i) {
            double d = ph[i] - ph[i - 1];
            d -= 2.0 * pi * std::round(d / (2.0 * pi));
            ph[i] = ph[i - 1] + d;
        }
        const double n = static_cast<double>(x.size());
        const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
        const double mp = std::accumulate(ph.begin(), ph.end(), 0.0) / n;
        double sxx = 0.0, sxp = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxx += (x[i] - mx) * (x[i] - mx);
            sxp += (x[i] - mx) * (ph[i] - mp);
        }
        if (sxx <= 0.0) continue;
        const double slope = sxp / sxx;
        double worst = 0.0;
        for (std::size_t i = 1; i < x.size(); ++i) worst = std::max(worst, std::abs(slope * (x[i] - x[i - 1])));
        if (worst > 1.0) break;
        // inner = lambda exp(-tau (1-z)/(1+z)) = lambda exp(i tau tan(theta/2)) on the circle
        tau += slope;
    }
    return tau;
}

}  // namespace detail

// Mass of the singular inner factor at z = -1: mean log|G| - log|G(0)|.
//
// With the center value supplied this is the mean-log identity itself. Without it, G(0)
// is recovered by deflating the delay first: the phase of the inner part gives tau, and
// G / S_tau has no singular part left, so its grid mean is an accurate value at 0.
inline DelayEstimate delay_of(const BoundaryFunction& G, std::optional<cplx> center = {}, const FactorOptions& opt = {}) {
    detail::require_full_circle(G);
    double gmax = 0.0;
    for (const auto& v : G.values) gmax = std::max(gmax, std::abs(v));
    if (!(gmax > 0.0)) throw not_factorizable("boundary function vanishes identically");
    const double mean_log = detail::mean_log_modulus(G, opt.floor_rel * gmax);

    double c0;
    if (center) {
        c0 = std::abs(*center);
    } else {
        const auto outer = outer_factor(G, opt);
        std::vector<cplx> inner(G.size());
        for (std::size_t j = 0; j < G.size(); ++j) inner[j] = G.values[j] / outer.values.values[j];
        const double t = detail::phase_slope(inner, G.grid.nodes());
        cplx m = 0.0;
        for (std::size_t j = 0; j < G.size(); ++j) {
            const cplx z = G.grid.point(j);
            m += G.values[j] / std::exp(-t * cayley(z));
        }
        m /= static_cast<double>(G.size());
        c0 = std::exp(-t) * std::abs(m);
    }
    if (!(c0 > 1e-12 * gmax)) throw not_factorizable("function vanishes at the origin");
    DelayEstimate d;
    d.raw = mean_log - std::log(c0);
    d.tau = std::max(0.0, d.raw);
    d.clipped = d.raw < 0.0;
    return d;
}

struct FactorizationResult {
    OuterFactor outer;
    BoundaryFunction inner;
    double tau = 0.0;
    double residual = 0.0;                 // sup |G - inner * outer|
    double inner_modulus_deviation = 0.0;  // sup ||inner| - 1|
};

inline FactorizationResult factorize(const BoundaryFunction& G, std::optional<cplx> center = {}, const FactorOptions& opt = {}) {
    FactorizationResult r;
    r.outer = outer_factor(G, opt);
    std::vector<cplx> inner(G.size());
    for (std::size_t j = 0; j < G.size(); ++j) {
        inner[j] = G.values[j] / r.outer.values.values[j];
        r.residual = std::max(r.residual, std::abs(G.values[j] - inner[j] * r.outer.values.values[j]));
        r.inner_modulus_deviation = std::max(r.inner_modulus_deviation, std::abs(std::abs(inner[j]) - 1.0));
    }
    r.inner = BoundaryFunction(G.grid, std::move(inner));
    r.tau = delay_of(G, center, opt).tau;
    return r;
}

// Power-series coefficients of the outer function whose modulus on the grid is |mag|.
inline FourierCoefficients min_phase_from_magnitude(const BoundaryFunction& mag, std::size_t M, const FactorOptions& opt = {}) {
    for (const auto& v : mag.values)
        if (!std::isfinite(v.real()) || v.real() < 0.0 || v.imag() != 0.0)
            throw domain_error("magnitude samples must be real and nonnegative");
    const auto outer = outer_factor(mag, opt);
    return fourier_coeffs(outer.values, M);
}

enum class PhaseKind { minimum_phase, translated, other };

struct PhaseClass {
    PhaseKind kind = PhaseKind::other;
    double tau = 0.0;
    double deviation = 0.0;  // sup |G - lambda S_tau outer| / sup |G| on the grid
};

struct ClassifyOptions {
    std::size_t n_circle = 4096;
    double tol = 1e-3;
};

inline const char* to_string(PhaseKind k) {
    switch (k) {
        case PhaseKind::minimum_phase: return "minimum_phase";
        case PhaseKind::translated: return "translated_minimum_phase";
        default: return "other";
    }
}

// Minimum phase, a pure translate of a minimum-phase signal, or neither.
inline PhaseClass classify(const CausalSignal& f, const ClassifyOptions& opt = {}) {
    if (!(norm(f) > 0.0)) throw domain_error("classify: zero signal");
    const auto grid = FrequencyGrid::circle(opt.n_circle);
    const auto G = h_transform(f, grid);
    const cplx zero = 0.0;
    const cplx c = h_transform_at(f, std::span<const cplx>(&zero, 1))[0];
    PhaseClass pc;
    FactorizationResult fr;
    try {
        fr = factorize(G, c);
    } catch (const not_factorizable&) {
        pc.deviation = std::numeric_limits<double>::infinity();
        return pc;
    }
    // Boundary zeros bias the discrete mean-log delay by O(1/N), which is visible near
    // z = -1 where S_tau oscillates fastest. The onset of the samples and zero delay are
    // tried as well and the candidate that explains G best wins.
    const cplx lambda = c / std::abs(c);
    double gmax = 0.0;
    for (const auto& v : G.values) gmax = std::max(gmax, std::abs(v));
    const auto sup = quad::find_support(f.values());
    const double candidates[] = {0.0, f.grid().t(sup.begin), fr.tau};  // earlier ones win near-ties
    pc.deviation = std::numeric_limits<double>::infinity();
    for (double tau : candidates) {
        // Measured in units of G rather than of the inner factor: near a boundary zero the
        // inner factor is a ratio of two tiny numbers and says nothing.
        double dev = 0.0;
        for (std::size_t j = 0; j < G.size(); ++j) {
            const cplx s = lambda * std::exp(-tau * cayley(grid.point(j)));
            dev = std::max(dev, std::abs(G.values[j] - s * fr.outer.values.values[j]) / gmax);
        }
        if (dev < 0.9 * pc.deviation) {
            pc.deviation = dev;
            pc.tau = tau;
        }
    }
    if (pc.deviation > opt.tol) {
        pc.kind = PhaseKind::other;
    } else if (pc.tau < 0.5 * f.grid().dt) {
        pc.kind = PhaseKind::minimum_phase;
        pc.tau = 0.0;
    } else {
        pc.kind = PhaseKind::translated;
    }
    return pc;
}

}  // namespace minphase
