#pragma once

#include <gsl/gsl_sf_expint.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "quadrature.hpp"
#include "signal.hpp"

namespace minphase {

inline constexpr double pi = std::numbers::pi;
inline const double sqrt_pi = std::sqrt(pi);
inline const double sqrt_2pi = std::sqrt(2.0 * pi);

// The Cayley map, its own inverse: disk <-> right half-plane, z = 1 <-> w = 0.
inline cplx cayley(cplx z) { return (1.0 - z) / (1.0 + z); }

enum class Domain { axis, circle };

// Nodes on the imaginary axis (values y, point iy) or on the unit circle (values theta,
// point exp(i theta)). Uniform grids remember their spacing so FFT paths can be used.
class FrequencyGrid {
public:
    FrequencyGrid() = default;

    // y_j = -y_max + j * 2 y_max / (n - 1)
    static FrequencyGrid axis(double y_max, std::size_t n) {
        if (n < 2 || !(y_max > 0.0)) throw domain_error("axis grid needs n >= 2 and y_max > 0");
        FrequencyGrid g;
        g.domain_ = Domain::axis;
        g.uniform_ = true;
        g.start_ = -y_max;
        g.step_ = 2.0 * y_max / static_cast<double>(n - 1);
        g.nodes_.resize(n);
        for (std::size_t j = 0; j < n; ++j) g.nodes_[j] = g.start_ + static_cast<double>(j) * g.step_;
        g.nodes_[n - 1] = y_max;
        return g;
    }

    // theta_j = 2 pi (j + offset) / n; the default half offset keeps z = -1 off the grid.
    static FrequencyGrid circle(std::size_t n, double offset = 0.5) {
        if (n < 2) throw domain_error("circle grid needs n >= 2");
        FrequencyGrid g;
        g.domain_ = Domain::circle;
        g.uniform_ = true;
        g.step_ = 2.0 * pi / static_cast<double>(n);
        g.start_ = offset * g.step_;
        g.nodes_.resize(n);
        for (std::size_t j = 0; j < n; ++j) g.nodes_[j] = g.start_ + static_cast<double>(j) * g.step_;
        return g;
    }

    static FrequencyGrid from_nodes(Domain d, std::vector<double> nodes) {
        FrequencyGrid g;
        g.domain_ = d;
        g.nodes_ = std::move(nodes);
        g.detect_uniform();
        return g;
    }

    Domain domain() const noexcept { return domain_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    double node(std::size_t j) const { return nodes_[j]; }
    bool uniform() const noexcept { return uniform_; }
    double start() const noexcept { return start_; }
    double step() const noexcept { return step_; }

    cplx point(std::size_t j) const {
        return domain_ == Domain::axis ? cplx(0.0, nodes_[j]) : std::polar(1.0, nodes_[j]);
    }
    std::vector<cplx> points() const {
        std::vector<cplx> p(size());
        for (std::size_t j = 0; j < size(); ++j) p[j] = point(j);
        return p;
    }

    // A uniform circle grid covering exactly one turn; required by FFT-based routines.
    bool full_circle() const noexcept {
        return domain_ == Domain::circle && uniform_ &&
               std::abs(step_ * static_cast<double>(size()) - 2.0 * pi) < 1e-9;
    }
    // A uniform axis grid symmetric about 0; required by the inverse transform.
    bool symmetric_axis() const noexcept {
        return domain_ == Domain::axis && uniform_ && size() >= 2 &&
               std::abs(nodes_.front() + nodes_.back()) <= 1e-9 * std::abs(nodes_.back());
    }
    // Offset of the first circle node in units of the spacing.
    double circle_offset() const noexcept { return start_ / step_; }

    bool same_as(const FrequencyGrid& o) const {
        if (domain_ != o.domain_ || size() != o.size()) return false;
        for (std::size_t j = 0; j < size(); ++j)
            if (std::abs(nodes_[j] - o.nodes_[j]) > 1e-9 * std::max(1.0, std::abs(nodes_[j]))) return false;
        return true;
    }

private:
    void detect_uniform() {
        uniform_ = false;
        if (nodes_.size() < 2) return;
        start_ = nodes_.front();
        step_ = (nodes_.back() - nodes_.front()) / static_cast<double>(nodes_.size() - 1);
        if (!(step_ > 0.0)) return;
        for (std::size_t j = 0; j < nodes_.size(); ++j)
            if (std::abs(nodes_[j] - (start_ + static_cast<double>(j) * step_)) > 1e-9 * std::max(1.0, std::abs(nodes_[j])))
                return;
        uniform_ = true;
    }

    Domain domain_ = Domain::axis;
    std::vector<double> nodes_;
    bool uniform_ = false;
    double start_ = 0.0;
    double step_ = 0.0;
};

struct BoundaryFunction {
    FrequencyGrid grid;
    std::vector<cplx> values;

    BoundaryFunction() = default;
    BoundaryFunction(FrequencyGrid g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v)) {
        if (values.size() != grid.size()) throw incompatible_grid("boundary values do not match grid");
    }
    std::size_t size() const noexcept { return values.size(); }
};

// Power-series coefficients c_0, c_1, ...
using FourierCoefficients = std::vector<cplx>;

// (L f)(w) = (2 pi)^{-1/2} int_0^inf f(t) exp(-w t) dt by quadrature.
inline std::vector<cplx> laplace(const CausalSignal& f, std::span<const cplx> ws) {
    auto out = quad::exp_integrals(f.values(), f.grid().dt, ws);
    for (auto& x : out) x /= sqrt_2pi;
    return out;
}

inline cplx laplace(const CausalSignal& f, cplx w) { return laplace(f, std::span<const cplx>(&w, 1))[0]; }

// Boundary values on an axis grid; uniform grids go through one chirp-z transform.
inline BoundaryFunction laplace_axis(const CausalSignal& f, const FrequencyGrid& grid) {
    if (grid.domain() != Domain::axis) throw incompatible_grid("laplace_axis needs an axis grid");
    std::vector<cplx> v;
    if (grid.uniform())
        v = quad::exp_integrals_axis(f.values(), f.grid().dt, grid.start(), grid.step(), grid.size());
    else
        v = quad::exp_integrals(f.values(), f.grid().dt, std::span<const cplx>(grid.points()));
    for (auto& x : v) x /= sqrt_2pi;
    return {grid, std::move(v)};
}

// (H f)(z) = sqrt(2)/(1+z) int f(t) exp(t (z-1)/(z+1)) dt for |z| <= 1, z != -1.
inline std::vector<cplx> h_transform_at(const CausalSignal& f, std::span<const cplx> zs) {
    std::vector<cplx> ws(zs.size());
    for (std::size_t j = 0; j < zs.size(); ++j) {
        if (std::abs(zs[j]) > 1.0 + 1e-12) throw domain_error("h_transform: point outside the closed disk");
        if (std::abs(1.0 + zs[j]) < 1e-14) throw domain_error("h_transform: z = -1 is not allowed");
        ws[j] = cayley(zs[j]);
        if (ws[j].real() < 0.0) ws[j].real(0.0);
    }
    auto out = quad::exp_integrals(f.values(), f.grid().dt, ws);
    for (std::size_t j = 0; j < zs.size(); ++j) out[j] *= std::sqrt(2.0) / (1.0 + zs[j]);
    return out;
}

inline BoundaryFunction h_transform(const CausalSignal& f, const FrequencyGrid& grid) {
    if (grid.domain() != Domain::circle) throw incompatible_grid("h_transform needs a circle grid");
    return {grid, h_transform_at(f, grid.points())};
}

// Phi: F on the axis -> G(z) = 2 sqrt(pi)/(1+z) F(cayley(z)) at z = cayley(iy).
inline BoundaryFunction cayley_to_disk(const BoundaryFunction& F) {
    if (F.grid.domain() != Domain::axis) throw incompatible_grid("cayley_to_disk needs axis samples");
    std::vector<double> theta(F.size());
    std::vector<cplx> g(F.size());
    for (std::size_t j = 0; j < F.size(); ++j) {
        const double y = F.grid.node(j);
        const cplx z = cayley(cplx(0.0, y));
        theta[j] = -2.0 * std::atan(y);
        g[j] = 2.0 * sqrt_pi / (1.0 + z) * F.values[j];
    }
    return {FrequencyGrid::from_nodes(Domain::circle, std::move(theta)), std::move(g)};
}

// Phi^{-1}: G on the circle -> F(w) = G(cayley(w)) / (sqrt(pi)(1+w)) at w = cayley(z) = -i tan(theta/2).
inline BoundaryFunction cayley_to_axis(const BoundaryFunction& G) {
    if (G.grid.domain() != Domain::circle) throw incompatible_grid("cayley_to_axis needs circle samples");
    std::vector<double> y(G.size());
    std::vector<cplx> f(G.size());
    for (std::size_t j = 0; j < G.size(); ++j) {
        const double th = G.grid.node(j);
        if (std::abs(std::cos(0.5 * th)) < 1e-14) throw domain_error("cayley_to_axis: node at z = -1");
        y[j] = -std::tan(0.5 * th);
        f[j] = G.values[j] / (sqrt_pi * cplx(1.0, y[j]));
    }
    return {FrequencyGrid::from_nodes(Domain::axis, std::move(y)), std::move(f)};
}

// c_n = (1/N) sum_j G_j exp(-i n theta_j), n < M, on a uniform full circle.
inline FourierCoefficients fourier_coeffs(const BoundaryFunction& G, std::size_t M) {
    if (!G.grid.full_circle()) throw incompatible_grid("fourier_coeffs needs a uniform full-circle grid");
    const std::size_t N = G.size();
    if (M > N / 2) throw resolution_error("fourier_coeffs: M exceeds N/2");
    const auto c = fft(G.values, -1);
    const double off = G.grid.circle_offset();
    FourierCoefficients out(M);
    for (std::size_t n = 0; n < M; ++n)
        out[n] = c[n] / static_cast<double>(N) * std::polar(1.0, -2.0 * pi * static_cast<double>(n) * off / static_cast<double>(N));
    return out;
}

struct SeriesValues {
    std::vector<cplx> values;
    double tail_bound = 0.0;  // crude bound on the omitted terms at the largest |z|
};

inline SeriesValues z_transform_eval(std::span<const cplx> a, std::span<const cplx> zs) {
    SeriesValues r;
    r.values.resize(zs.size());
    double rmax = 0.0;
    for (std::size_t j = 0; j < zs.size(); ++j) {
        const double rz = std::abs(zs[j]);
        if (!(rz < 1.0)) throw domain_error("z_transform_eval: |z| must be < 1");
        rmax = std::max(rmax, rz);
        cplx acc = 0.0;
        for (std::size_t n = a.size(); n-- > 0;) acc = acc * zs[j] + a[n];
        r.values[j] = acc;
    }
    if (!a.empty()) {
        double amax = 0.0;
        for (std::size_t n = a.size() > 4 ? a.size() - 4 : 0; n < a.size(); ++n) amax = std::max(amax, std::abs(a[n]));
        r.tail_bound = amax * std::pow(rmax, static_cast<double>(a.size())) / (1.0 - rmax);
    }
    return r;
}

namespace detail {

// int_Y^inf cos(y s)/y^2 dy
inline double cos_tail(double Y, double s) {
    if (s == 0.0) return 1.0 / Y;
    return std::cos(Y * s) / Y - s * (0.5 * pi - gsl_sf_Si(Y * s));
}

}  // namespace detail

struct InverseOptions {
    double delay = 0.0;             // the output is known to vanish before this time
    std::size_t tail_nodes = 64;    // nodes used to fit the 1/y^2 tail
    double tail_fit_tol = 1e-3;     // relative residual above which no tail is added
};

// f(t) = (2 pi)^{-1/2} int S(y) cos(y (t - delay)) dy, S(y) = G(iy) + G(-iy), G = exp(iy delay) F.
//
// Using the even part means the truncated integral converges to f rather than to the
// midpoint of its jump at the onset. The truncated tail |y| > Y is restored from a
// least-squares fit S ~ A/y^2 + B/y^4 on the last nodes when that fit is good.
inline CausalSignal inverse_laplace_boundary(const BoundaryFunction& F, TimeGrid out, const InverseOptions& opt = {}) {
    if (!F.grid.symmetric_axis()) throw incompatible_grid("inverse needs a symmetric uniform axis grid");
    if (!(opt.delay >= 0.0)) throw domain_error("inverse: delay must be nonnegative");
    const std::size_t N = F.size();
    const double dy = F.grid.step();
    const double Y = F.grid.nodes().back();

    std::vector<cplx> S(N);
    for (std::size_t j = 0; j < N; ++j) {
        const double y = F.grid.node(j);
        const std::size_t jm = N - 1 - j;
        const double ym = F.grid.node(jm);
        S[j] = F.values[j] * std::polar(1.0, y * opt.delay) + F.values[jm] * std::polar(1.0, ym * opt.delay);
    }

    // first output node at or after the delay; a node a hair before it counts as on it
    std::size_t k0 = static_cast<std::size_t>(std::max(0.0, std::ceil(opt.delay / out.dt - 1e-2)));
    std::vector<cplx> result(out.n, cplx{});
    if (k0 >= out.n) return {out, std::move(result)};
    const double s0 = out.t(k0) - opt.delay;
    const std::size_t count = out.n - k0;

    std::vector<cplx> c(N);
    for (std::size_t j = 0; j < N; ++j) {
        const double wgt = (j == 0 || j == N - 1) ? 0.5 * dy : dy;
        c[j] = S[j] * wgt * std::polar(1.0, F.grid.node(j) * s0);
    }
    // sum_j c_j exp(i y_j s_k), s_k = s0 + k dt, y_j = -Y + j dy
    const auto sums = chirp_z(c, count, dy * out.dt);
    for (std::size_t k = 0; k < count; ++k) {
        const double s = static_cast<double>(k) * out.dt;
        result[k0 + k] = sums[k] * std::polar(1.0, -Y * s) / sqrt_2pi;
    }

    const std::size_t K = std::min(opt.tail_nodes, N / 4);
    if (K >= 4) {
        // real 2x2 normal equations, complex right-hand side
        double a11 = 0.0, a12 = 0.0, a22 = 0.0, snorm = 0.0;
        cplx r1 = 0.0, r2 = 0.0;
        for (std::size_t j = N - K; j < N; ++j) {
            const double y = F.grid.node(j);
            const double b1 = 1.0 / (y * y), b2 = b1 * b1;
            a11 += b1 * b1;
            a12 += b1 * b2;
            a22 += b2 * b2;
            r1 += b1 * S[j];
            r2 += b2 * S[j];
            snorm += std::norm(S[j]);
        }
        const double det = a11 * a22 - a12 * a12;
        if (det > 0.0 && snorm > 0.0) {
            const cplx A = (a22 * r1 - a12 * r2) / det;
            const cplx B = (a11 * r2 - a12 * r1) / det;
            double res = 0.0;
            for (std::size_t j = N - K; j < N; ++j) {
                const double y = F.grid.node(j);
                res += std::norm(S[j] - A / (y * y) - B / (y * y * y * y));
            }
            if (std::sqrt(res / snorm) < opt.tail_fit_tol) {
                for (std::size_t k = 0; k < count; ++k) {
                    const double s = s0 + static_cast<double>(k) * out.dt;
                    result[k0 + k] += 2.0 * A * detail::cos_tail(Y, s) / sqrt_2pi;
                }
            }
        }
    }
    return {out, std::move(result)};
}

}  // namespace minphase
