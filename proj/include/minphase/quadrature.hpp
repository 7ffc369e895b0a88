#pragma once

// Integrals of sampled functions against exp(-w t).
//
// Samples are interpolated by piecewise cubics (4-point Lagrange stencils; the first and
// last interval use one-sided 5-point quartics so that the ends do not dominate the
// error) and the product with exp(-w t) is integrated exactly. This is Filon's idea with a cubic interpolant: the error is O(dt^4) no matter
// how fast exp(-w t) oscillates, which matters because boundary points with |w| far
// beyond the sampling Nyquist rate are routine here. At w = 0 the rule reduces to a
// Gregory-type composite rule.
//
// The support starts at the first nonzero sample when the signal jumps there, and one
// sample earlier when it rises smoothly out of zero.

#include <array>
#include <cmath>
#include <complex>
#include <cstring>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"

namespace minphase::quad {

struct support {
    std::size_t begin = 0;
    std::size_t end = 0;  // one past the last node
    bool empty() const noexcept { return end <= begin; }
    std::size_t size() const noexcept { return empty() ? 0 : end - begin; }
};

template <class T>
inline support find_support(std::span<const T> v) {
    const std::size_t n = v.size();
    std::size_t k0 = 0;
    while (k0 < n && v[k0] == T{}) ++k0;
    if (k0 == n) return {n, n};
    if (k0 == 0 || k0 + 4 > n) return {k0, n};
    // extrapolate the cubic through v[k0..k0+3] back to k0 - 1: near zero means the signal
    // rises smoothly out of the zero sample, otherwise it jumps at k0
    const T back = T(4) * v[k0] - T(6) * v[k0 + 1] + T(4) * v[k0 + 2] - v[k0 + 3];
    return {std::abs(back) < 0.5 * std::abs(v[k0]) ? k0 - 1 : k0, n};
}

// mu_p(h) = int_0^1 s^p exp(-h s) ds for p = 0..4.
inline std::array<cplx, 5> moments(cplx h) {
    std::array<cplx, 5> mu{};
    if (std::abs(h) < 1.5) {
        for (int p = 0; p < 5; ++p) {
            cplx term = 1.0;
            cplx sum = 1.0 / (p + 1.0);
            for (int n = 1; n < 60; ++n) {
                term *= -h / static_cast<double>(n);
                const cplx add = term / static_cast<double>(n + p + 1);
                sum += add;
                if (std::abs(add) < 1e-18 * std::abs(sum)) break;
            }
            mu[p] = sum;
        }
        return mu;
    }
    const cplx e = std::exp(-h);
    mu[0] = (1.0 - e) / h;
    for (int p = 1; p < 5; ++p) mu[p] = (static_cast<double>(p) * mu[p - 1] - e) / h;
    return mu;
}

namespace detail {

// c[j][p] with l_j(q + s) = sum_p c[j][p] s^p, l_j the Lagrange basis on nodes 0..N-1.
template <int N>
inline std::array<std::array<double, N>, N> lagrange_shift(int q) {
    std::array<std::array<double, N>, N> c{};
    for (int j = 0; j < N; ++j) {
        std::array<double, N> poly{};
        poly[0] = 1.0;
        int deg = 0;
        for (int i = 0; i < N; ++i) {
            if (i == j) continue;
            // multiply by (s + q - i) / (j - i)
            const double a = static_cast<double>(q - i), d = static_cast<double>(j - i);
            for (int p = deg + 1; p >= 0; --p) poly[p] = ((p > 0 ? poly[p - 1] : 0.0) + a * poly[p]) / d;
            ++deg;
        }
        c[j] = poly;
    }
    return c;
}

template <int N>
inline std::array<cplx, N> interval_weights(int q, const std::array<cplx, 5>& mu) {
    const auto c = lagrange_shift<N>(q);
    std::array<cplx, N> w{};
    for (int j = 0; j < N; ++j)
        for (int p = 0; p < N; ++p) w[j] += c[j][p] * mu[p];
    return w;
}

}  // namespace detail

// Per-frequency weights of the Filon rule, in units of dt and relative to exp(-w t_m).
// Support [b, e] with e - b >= 4: interval [b, b+1] uses nodes b..b+4, [e-1, e] uses
// e-4..e, every other interval [k, k+1] uses k-1..k+2.
class filon_weights {
public:
    explicit filon_weights(cplx h) : h_(h) {
        const auto mu = moments(h);
        mid_ = detail::interval_weights<4>(1, mu);
        first_ = detail::interval_weights<5>(0, mu);
        last_ = detail::interval_weights<5>(3, mu);
        interior_ = 0.0;
        for (int j = 0; j < 4; ++j) interior_ += mid_[j] * std::exp(h * static_cast<double>(j - 1));
    }

    // Weight of a node that only interior intervals touch: nodes b+5 .. e-5.
    cplx interior() const noexcept { return interior_; }

    // Weight of node m for support [b, e].
    cplx node(std::size_t m, std::size_t b, std::size_t e) const {
        cplx wsum = 0.0;
        const std::size_t k_lo = m >= b + 4 ? m - 4 : b;
        const std::size_t k_hi = m + 4 >= e ? e - 1 : m + 2;
        for (std::size_t k = k_lo; k <= k_hi; ++k) {
            const auto st = stencil(k, b, e);
            if (m < st.base || m >= st.base + st.size) continue;
            const double shift = static_cast<double>(m) - static_cast<double>(k);
            wsum += st.w[m - st.base] * std::exp(h_ * shift);
        }
        return wsum;
    }

    struct interval {
        std::size_t base, size;
        const cplx* w;
    };
    // Stencil of interval [k, k+1].
    interval stencil(std::size_t k, std::size_t b, std::size_t e) const {
        if (k == b) return {b, 5, first_.data()};
        if (k == e - 1) return {e - 4, 5, last_.data()};
        return {k - 1, 4, mid_.data()};
    }

private:
    cplx h_;
    std::array<cplx, 4> mid_;
    std::array<cplx, 5> first_, last_;
    cplx interior_;
};

// Above this Re(w dt) the node-weight factorization overflows; exp(-w t) is then so
// steep that summing interval by interval over a short prefix is both exact and cheap.
inline constexpr double steep_threshold = 20.0;

namespace detail {

inline void check_half_plane(cplx w) {
    if (!(w.real() >= -1e-12 * std::max(1.0, std::abs(w))) || !std::isfinite(w.imag()))
        throw domain_error("Laplace point outside the closed right half-plane");
}

template <class T>
inline cplx interval_sum(std::span<const T> v, double dt, cplx w, support s) {
    const std::size_t b = s.begin, e = s.end - 1;
    const filon_weights fw(w * dt);
    cplx total = 0.0;
    const cplx w0 = std::exp(-w * (static_cast<double>(b) * dt));
    for (std::size_t k = b; k < e; ++k) {
        const cplx decay = std::exp(-w * (static_cast<double>(k - b) * dt));
        if (std::abs(decay) < 1e-300) break;
        const auto st = fw.stencil(k, b, e);
        cplx part = 0.0;
        for (std::size_t j = 0; j < st.size; ++j) part += st.w[j] * cplx(v[st.base + j]);
        total += decay * part;
    }
    return total * w0 * dt;
}

// Linear Filon for supports too short for cubic stencils.
template <class T>
inline cplx linear_filon(std::span<const T> v, double dt, cplx w, support s) {
    if (s.size() < 2) return 0.0;
    const auto mu = moments(w * dt);
    const cplx a = mu[0] - mu[1], c = mu[1];  // left and right node of one interval
    cplx total = 0.0;
    for (std::size_t k = s.begin; k + 1 < s.end; ++k) {
        const cplx ph = std::exp(-w * (static_cast<double>(k) * dt));
        total += ph * (a * cplx(v[k]) + c * cplx(v[k + 1]));
    }
    return total * dt;
}

// sum_{m in [lo, hi)} v_m exp(-w m dt), in blocks of B samples: within a block the phasor
// comes from a per-point table, so the inner loop is a plain dot product with no
// multiply chain; each block is re-anchored with an exact exp.
template <bool Complex>
inline cplx phasor_sum(const double* re, const double* im, std::size_t lo, std::size_t hi, double dt, cplx w) {
    constexpr std::size_t B = 256;
    alignas(64) double tr[B], ti[B];
    {
        // written out: std::complex multiplication goes through a NaN-checking libcall
        const cplx st = std::exp(-w * dt);
        const double sr = st.real(), si = st.imag();
        double pr = 1.0, pi_ = 0.0;
        for (std::size_t k = 0; k < B; ++k) {
            if (k % 32 == 0) {
                const cplx p = std::exp(-w * (static_cast<double>(k) * dt));
                pr = p.real();
                pi_ = p.imag();
            }
            tr[k] = pr;
            ti[k] = pi_;
            const double nr = pr * sr - pi_ * si;
            pi_ = pr * si + pi_ * sr;
            pr = nr;
        }
    }
    using v8 = double __attribute__((vector_size(64)));
    const auto load = [](v8& x, const double* p) { std::memcpy(&x, p, sizeof x); };
    const cplx jump = std::exp(-w * (static_cast<double>(B) * dt));
    const double jr = jump.real(), ji = jump.imag();
    cplx total = 0.0, base = 0.0;
    std::size_t blk = 0;
    for (std::size_t m0 = lo; m0 < hi; m0 += B) {
        const std::size_t len = std::min(B, hi - m0);
        v8 ar0{}, ar1{}, ai0{}, ai1{};
        std::size_t k = 0;
        for (; k + 16 <= len; k += 16) {
            v8 c0, c1, s0, s1, x0, x1;
            load(c0, tr + k);
            load(c1, tr + k + 8);
            load(s0, ti + k);
            load(s1, ti + k + 8);
            load(x0, re + m0 + k);
            load(x1, re + m0 + k + 8);
            ar0 += x0 * c0;
            ar1 += x1 * c1;
            ai0 += x0 * s0;
            ai1 += x1 * s1;
            if constexpr (Complex) {
                v8 y0, y1;
                load(y0, im + m0 + k);
                load(y1, im + m0 + k + 8);
                ar0 -= y0 * s0;
                ar1 -= y1 * s1;
                ai0 += y0 * c0;
                ai1 += y1 * c1;
            }
        }
        const v8 vr = ar0 + ar1, vi = ai0 + ai1;
        double sr = 0.0, si = 0.0;
        for (int l = 0; l < 8; ++l) {
            sr += vr[l];
            si += vi[l];
        }
        for (; k < len; ++k) {
            const double xr = re[m0 + k], xi = Complex ? im[m0 + k] : 0.0;
            sr += xr * tr[k] - xi * ti[k];
            si += xr * ti[k] + xi * tr[k];
        }
        if (blk++ % 8 == 0) base = std::exp(-w * (static_cast<double>(m0) * dt));
        else base = {base.real() * jr - base.imag() * ji, base.real() * ji + base.imag() * jr};
        total += cplx(base.real() * sr - base.imag() * si, base.real() * si + base.imag() * sr);
    }
    return total;
}

}  // namespace detail

// int_0^{T} v(t) exp(-w t) dt for every w in `ws` (Re w >= 0).
template <class T>
inline std::vector<cplx> exp_integrals(std::span<const T> v, double dt, std::span<const cplx> ws) {
    for (const cplx& w : ws) detail::check_half_plane(w);
    std::vector<cplx> out(ws.size(), cplx{});
    const support s = find_support(v);
    if (s.size() < 2) return out;
    if (s.size() < 5) {
        for (std::size_t i = 0; i < ws.size(); ++i) out[i] = detail::linear_filon(v, dt, ws[i], s);
        return out;
    }
    const std::size_t b = s.begin, e = s.end - 1;
    const bool small = e - b < 12;
    const std::size_t lo = b + 5, hi = e - 4;  // interior nodes use the uniform weight

    std::vector<double> re(v.size()), im(v.size());
    bool is_complex = false;
    for (std::size_t m = 0; m < v.size(); ++m) {
        const cplx x(v[m]);
        re[m] = x.real();
        im[m] = x.imag();
        is_complex = is_complex || x.imag() != 0.0;
    }

    std::vector<std::size_t> regular;
    regular.reserve(ws.size());
    for (std::size_t i = 0; i < ws.size(); ++i) {
        if (small || ws[i].real() * dt > steep_threshold)
            out[i] = detail::interval_sum(v, dt, ws[i], s);
        else
            regular.push_back(i);
    }

    for (std::size_t i : regular) {
        const cplx w = ws[i];
        const cplx sum = is_complex ? detail::phasor_sum<true>(re.data(), im.data(), lo, hi, dt, w)
                                    : detail::phasor_sum<false>(re.data(), im.data(), lo, hi, dt, w);
        const filon_weights fw(w * dt);
        cplx acc = fw.interior() * sum;
        for (std::size_t m = b; m < lo; ++m)
            acc += fw.node(m, b, e) * cplx(v[m]) * std::exp(-w * (static_cast<double>(m) * dt));
        for (std::size_t m = hi; m <= e; ++m)
            acc += fw.node(m, b, e) * cplx(v[m]) * std::exp(-w * (static_cast<double>(m) * dt));
        out[i] = acc * dt;
    }
    return out;
}

template <class T>
inline cplx exp_integral(std::span<const T> v, double dt, cplx w) {
    return exp_integrals(v, dt, std::span<const cplx>(&w, 1))[0];
}

// Same integral on the uniform axis grid w_j = i(y0 + j dy), j < count, via one chirp-z.
template <class T>
inline std::vector<cplx> exp_integrals_axis(std::span<const T> v, double dt, double y0, double dy,
                                            std::size_t count) {
    std::vector<cplx> out(count, cplx{});
    const support s = find_support(v);
    if (s.size() < 12) {
        std::vector<cplx> ws(count);
        for (std::size_t j = 0; j < count; ++j) ws[j] = {0.0, y0 + static_cast<double>(j) * dy};
        return exp_integrals(v, dt, std::span<const cplx>(ws));
    }
    const std::size_t b = s.begin, e = s.end - 1;
    const std::size_t lo = b + 5, hi = e - 4;
    std::vector<cplx> x(hi - lo);
    for (std::size_t m = lo; m < hi; ++m)
        x[m - lo] = cplx(v[m]) * std::polar(1.0, -y0 * static_cast<double>(m) * dt);
    const auto sums = chirp_z(x, count, -dy * dt);
    for (std::size_t j = 0; j < count; ++j) {
        const double y = y0 + static_cast<double>(j) * dy;
        const cplx w(0.0, y);
        const filon_weights fw(w * dt);
        cplx acc = fw.interior() * sums[j] *
                   std::polar(1.0, -static_cast<double>(j) * dy * static_cast<double>(lo) * dt);
        for (std::size_t m = b; m < lo; ++m)
            acc += fw.node(m, b, e) * cplx(v[m]) * std::polar(1.0, -y * static_cast<double>(m) * dt);
        for (std::size_t m = hi; m <= e; ++m)
            acc += fw.node(m, b, e) * cplx(v[m]) * std::polar(1.0, -y * static_cast<double>(m) * dt);
        out[j] = acc * dt;
    }
    return out;
}

// int_0^{T} v(t) dt with the same cubic rule.
template <class T>
inline T integrate(std::span<const T> v, double dt) {
    const cplx r = exp_integral(v, dt, cplx{});
    if constexpr (std::is_same_v<T, double>)
        return r.real();
    else
        return T(r);
}

// int_0^{upto} v(t) dt for any 0 <= upto <= t_max; the last partial interval is
// integrated through its local cubic.
inline double integrate_to(std::span<const double> v, double dt, double upto) {
    const std::size_t n = v.size();
    if (n < 2 || upto <= 0.0) return 0.0;
    const double pos = upto / dt;
    std::size_t k = static_cast<std::size_t>(std::floor(pos + 1e-9));
    if (k >= n - 1) return integrate(v, dt);
    double frac = pos - static_cast<double>(k);
    if (frac < 1e-9) frac = 0.0;
    double whole = k >= 1 ? integrate(v.subspan(0, k + 1), dt) : 0.0;
    if (frac == 0.0) return whole;
    // cubic through a 4-node stencil containing [k, k+1]
    const std::size_t base = k == 0 ? 0 : std::min(k - 1, n >= 4 ? n - 4 : 0);
    const std::size_t nodes = std::min<std::size_t>(4, n - base);
    double part = 0.0;
    for (std::size_t j = 0; j < nodes; ++j) {
        // int over x in [k-base, k-base+frac] of the Lagrange basis l_j(x)
        const double x0 = static_cast<double>(k - base), x1 = x0 + frac;
        const std::size_t steps = 2;  // Simpson is exact on cubics
        double acc = 0.0;
        for (std::size_t g = 0; g <= steps; ++g) {
            const double x = x0 + (x1 - x0) * static_cast<double>(g) / steps;
            double l = 1.0;
            for (std::size_t i = 0; i < nodes; ++i)
                if (i != j) l *= (x - static_cast<double>(i)) / (static_cast<double>(j) - static_cast<double>(i));
            const double wgt = (g == 0 || g == steps) ? 1.0 : (g % 2 ? 4.0 : 2.0);
            acc += wgt * l;
        }
        part += v[base + j] * acc * (x1 - x0) / (3.0 * steps);
    }
    return whole + part * dt;
}

}  // namespace minphase::quad
