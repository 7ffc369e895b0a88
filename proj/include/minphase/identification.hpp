#pragma once

// Recovering an operator from its responses to two probe signals.
//
// sigma probes: alpha = L(A sigma0) + L(A sigma1), xi = L(A sigma0) / L(A sigma1).
// rho probes:   psi = H(A rho0),                   phi = H(A rho1) / H(A rho0).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "factorization.hpp"
#include "operator_model.hpp"
#include "signal.hpp"
#include "transforms.hpp"

namespace minphase {

enum class ProbeSet { sigma, rho };
enum class IdentifyMode { translated, plain };

inline const char* to_string(ProbeSet p) { return p == ProbeSet::sigma ? "sigma" : "rho"; }
inline const char* to_string(IdentifyMode m) { return m == IdentifyMode::translated ? "translated" : "plain"; }

// Responses of one operator to a probe pair, on a common grid.
struct ProbeResponsePair {
    ProbeSet probes = ProbeSet::sigma;
    CausalSignal response0, response1;
};

struct IdentificationDiagnostics {
    std::size_t floored_nodes = 0;
    double selfmap_excess = 0.0;    // in the disk metric, before projection
    double estimated_delay = 0.0;   // from the data, whatever the mode
    bool rank_one = false;          // phi came out constant
    bool plain_violation = false;   // plain mode but a delay was detected
};

struct IdentifiedOperator {
    OperatorModel op;
    ProbeSet probes = ProbeSet::sigma;
    IdentifyMode mode = IdentifyMode::translated;
    IdentificationDiagnostics diag;
};

namespace detail {

// num/den with the denominator floored relative to its maximum. Floored nodes are filled
// by linear interpolation between their good neighbours.
inline std::vector<cplx> floored_ratio(const std::vector<cplx>& num, const std::vector<cplx>& den, const Tolerances& tol,
                                       std::size_t& floored) {
    const std::size_t n = den.size();
    double dmax = 0.0;
    for (const auto& d : den) dmax = std::max(dmax, std::abs(d));
    if (!(dmax > 0.0)) throw ill_conditioned("probe response vanishes on the whole grid");
    const double fl = tol.division_floor * dmax;
    std::vector<cplx> q(n);
    std::vector<bool> bad(n, false);
    floored = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(den[j]) <= fl) {
            bad[j] = true;
            ++floored;
        } else {
            q[j] = num[j] / den[j];
        }
    }
    if (static_cast<double>(floored) > tol.ill_fraction * static_cast<double>(n))
        throw ill_conditioned(std::to_string(floored) + " of " + std::to_string(n) +
                              " denominator nodes fall below the floor");
    for (std::size_t j = 0; j < n; ++j) {
        if (!bad[j]) continue;
        std::size_t lo = j, hi = j;
        while (lo > 0 && bad[lo]) --lo;
        while (hi + 1 < n && bad[hi]) ++hi;
        const bool lo_ok = !bad[lo], hi_ok = !bad[hi];
        if (lo_ok && hi_ok) {
            const double s = static_cast<double>(j - lo) / static_cast<double>(hi - lo);
            q[j] = (1.0 - s) * q[lo] + s * q[hi];
        } else {
            q[j] = lo_ok ? q[lo] : q[hi];
        }
    }
    return q;
}

// Delay of a response from the mean-log identity, capped by where its samples start: a
// boundary zero biases the spectral estimate upward by O(1/N), never downward past the onset.
inline double response_delay(const CausalSignal& r, const RunConfig& cfg) {
    const auto G = h_transform(r, cfg.grid.circle());
    const cplx zero = 0.0;
    const cplx c = h_transform_at(r, std::span<const cplx>(&zero, 1))[0];
    const double spectral = delay_of(G, c).tau;
    const double onset = onset_time(r);
    const double d = std::min(spectral, onset);
    return d < 1e-9 ? 0.0 : d;
}

}  // namespace detail

inline IdentifiedOperator identify_halfplane(const CausalSignal& a_sigma0, const CausalSignal& a_sigma1,
                                             const RunConfig& cfg = {}, IdentifyMode mode = IdentifyMode::translated) {
    if (!(a_sigma0.grid() == a_sigma1.grid())) throw incompatible_grid("responses live on different grids");
    const auto axis = cfg.grid.axis();
    const auto L0 = laplace_axis(a_sigma0, axis).values;
    const auto L1 = laplace_axis(a_sigma1, axis).values;

    IdentifiedOperator id;
    id.probes = ProbeSet::sigma;
    id.mode = mode;
    SampledSymbols s;
    s.axis = axis;
    s.alpha.resize(axis.size());
    for (std::size_t j = 0; j < axis.size(); ++j) s.alpha[j] = L0[j] + L1[j];
    s.xi = detail::floored_ratio(L0, L1, cfg.tol, id.diag.floored_nodes);

    // Re xi >= 0 is |cayley(xi)| <= 1; the check is done there so that it is scale-free.
    double excess = 0.0;
    for (auto& x : s.xi) {
        excess = std::max(excess, std::abs(cayley(x)) - 1.0);
        x = detail::project_right_half_plane(x);
    }
    id.diag.selfmap_excess = excess;
    if (excess > cfg.tol.selfmap)
        throw not_preserving("identified xi leaves the right half-plane (excess " + std::to_string(excess) + ")");

    id.diag.estimated_delay = detail::response_delay(a_sigma0 + a_sigma1, cfg);
    double delay = id.diag.estimated_delay;
    if (mode == IdentifyMode::plain) {
        id.diag.plain_violation = delay > cfg.tol.plain_delay;
        delay = 0.0;
    }
    id.op = OperatorModel::from_samples(std::move(s), delay);
    return id;
}

inline IdentifiedOperator identify_disk(const CausalSignal& a_rho0, const CausalSignal& a_rho1, const RunConfig& cfg = {},
                                        IdentifyMode mode = IdentifyMode::translated) {
    if (!(a_rho0.grid() == a_rho1.grid())) throw incompatible_grid("responses live on different grids");
    const auto axis = cfg.grid.axis();
    const auto F0 = laplace_axis(a_rho0, axis).values;
    const auto F1 = laplace_axis(a_rho1, axis).values;

    IdentifiedOperator id;
    id.probes = ProbeSet::rho;
    id.mode = mode;
    SampledSymbols s;
    s.axis = axis;
    const std::size_t n = axis.size();
    std::vector<cplx> H0(n), H1(n);
    for (std::size_t j = 0; j < n; ++j) {
        // (H r)(z) = 2 sqrt(pi) / (1+z) (L r)(cayley(z)) at z = cayley(iy)
        const cplx z = cayley(axis.point(j));
        H0[j] = 2.0 * sqrt_pi / (1.0 + z) * F0[j];
        H1[j] = 2.0 * sqrt_pi / (1.0 + z) * F1[j];
    }
    s.psi = H0;
    s.phi = detail::floored_ratio(H1, H0, cfg.tol, id.diag.floored_nodes);

    double excess = 0.0;
    cplx mean = 0.0;
    for (auto& p : s.phi) {
        excess = std::max(excess, std::abs(p) - 1.0);
        p = detail::project_disk(p);
        mean += p;
    }
    mean /= static_cast<double>(n);
    id.diag.selfmap_excess = excess;
    if (excess > cfg.tol.selfmap)
        throw not_preserving("identified phi leaves the closed disk (excess " + std::to_string(excess) + ")");
    double spread = 0.0;
    for (const auto& p : s.phi) spread = std::max(spread, std::abs(p - mean));
    id.diag.rank_one = spread < 1e-6;

    s.alpha.resize(n);
    s.xi.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const cplx w = axis.point(j);
        s.alpha[j] = s.psi[j] / (sqrt_2pi * (1.0 + w));
        s.xi[j] = detail::project_right_half_plane(cayley(s.phi[j]));
    }

    id.diag.estimated_delay = detail::response_delay(a_rho0, cfg);
    double delay = id.diag.estimated_delay;
    if (mode == IdentifyMode::plain) {
        id.diag.plain_violation = delay > cfg.tol.plain_delay;
        delay = 0.0;
    }
    id.op = OperatorModel::from_samples(std::move(s), delay);
    return id;
}

inline IdentifiedOperator identify(const ProbeResponsePair& p, const RunConfig& cfg = {},
                                   IdentifyMode mode = IdentifyMode::translated) {
    return p.probes == ProbeSet::sigma ? identify_halfplane(p.response0, p.response1, cfg, mode)
                                       : identify_disk(p.response0, p.response1, cfg, mode);
}

inline IdentifiedOperator identify_plain(const ProbeResponsePair& p, const RunConfig& cfg = {}) {
    return identify(p, cfg, IdentifyMode::plain);
}

// Responses of `op` to the probe pair, as a lab would record them.
inline ProbeResponsePair probe(const OperatorModel& op, ProbeSet set, const RunConfig& cfg = {}) {
    const TimeGrid g = cfg.grid.time();
    if (set == ProbeSet::sigma) return {set, apply(op, sigma0(g), cfg), apply(op, sigma1(g), cfg)};
    return {set, apply(op, rho0(g), cfg), apply(op, rho1(g), cfg)};
}

struct CrossValidation {
    std::vector<double> signal_errors;  // ||A_id f - A f|| / ||f||
    double max_signal_error = 0.0;
    double alpha_error = 0.0;           // sup over the band
    double xi_error = 0.0;
    double kappa_error = 0.0;
};

// Compares an identified operator with the truth on test signals and on boundary values
// for |y| <= band.
inline CrossValidation cross_validate(const OperatorModel& identified, const OperatorModel& truth,
                                      const std::vector<CausalSignal>& signals, const RunConfig& cfg = {},
                                      double band = 50.0) {
    CrossValidation cv;
    for (const auto& f : signals) {
        const auto a = apply(identified, f, cfg);
        const auto b = apply(truth, f, cfg);
        const double e = norm(a - b) / norm(f);
        cv.signal_errors.push_back(e);
        cv.max_signal_error = std::max(cv.max_signal_error, e);
    }
    const auto axis = cfg.grid.axis();
    const auto hi = identified.half_plane(axis);
    const auto ht = truth.half_plane(axis);
    for (std::size_t j = 0; j < axis.size(); ++j) {
        if (std::abs(axis.node(j)) > band) continue;
        cv.alpha_error = std::max(cv.alpha_error, std::abs(hi.alpha[j] - ht.alpha[j]));
        cv.xi_error = std::max(cv.xi_error, std::abs(hi.xi[j] - ht.xi[j]));
        cv.kappa_error = std::max(cv.kappa_error, std::abs(hi.kappa[j] - ht.kappa[j]));
    }
    return cv;
}

}  // namespace minphase
