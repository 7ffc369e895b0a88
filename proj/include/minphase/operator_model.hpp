#pragma once

// Operators A = L^{-1} M_kappa C_xi L, kept either as closed-form disk symbols (psi, phi)
// or as sampled half-plane data (alpha, xi) on an axis grid.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "descriptor.hpp"
#include "errors.hpp"
#include "factorization.hpp"
#include "laguerre.hpp"
#include "signal.hpp"
#include "transforms.hpp"

namespace minphase {

// Laplace / H transform of one signal at arbitrary points. Points well inside the disk go
// through the Laguerre series of f; the rest through direct quadrature.
class TransformEvaluator {
public:
    TransformEvaluator(const CausalSignal& f, double series_radius) : f_(f), radius_(series_radius) {}

    // (H f)(z) for |z| <= 1
    std::vector<cplx> h_at(std::span<const cplx> zs) {
        std::vector<cplx> out(zs.size());
        std::vector<cplx> far;
        std::vector<std::size_t> far_idx;
        for (std::size_t j = 0; j < zs.size(); ++j) {
            if (std::abs(zs[j]) <= radius_) {
                out[j] = series(zs[j]);
            } else {
                far.push_back(zs[j]);
                far_idx.push_back(j);
            }
        }
        if (!far.empty()) {
            const auto v = h_transform_at(f_, far);
            for (std::size_t i = 0; i < far.size(); ++i) out[far_idx[i]] = v[i];
        }
        return out;
    }

    // (L f)(w) for Re w >= 0
    std::vector<cplx> laplace_at(std::span<const cplx> ws) {
        std::vector<cplx> out(ws.size());
        std::vector<cplx> far;
        std::vector<std::size_t> far_idx;
        for (std::size_t j = 0; j < ws.size(); ++j) {
            const cplx z = cayley(ws[j]);
            if (std::abs(z) <= radius_) {
                out[j] = series(z) / (sqrt_pi * (1.0 + ws[j]));
            } else {
                far.push_back(ws[j]);
                far_idx.push_back(j);
            }
        }
        if (!far.empty()) {
            const auto v = laplace(f_, far);
            for (std::size_t i = 0; i < far.size(); ++i) out[far_idx[i]] = v[i];
        }
        return out;
    }

private:
    cplx series(cplx z) {
        if (coeffs_.empty()) {
            // terms beyond M are below 1e-16 ||f|| since |a_n| <= ||f||
            const double r = std::max(radius_, 1e-3);
            const auto M = static_cast<std::size_t>(std::ceil(std::log(1e-16 * (1.0 - r)) / std::log(r)));
            coeffs_ = d_map(f_, std::clamp<std::size_t>(M, 8, max_laguerre_degree));
        }
        cplx acc = 0.0;
        for (std::size_t n = coeffs_.size(); n-- > 0;) acc = acc * z + coeffs_[n];
        return acc;
    }

    const CausalSignal& f_;
    double radius_;
    std::vector<cplx> coeffs_;
};

// Values of an operator's symbols at the nodes of an axis grid.
struct HalfPlaneValues {
    std::vector<cplx> alpha, xi, kappa;
};
struct DiskValues {
    std::vector<cplx> psi, phi;  // at z_j = cayley(i y_j)
};

// Boundary data of an identified operator on its axis grid.
struct SampledSymbols {
    FrequencyGrid axis;
    std::vector<cplx> alpha, xi;
    std::vector<cplx> psi, phi;  // optional disk data at the pullback nodes
};

enum class OperatorForm { disk, half_plane };

inline const char* to_string(OperatorForm f) { return f == OperatorForm::disk ? "disk" : "half_plane"; }

struct ValidationReport {
    bool self_map = true;
    double selfmap_excess = 0.0;       // max(|phi| - 1) or max(-Re xi) in the disk metric
    bool psi_zero_free = true;         // psi = lambda S_tau * outer on the grid
    double psi_delay = 0.0;
    double psi_deviation = 0.0;
    double psi_norm = 0.0;
    bool preserving_verified = false;  // sufficient condition met
    std::string message;
    bool ok() const { return self_map && psi_zero_free; }
};

class OperatorModel {
public:
    OperatorModel() = default;

    static OperatorModel synthesize(FunctionDescriptor psi, FunctionDescriptor phi) {
        OperatorModel m;
        m.form_ = OperatorForm::disk;
        m.delay_ = psi.singular_delay();
        m.psi_ = std::move(psi);
        m.phi_ = std::move(phi);
        return m;
    }

    static OperatorModel from_samples(SampledSymbols s, double delay) {
        if (s.alpha.size() != s.axis.size() || s.xi.size() != s.axis.size())
            throw incompatible_grid("operator samples do not match their grid");
        OperatorModel m;
        m.form_ = OperatorForm::half_plane;
        m.delay_ = delay;
        m.samples_ = std::move(s);
        return m;
    }

    OperatorForm form() const noexcept { return form_; }
    double delay() const noexcept { return delay_; }
    const std::optional<FunctionDescriptor>& psi() const noexcept { return psi_; }
    const std::optional<FunctionDescriptor>& phi() const noexcept { return phi_; }
    const std::optional<SampledSymbols>& samples() const noexcept { return samples_; }

    bool xi_is_identity() const { return phi_ && phi_->is_identity(); }
    bool has_disk_data() const { return phi_.has_value() || (samples_ && !samples_->phi.empty()); }

    HalfPlaneValues half_plane(const FrequencyGrid& axis) const {
        HalfPlaneValues h;
        const std::size_t n = axis.size();
        h.alpha.resize(n);
        h.xi.resize(n);
        h.kappa.resize(n);
        if (samples_) {
            if (!samples_->axis.same_as(axis)) throw incompatible_grid("operator was identified on another axis grid");
            h.alpha = samples_->alpha;
            h.xi = samples_->xi;
            for (std::size_t j = 0; j < n; ++j) h.kappa[j] = sqrt_2pi * (1.0 + h.xi[j]) * h.alpha[j];
            return h;
        }
        const DiskValues d = disk(axis);
        for (std::size_t j = 0; j < n; ++j) {
            const cplx w = axis.point(j);
            h.alpha[j] = d.psi[j] / (sqrt_2pi * (1.0 + w));
            if (xi_is_identity()) {
                h.xi[j] = w;
                h.kappa[j] = d.psi[j];
                continue;
            }
            const cplx den = 1.0 + d.phi[j];
            h.xi[j] = std::abs(den) > 1e-300 ? (1.0 - d.phi[j]) / den : cplx(1e300, 0.0);
            // kappa = sqrt(2 pi) (1 + xi) alpha with 1 + xi = 2 / (1 + phi)
            h.kappa[j] = std::abs(den) > 1e-300 ? 2.0 * d.psi[j] / (den * (1.0 + w)) : cplx{};
        }
        return h;
    }

    DiskValues disk(const FrequencyGrid& axis) const {
        DiskValues d;
        if (samples_) {
            if (!samples_->axis.same_as(axis)) throw incompatible_grid("operator was identified on another axis grid");
            if (samples_->phi.empty()) throw domain_error("operator carries no disk-form data");
            d.psi = samples_->psi;
            d.phi = samples_->phi;
            return d;
        }
        const std::size_t n = axis.size();
        d.psi.resize(n);
        d.phi.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const cplx z = cayley(axis.point(j));
            d.psi[j] = (*psi_)(z);
            d.phi[j] = (*phi_)(z);
        }
        return d;
    }

private:
    OperatorForm form_ = OperatorForm::disk;
    double delay_ = 0.0;
    std::optional<FunctionDescriptor> psi_, phi_;
    std::optional<SampledSymbols> samples_;
};

inline ValidationReport validate(const OperatorModel& op, const RunConfig& cfg = {}) {
    ValidationReport r;
    std::vector<std::string> notes;
    if (op.phi() && op.psi()) {
        const auto& phi = *op.phi();
        const auto& psi = *op.psi();
        const auto circle = cfg.grid.circle();
        // self-map on the boundary and on a few interior circles
        double sup = 0.0, min_gap = std::numeric_limits<double>::infinity();
        // phi can touch -1 between nodes; a gap smaller than one step of phi proves nothing
        double max_step = 0.0;
        const auto boundary = [&](const std::vector<cplx>& vs) {
            for (std::size_t j = 0; j < vs.size(); ++j) {
                sup = std::max(sup, std::abs(vs[j]));
                min_gap = std::min(min_gap, std::abs(1.0 + vs[j]));
                max_step = std::max(max_step, std::abs(vs[(j + 1) % vs.size()] - vs[j]));
            }
        };
        if (phi.closed_form()) {
            std::vector<cplx> edge(circle.size());
            for (std::size_t j = 0; j < circle.size(); ++j) edge[j] = phi(circle.point(j));
            boundary(edge);
            for (double rad : {0.9, 0.5})
                for (std::size_t j = 0; j < circle.size(); ++j) sup = std::max(sup, std::abs(phi(rad * circle.point(j))));
            sup = std::max(sup, std::abs(phi(cplx{})));
        } else {
            // boundary samples only; by the maximum principle the boundary sup is the sup
            boundary(phi.on_grid(circle));
        }
        r.selfmap_excess = sup - 1.0;
        r.self_map = r.selfmap_excess <= cfg.tol.selfmap;
        if (!r.self_map) notes.push_back("phi is not a self-map of the disk");

        const BoundaryFunction G(circle, psi.on_grid(circle));
        double sq = 0.0;
        for (const auto& v : G.values) sq += std::norm(v);
        r.psi_norm = std::sqrt(sq / static_cast<double>(G.size()));
        try {
            const cplx c = psi.closed_form() ? psi(cplx{}) : psi.taylor(1)[0];
            const auto fr = factorize(G, c);
            r.psi_delay = fr.tau;
            const cplx lambda = c / std::abs(c);
            double gmax = 0.0;
            for (const auto& v : G.values) gmax = std::max(gmax, std::abs(v));
            for (std::size_t j = 0; j < G.size(); ++j) {
                const cplx s = lambda * std::exp(-fr.tau * cayley(circle.point(j)));
                r.psi_deviation = std::max(r.psi_deviation, std::abs(G.values[j] - s * fr.outer.values.values[j]) / gmax);
            }
            r.psi_zero_free = r.psi_deviation <= cfg.tol.classify;
        } catch (const not_factorizable& e) {
            r.psi_zero_free = false;
            r.psi_deviation = std::numeric_limits<double>::infinity();
        }
        if (!r.psi_zero_free) notes.push_back("psi has zeros in the disk (not an outer times a delay)");
        r.preserving_verified = r.ok() && (phi.is_identity() || min_gap > std::max(max_step, 1e-6));
        if (r.ok() && !r.preserving_verified) notes.push_back("phi reaches -1 on the boundary; preservation not verified");
    } else if (op.samples()) {
        const auto& s = *op.samples();
        double excess = 0.0;
        for (const auto& x : s.xi) excess = std::max(excess, std::abs(cayley(x)) - 1.0);
        r.selfmap_excess = excess;
        r.self_map = excess <= cfg.tol.selfmap;
        if (!r.self_map) notes.push_back("xi leaves the closed right half-plane");
        r.psi_delay = op.delay();
        r.preserving_verified = false;
        notes.push_back("sampled operator: preservation not verified");
    }
    for (std::size_t i = 0; i < notes.size(); ++i) r.message += (i ? "; " : "") + notes[i];
    if (r.message.empty()) r.message = "ok";
    return r;
}

namespace detail {

// Onset of a signal on its grid: support start, rounded to a node.
inline double onset_time(const CausalSignal& f) {
    const auto s = quad::find_support(f.values());
    return s.empty() ? 0.0 : f.grid().t(s.begin);
}

inline cplx project_right_half_plane(cplx xi) { return xi.real() < 0.0 ? cplx(0.0, xi.imag()) : xi; }
inline cplx project_disk(cplx z) { return std::abs(z) > 1.0 ? z / std::abs(z) : z; }

}  // namespace detail

// A f through the half-plane form: L^{-1}[kappa * (L f)(xi)].
inline CausalSignal apply(const OperatorModel& op, const CausalSignal& f, const RunConfig& cfg = {}) {
    const auto axis = cfg.grid.axis();
    const auto h = op.half_plane(axis);
    std::vector<cplx> Lf;
    double delay = op.delay();
    if (op.xi_is_identity()) {
        Lf = laplace_axis(f, axis).values;
        delay += detail::onset_time(f);
    } else {
        std::vector<cplx> pts(axis.size());
        for (std::size_t j = 0; j < axis.size(); ++j) {
            if (std::abs(cayley(h.xi[j])) > 1.0 + cfg.tol.selfmap)
                throw not_preserving("xi leaves the closed right half-plane at y = " + std::to_string(axis.node(j)));
            pts[j] = detail::project_right_half_plane(h.xi[j]);
        }
        TransformEvaluator ev(f, cfg.tol.series_radius);
        Lf = ev.laplace_at(pts);
    }
    std::vector<cplx> out(axis.size());
    for (std::size_t j = 0; j < axis.size(); ++j) out[j] = h.kappa[j] * Lf[j];
    InverseOptions io;
    io.delay = delay;
    return inverse_laplace_boundary(BoundaryFunction(axis, std::move(out)), f.grid(), io);
}

// A f through the disk form: the boundary function psi * (H f)(phi), pulled back to the axis.
inline CausalSignal apply_disk_route(const OperatorModel& op, const CausalSignal& f, const RunConfig& cfg = {}) {
    if (!op.has_disk_data()) throw domain_error("operator carries no disk-form data");
    const auto axis = cfg.grid.axis();
    const auto d = op.disk(axis);
    std::vector<cplx> pts(axis.size());
    for (std::size_t j = 0; j < axis.size(); ++j) {
        if (std::abs(d.phi[j]) > 1.0 + cfg.tol.selfmap)
            throw not_self_map("phi leaves the closed disk at y = " + std::to_string(axis.node(j)));
        pts[j] = detail::project_disk(d.phi[j]);
        if (std::abs(1.0 + pts[j]) < 1e-14) pts[j] = -1.0 + 1e-14;
    }
    TransformEvaluator ev(f, cfg.tol.series_radius);
    const auto Hf = ev.h_at(pts);
    std::vector<cplx> out(axis.size());
    for (std::size_t j = 0; j < axis.size(); ++j)
        out[j] = d.psi[j] * Hf[j] / (sqrt_pi * (1.0 + axis.point(j)));
    InverseOptions io;
    io.delay = op.delay() + (op.xi_is_identity() ? detail::onset_time(f) : 0.0);
    return inverse_laplace_boundary(BoundaryFunction(axis, std::move(out)), f.grid(), io);
}

}  // namespace minphase
