#pragma once

// Closed-form (or sampled) analytic functions on the disk: the symbols psi and phi of an
// operator, and test inner factors.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "transforms.hpp"

namespace minphase {

class FunctionDescriptor;

namespace desc {

struct Constant {
    cplx value{1.0, 0.0};
};
// num(z)/den(z), coefficients in ascending powers.
struct Rational {
    std::vector<cplx> num{cplx{1.0}};
    std::vector<cplx> den{cplx{1.0}};
};
// exp(tau (z-1)/(z+1)): the disk picture of a delay by tau.
struct ExpSingular {
    double tau = 0.0;
};
// (a z + b)/(c z + d)
struct Mobius {
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};
};
struct Product {
    std::vector<FunctionDescriptor> factors;
};
// Values known only at grid nodes.
struct Samples {
    BoundaryFunction data;
};

}  // namespace desc

class FunctionDescriptor {
public:
    using variant = std::variant<desc::Constant, desc::Rational, desc::ExpSingular, desc::Mobius, desc::Product, desc::Samples>;

    FunctionDescriptor() : v_(desc::Constant{}) {}
    template <class T>
        requires std::is_constructible_v<variant, T>
    FunctionDescriptor(T x) : v_(std::move(x)) {}

    static FunctionDescriptor constant(cplx c) { return desc::Constant{c}; }
    static FunctionDescriptor identity() { return desc::Mobius{}; }
    static FunctionDescriptor polynomial(std::vector<cplx> c) { return desc::Rational{std::move(c), {cplx{1.0}}}; }
    static FunctionDescriptor rational(std::vector<cplx> n, std::vector<cplx> d) {
        return desc::Rational{std::move(n), std::move(d)};
    }
    static FunctionDescriptor exp_singular(double tau) { return desc::ExpSingular{tau}; }
    static FunctionDescriptor mobius(cplx a, cplx b, cplx c, cplx d) { return desc::Mobius{a, b, c, d}; }
    static FunctionDescriptor product(std::vector<FunctionDescriptor> f) { return desc::Product{std::move(f)}; }
    static FunctionDescriptor samples(BoundaryFunction b) { return desc::Samples{std::move(b)}; }

    const variant& get() const noexcept { return v_; }

    std::string kind() const {
        return std::visit(
            [](const auto& x) -> std::string {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, desc::Constant>) return "constant";
                else if constexpr (std::is_same_v<T, desc::Rational>) return "rational";
                else if constexpr (std::is_same_v<T, desc::ExpSingular>) return "exp_singular";
                else if constexpr (std::is_same_v<T, desc::Mobius>) return "mobius_selfmap";
                else if constexpr (std::is_same_v<T, desc::Product>) return "product";
                else return "boundary_samples";
            },
            v_);
    }

    bool closed_form() const {
        if (std::holds_alternative<desc::Samples>(v_)) return false;
        if (auto p = std::get_if<desc::Product>(&v_))
            return std::all_of(p->factors.begin(), p->factors.end(), [](const auto& f) { return f.closed_form(); });
        return true;
    }

    // Value at a point of the closed disk (z = -1 excluded for singular factors).
    cplx operator()(cplx z) const {
        return std::visit(
            [z](const auto& x) -> cplx {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, desc::Constant>) {
                    return x.value;
                } else if constexpr (std::is_same_v<T, desc::Rational>) {
                    return horner(x.num, z) / horner(x.den, z);
                } else if constexpr (std::is_same_v<T, desc::ExpSingular>) {
                    if (std::abs(1.0 + z) < 1e-300) return 0.0;
                    return std::exp(-x.tau * cayley(z));
                } else if constexpr (std::is_same_v<T, desc::Mobius>) {
                    return (x.a * z + x.b) / (x.c * z + x.d);
                } else if constexpr (std::is_same_v<T, desc::Product>) {
                    cplx p = 1.0;
                    for (const auto& f : x.factors) p *= f(z);
                    return p;
                } else {
                    throw domain_error("boundary_samples descriptors have no pointwise evaluation");
                }
            },
            v_);
    }

    std::vector<cplx> operator()(std::span<const cplx> zs) const {
        std::vector<cplx> out(zs.size());
        for (std::size_t j = 0; j < zs.size(); ++j) out[j] = (*this)(zs[j]);
        return out;
    }

    // Values at the nodes of `grid`; sampled descriptors must sit on the same grid.
    std::vector<cplx> on_grid(const FrequencyGrid& grid) const {
        if (auto s = std::get_if<desc::Samples>(&v_)) {
            if (!s->data.grid.same_as(grid)) throw incompatible_grid("sampled descriptor lives on another grid");
            return s->data.values;
        }
        if (auto p = std::get_if<desc::Product>(&v_)) {
            std::vector<cplx> out(grid.size(), cplx{1.0});
            for (const auto& f : p->factors) {
                const auto v = f.on_grid(grid);
                for (std::size_t j = 0; j < out.size(); ++j) out[j] *= v[j];
            }
            return out;
        }
        return (*this)(std::span<const cplx>(grid.points()));
    }

    // Total delay carried by singular inner factors.
    double singular_delay() const {
        if (auto e = std::get_if<desc::ExpSingular>(&v_)) return e->tau;
        if (auto p = std::get_if<desc::Product>(&v_)) {
            double t = 0.0;
            for (const auto& f : p->factors) t += f.singular_delay();
            return t;
        }
        return 0.0;
    }

    bool is_identity() const {
        if (auto m = std::get_if<desc::Mobius>(&v_))
            return m->b == cplx{} && m->c == cplx{} && m->a == m->d && m->a != cplx{};
        if (auto r = std::get_if<desc::Rational>(&v_))
            return r->num.size() == 2 && r->num[0] == cplx{} && r->den.size() == 1 && r->num[1] == r->den[0] &&
                   r->den[0] != cplx{};
        return false;
    }

    bool is_constant() const {
        if (std::holds_alternative<desc::Constant>(v_)) return true;
        if (auto r = std::get_if<desc::Rational>(&v_)) return r->num.size() <= 1 && r->den.size() <= 1;
        return false;
    }

    // Power-series coefficients c_0..c_{M-1} about z = 0.
    std::vector<cplx> taylor(std::size_t M) const {
        return std::visit(
            [M](const auto& x) -> std::vector<cplx> {
                using T = std::decay_t<decltype(x)>;
                std::vector<cplx> c(M, cplx{});
                if (M == 0) return c;
                if constexpr (std::is_same_v<T, desc::Constant>) {
                    c[0] = x.value;
                } else if constexpr (std::is_same_v<T, desc::Rational>) {
                    c = series_divide(x.num, x.den, M);
                } else if constexpr (std::is_same_v<T, desc::ExpSingular>) {
                    // (1+z)^2 S' = 2 tau S
                    const double tau = x.tau;
                    c[0] = std::exp(-tau);
                    if (M > 1) c[1] = 2.0 * tau * c[0];
                    for (std::size_t n = 1; n + 1 < M; ++n) {
                        const double nn = static_cast<double>(n);
                        c[n + 1] = ((2.0 * tau - 2.0 * nn) * c[n] - (nn - 1.0) * c[n - 1]) / (nn + 1.0);
                    }
                } else if constexpr (std::is_same_v<T, desc::Mobius>) {
                    c = series_divide({x.b, x.a}, {x.d, x.c}, M);
                } else if constexpr (std::is_same_v<T, desc::Product>) {
                    c[0] = 1.0;
                    for (const auto& f : x.factors) c = series_multiply(c, f.taylor(M));
                } else {
                    c = fourier_coeffs(x.data, std::min(M, x.data.size() / 2));
                    c.resize(M, cplx{});
                }
                return c;
            },
            v_);
    }

    static cplx horner(const std::vector<cplx>& p, cplx z) {
        cplx acc = 0.0;
        for (std::size_t n = p.size(); n-- > 0;) acc = acc * z + p[n];
        return acc;
    }

    static std::vector<cplx> series_multiply(const std::vector<cplx>& a, const std::vector<cplx>& b) {
        const std::size_t M = a.size();
        std::vector<cplx> c(M, cplx{});
        for (std::size_t i = 0; i < M; ++i) {
            if (a[i] == cplx{}) continue;
            for (std::size_t j = 0; i + j < M && j < b.size(); ++j) c[i + j] += a[i] * b[j];
        }
        return c;
    }

    static std::vector<cplx> series_divide(const std::vector<cplx>& num, const std::vector<cplx>& den, std::size_t M) {
        if (den.empty() || den[0] == cplx{}) throw domain_error("rational descriptor has a pole at z = 0");
        std::vector<cplx> q(M, cplx{});
        for (std::size_t n = 0; n < M; ++n) {
            cplx s = n < num.size() ? num[n] : cplx{};
            for (std::size_t k = 1; k < den.size() && k <= n; ++k) s -= den[k] * q[n - k];
            q[n] = s / den[0];
        }
        return q;
    }

private:
    variant v_;
};

}  // namespace minphase
