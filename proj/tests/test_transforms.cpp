#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "minphase/config.hpp"
#include "minphase/transforms.hpp"

using namespace minphase;

namespace {

const TimeGrid grid{};

cplx L_sigma0(cplx w) { return w / (sqrt_2pi * (1.0 + w) * (1.0 + w)); }
cplx L_sigma1(cplx w) { return 1.0 / (sqrt_2pi * (1.0 + w) * (1.0 + w)); }

// (L e^{-t} sin t)(0.3 + 2i), arbitrary-precision quadrature
const cplx L_exp_sin_ref(-0.0181740356768086363, -0.0721412103201564167);

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Cayley, IsAnInvolutionMappingAxisToCircle) {
    for (double y : {-100.0, -1.0, 0.0, 0.3, 7.0}) {
        const cplx z = cayley(cplx(0.0, y));
        EXPECT_NEAR(std::abs(z), 1.0, 1e-14);
        EXPECT_NEAR(std::abs(cayley(z) - cplx(0.0, y)), 0.0, 1e-12 * std::max(1.0, y * y));
        // orientation: z = exp(i theta) with y = -tan(theta / 2)
        EXPECT_NEAR(-std::tan(0.5 * std::arg(z)), y, 1e-12 * std::max(1.0, std::abs(y)));
    }
    EXPECT_NEAR(std::abs(cayley(0.5) - 1.0 / 3.0), 0.0, 1e-16);
}

TEST(FrequencyGrid, AxisAndCircle) {
    const auto a = FrequencyGrid::axis(512.0, 65536);
    EXPECT_TRUE(a.symmetric_axis());
    EXPECT_DOUBLE_EQ(a.node(0), -512.0);
    EXPECT_DOUBLE_EQ(a.nodes().back(), 512.0);
    const auto c = FrequencyGrid::circle(16);
    EXPECT_TRUE(c.full_circle());
    EXPECT_NEAR(c.node(0), pi / 16.0, 1e-15);
    for (double th : c.nodes()) EXPECT_GT(std::abs(th - pi), 1e-3);  // z = -1 is never a node
}

TEST(Laplace, ProbeClosedForms) {
    const std::vector<cplx> ws{0.0, 1.0, cplx(1.0, 1.0), cplx(0.0, 3.0), cplx(0.0, -40.0), cplx(2.5, -0.7)};
    const auto a = laplace(sigma0(grid), ws), b = laplace(sigma1(grid), ws);
    for (std::size_t j = 0; j < ws.size(); ++j) {
        if (ws[j] != 0.0) {
            EXPECT_LT(rel(a[j], L_sigma0(ws[j])), 1e-8) << ws[j];
        }
        EXPECT_LT(rel(b[j], L_sigma1(ws[j])), 1e-8) << ws[j];
    }
    EXPECT_LT(std::abs(a[0]), 1e-10);  // L sigma0 vanishes at the origin
}

TEST(Laplace, FrozenOscillatorySignal) {
    const auto f = CausalSignal::sample(grid, [](double t) { return std::exp(-t) * std::sin(t); });
    EXPECT_LT(rel(laplace(f, cplx(0.3, 2.0)), L_exp_sin_ref), 1e-9);
}

TEST(Laplace, ZeroAndDomain) {
    const auto zero = CausalSignal::sample(grid, [](double) { return 0.0; });
    EXPECT_EQ(laplace(zero, cplx(0.5, 1.0)), cplx(0.0));
    EXPECT_THROW(laplace(rho0(grid), cplx(-0.1, 0.0)), domain_error);
}

TEST(Laplace, AxisAgreesWithPointwise) {
    const auto axis = FrequencyGrid::axis(64.0, 1025);
    const auto f = CausalSignal::sample(grid, [](double t) { return t * t * std::exp(-t) + cplx(0.0, 1.0) * std::exp(-3.0 * t); });
    const auto fast = laplace_axis(f, axis);
    const auto direct = laplace(f, axis.points());
    for (std::size_t j = 0; j < axis.size(); ++j) EXPECT_NEAR(std::abs(fast.values[j] - direct[j]), 0.0, 1e-11);
}

TEST(Laplace, PlancherelOnTheAxis) {
    // ||F||^2 over the whole line equals ||f||^2; the |y| > Y tail of |F|^2 ~ 1/(2 pi y^2) is added back
    RunConfig cfg;
    const auto axis = cfg.grid.axis();
    for (const auto& f : {rho0(grid), sigma1(grid)}) {
        const auto F = laplace_axis(f, axis);
        double s = 0.0;
        for (std::size_t j = 0; j < axis.size(); ++j)
            s += std::norm(F.values[j]) * axis.step() * (j == 0 || j + 1 == axis.size() ? 0.5 : 1.0);
        const double f0 = std::norm(f[0]);
        s += 2.0 * f0 / (2.0 * pi * axis.nodes().back());
        EXPECT_NEAR(s, inner_product(f, f).real(), 1e-4);
    }
}

TEST(CayleyMaps, RhoProbesBecomeMonomials) {
    const auto axis = FrequencyGrid::axis(512.0, 4097);
    const auto G0 = cayley_to_disk(laplace_axis(rho0(grid), axis));
    const auto G1 = cayley_to_disk(laplace_axis(rho1(grid), axis));
    for (std::size_t j = 0; j < axis.size(); j += 16) {
        const cplx z = std::polar(1.0, G0.grid.node(j));
        EXPECT_NEAR(std::abs(G0.values[j] - 1.0), 0.0, 1e-8);
        EXPECT_NEAR(std::abs(G1.values[j] - z), 0.0, 1e-8);
    }
}

TEST(CayleyMaps, RoundTripIsExact) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n;
    std::vector<double> y(200);
    std::vector<cplx> v(200);
    for (std::size_t j = 0; j < y.size(); ++j) {
        y[j] = 30.0 * n(rng);
        v[j] = cplx(n(rng), n(rng));
    }
    const BoundaryFunction F(FrequencyGrid::from_nodes(Domain::axis, y), v);
    const auto back = cayley_to_axis(cayley_to_disk(F));
    for (std::size_t j = 0; j < y.size(); ++j) {
        EXPECT_NEAR(back.grid.node(j), y[j], 1e-12 * std::max(1.0, y[j] * y[j]));
        EXPECT_NEAR(std::abs(back.values[j] - v[j]), 0.0, 1e-12 * std::abs(v[j]));
    }
    EXPECT_THROW(cayley_to_axis(F), incompatible_grid);
}

TEST(HTransform, ProbeIdentities) {
    const auto c = FrequencyGrid::circle(256);
    const auto G0 = h_transform(rho0(grid), c), G1 = h_transform(rho1(grid), c);
    for (std::size_t j = 0; j < c.size(); ++j) {
        EXPECT_NEAR(std::abs(G0.values[j] - 1.0), 0.0, 1e-8);
        EXPECT_NEAR(std::abs(G1.values[j] - c.point(j)), 0.0, 1e-8);
    }
}

TEST(HTransform, InteriorClosedForm) {
    // H e^{-2t} = sqrt(2) / (3 + z)
    const auto f = CausalSignal::sample(grid, [](double t) { return std::exp(-2.0 * t); });
    const std::vector<cplx> zs{0.0, 0.5, cplx(-0.3, 0.6), cplx(0.0, -0.99)};
    const auto v = h_transform_at(f, zs);
    for (std::size_t j = 0; j < zs.size(); ++j) EXPECT_LT(rel(v[j], std::sqrt(2.0) / (3.0 + zs[j])), 1e-10);
    const cplx outside = 1.2;
    EXPECT_THROW(h_transform_at(f, std::span<const cplx>(&outside, 1)), domain_error);
}

TEST(HTransform, AgreesWithCayleyOfLaplace) {
    const auto axis = FrequencyGrid::axis(200.0, 2001);
    const auto s0 = sigma0(grid);
    const auto viaL = cayley_to_disk(laplace_axis(s0, axis));
    std::vector<cplx> zs(axis.size());
    for (std::size_t j = 0; j < zs.size(); ++j) zs[j] = std::polar(1.0, viaL.grid.node(j));
    const auto direct = h_transform_at(s0, zs);
    for (std::size_t j = 0; j < zs.size(); ++j) EXPECT_NEAR(std::abs(direct[j] - viaL.values[j]), 0.0, 1e-6);
}

TEST(FourierCoeffs, Elementary) {
    const auto c = FrequencyGrid::circle(64);
    std::vector<cplx> one(64, 1.0), z(64);
    for (std::size_t j = 0; j < 64; ++j) z[j] = c.point(j);
    const auto a = fourier_coeffs({c, one}, 32), b = fourier_coeffs({c, z}, 32);
    for (std::size_t n = 0; n < 32; ++n) {
        EXPECT_NEAR(std::abs(a[n] - (n == 0 ? 1.0 : 0.0)), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(b[n] - (n == 1 ? 1.0 : 0.0)), 0.0, 1e-14);
    }
    EXPECT_THROW(fourier_coeffs({c, one}, 33), resolution_error);
}

TEST(FourierCoeffs, GeometricSeries) {
    const auto c = FrequencyGrid::circle(256);
    std::vector<cplx> g(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) g[j] = 1.0 / (1.0 - 0.5 * c.point(j));
    const auto a = fourier_coeffs({c, g}, 21);
    for (std::size_t n = 0; n <= 20; ++n) EXPECT_LT(rel(a[n], std::pow(0.5, n)), 1e-10) << n;
}

TEST(FourierCoeffs, BasisImagesAreUnitVectors) {
    const auto c = FrequencyGrid::circle(1024);
    for (int m = 0; m <= 8; ++m) {
        const auto f = CausalSignal::sample(grid, [m](double t) {
            double l0 = 1.0, l1 = 1.0 - 2.0 * t, l = m == 0 ? l0 : l1;
            for (int k = 1; k < m; ++k) {
                l = ((2.0 * k + 1.0 - 2.0 * t) * l1 - k * l0) / (k + 1.0);
                l0 = l1;
                l1 = l;
            }
            return (m % 2 ? -1.0 : 1.0) * std::sqrt(2.0) * std::exp(-t) * l;
        });
        const auto a = fourier_coeffs(h_transform(f, c), 16);
        for (int n = 0; n < 16; ++n) EXPECT_NEAR(std::abs(a[n] - (n == m ? 1.0 : 0.0)), 0.0, 1e-6) << m << " " << n;
    }
}

TEST(ZTransform, Evaluation) {
    std::vector<cplx> geo(80);
    for (std::size_t n = 0; n < geo.size(); ++n) geo[n] = std::pow(0.5, n);
    const std::vector<cplx> zs{0.3, cplx(0.0, 0.9)};
    const auto r = z_transform_eval(geo, zs);
    EXPECT_NEAR(std::abs(r.values[0] - 1.0 / 0.85), 0.0, 1e-14);
    EXPECT_LT(r.tail_bound, 1e-20);
    const std::vector<cplx> unit{1.0, 0.0, 0.0}, zero(5, 0.0);
    EXPECT_EQ(z_transform_eval(unit, zs).values[1], cplx(1.0));
    EXPECT_EQ(z_transform_eval(zero, zs).values[0], cplx(0.0));
    const cplx bad = 1.0;
    EXPECT_THROW(z_transform_eval(unit, std::span<const cplx>(&bad, 1)), domain_error);
}

TEST(Inverse, RecoversRho0) {
    RunConfig cfg;
    const auto axis = cfg.grid.axis();
    std::vector<cplx> F(axis.size());
    for (std::size_t j = 0; j < axis.size(); ++j) F[j] = 1.0 / (sqrt_pi * (1.0 + axis.point(j)));
    const auto f = inverse_laplace_boundary({axis, F}, grid);
    const auto r = rho0(grid);
    double e = 0.0;
    for (std::size_t k = 0; k < grid.n; ++k) e = std::max(e, std::abs(f[k] - r[k]));
    EXPECT_LT(e, 1e-4);
}

TEST(Inverse, ZeroAndRoundTrip) {
    RunConfig cfg;
    const auto axis = cfg.grid.axis();
    const auto zero = inverse_laplace_boundary({axis, std::vector<cplx>(axis.size(), 0.0)}, grid);
    for (std::size_t k = 0; k < grid.n; ++k) ASSERT_EQ(zero[k], cplx(0.0));
    const auto s1 = sigma1(grid);
    const auto back = inverse_laplace_boundary(laplace_axis(s1, axis), grid);
    EXPECT_LT(norm(back - s1) / norm(s1), 1e-4);
}

TEST(Inverse, RespectsKnownDelay) {
    RunConfig cfg;
    const auto axis = cfg.grid.axis();
    const auto f = translate(rho0(grid), 1.0);
    InverseOptions o;
    o.delay = 1.0;
    const auto back = inverse_laplace_boundary(laplace_axis(f, axis), grid, o);
    EXPECT_LT(norm(back - f) / norm(f), 1e-4);
    for (std::size_t k = 0; k < 256; ++k) ASSERT_EQ(back[k], cplx(0.0));
}

TEST(Inverse, RejectsAsymmetricGrid) {
    const auto axis = FrequencyGrid::from_nodes(Domain::axis, {0.0, 1.0, 2.0, 3.0});
    EXPECT_THROW(inverse_laplace_boundary({axis, std::vector<cplx>(4, 0.0)}, grid), incompatible_grid);
}
