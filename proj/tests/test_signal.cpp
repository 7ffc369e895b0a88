#include <gtest/gtest.h>

#include <cmath>

#include "minphase/signal.hpp"

using namespace minphase;

namespace {

// Reference values computed with arbitrary-precision quadrature.
constexpr double energy_sigma0 = 0.25;
constexpr double pair_sigma0_sigma1 = 0.0;  // int e^{-2t} t (1 - t) dt vanishes
constexpr double energy_exp_sin = 0.125;

const TimeGrid fine = TimeGrid::make(0.001, 40.0);
const TimeGrid coarse = TimeGrid::make(1.0 / 256.0, 40.0);

CausalSignal decay(TimeGrid g, double rate = 1.0) {
    return CausalSignal::sample(g, [rate](double t) { return std::exp(-rate * t); });
}

}  // namespace

TEST(TimeGrid, DefaultsMatchMake) {
    const auto g = TimeGrid::make(1.0 / 256.0, 40.0);
    EXPECT_EQ(g.n, 10241u);
    EXPECT_DOUBLE_EQ(g.t_max(), 40.0);
    EXPECT_TRUE(g == TimeGrid{});
}

TEST(TimeGrid, RejectsBadParameters) {
    EXPECT_THROW(TimeGrid::make(0.0, 1.0), domain_error);
    EXPECT_THROW(TimeGrid::make(-0.1, 1.0), domain_error);
    EXPECT_THROW(TimeGrid::make(0.3, 1.0), quantization_error);
}

TEST(CausalSignal, SizeMustMatchGrid) {
    EXPECT_THROW(CausalSignal(TimeGrid::make(0.5, 1.0), {1.0, 2.0}), incompatible_grid);
}

TEST(Probes, SumsAreExact) {
    const auto s0 = sigma0(coarse), s1 = sigma1(coarse), r0 = rho0(coarse), r1 = rho1(coarse);
    const auto e = decay(coarse);
    for (std::size_t k = 0; k < coarse.n; k += 97) {
        EXPECT_NEAR(std::abs(s0[k] + s1[k] - e[k]), 0.0, 1e-15);
        EXPECT_NEAR(std::abs(std::sqrt(2.0) * (s0[k] + s1[k]) - r0[k]), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(std::sqrt(2.0) * (s1[k] - s0[k]) - r1[k]), 0.0, 1e-14);
    }
}

TEST(InnerProduct, Rho0HasUnitNorm) {
    EXPECT_NEAR(inner_product(rho0(fine), rho0(fine)).real(), 1.0, 1e-6);
    EXPECT_NEAR(norm(rho0(coarse)), 1.0, 1e-6);
}

TEST(InnerProduct, ZeroAnnihilates) {
    const auto zero = CausalSignal::sample(coarse, [](double) { return 0.0; });
    EXPECT_EQ(inner_product(decay(coarse), zero), cplx(0.0));
}

TEST(InnerProduct, FrozenReferenceValues) {
    EXPECT_NEAR(std::abs(inner_product(sigma0(coarse), sigma1(coarse)) - pair_sigma0_sigma1), 0.0, 1e-8);
    EXPECT_NEAR(inner_product(sigma0(coarse), sigma0(coarse)).real(), energy_sigma0, 1e-8);
    const auto es = CausalSignal::sample(coarse, [](double t) { return std::exp(-t) * std::sin(t); });
    EXPECT_NEAR(inner_product(es, es).real(), energy_exp_sin, 1e-8);
}

TEST(InnerProduct, ConjugateSymmetricAndSesquilinear) {
    const auto f = CausalSignal::sample(coarse, [](double t) { return std::exp(cplx(-1.0, 2.0) * t); });
    const auto g = sigma1(coarse) * cplx(0.5, -1.5);
    EXPECT_NEAR(std::abs(inner_product(f, g) - std::conj(inner_product(g, f))), 0.0, 1e-15);
    const cplx a(2.0, 1.0);
    EXPECT_NEAR(std::abs(inner_product(f * a, g) - a * inner_product(f, g)), 0.0, 1e-14);
}

TEST(InnerProduct, ConvergesUnderRefinement) {
    // e^{-t} against t e^{-t}: 1/4 exactly
    double prev = 1.0;
    for (double dt : {0.25, 0.125, 0.0625}) {
        const auto g = TimeGrid::make(dt, 40.0);
        const double e = std::abs(inner_product(decay(g), sigma1(g)).real() - 0.25);
        EXPECT_LT(e, prev / 4.0);
        prev = e;
    }
}

TEST(InnerProduct, GridMismatch) {
    EXPECT_THROW(inner_product(rho0(coarse), rho0(fine)), incompatible_grid);
    EXPECT_THROW(rho0(coarse) + rho0(fine), incompatible_grid);
}

TEST(Translate, ZeroIsIdentity) {
    const auto f = sigma0(coarse);
    const auto g = translate(f, 0.0);
    for (std::size_t k = 0; k < f.size(); ++k) ASSERT_EQ(f[k], g[k]);
}

TEST(Translate, MovesPulse) {
    std::vector<cplx> v(coarse.n, 0.0);
    v[0] = 1.0;
    const auto g = translate(CausalSignal(coarse, v), 1.0);
    EXPECT_EQ(g[256], cplx(1.0));
    EXPECT_EQ(g[0], cplx(0.0));
}

TEST(Translate, PreservesNormUpToTruncation) {
    // the energy pushed past t_max is e^{-78}/2, far below rounding
    const auto f = decay(fine);
    const auto g = translate(f, 1.0);
    EXPECT_NEAR(inner_product(g, g).real(), 0.5, 1e-6);
    EXPECT_NEAR(norm(g), norm(f), 1e-12);
    // what moved past t = 1 is the tail of f
    EXPECT_NEAR(partial_energy(f, fine.t_max()) - partial_energy(f, 1.0), 0.5 * std::exp(-2.0), 1e-6);
}

TEST(Translate, ComposesExactly) {
    const auto f = sigma1(coarse);
    const auto a = translate(translate(f, 0.5), 0.25), b = translate(f, 0.75);
    for (std::size_t k = 0; k < f.size(); ++k) ASSERT_EQ(a[k], b[k]);
}

TEST(Translate, Errors) {
    EXPECT_THROW(translate(rho0(coarse), -1.0), domain_error);
    EXPECT_THROW(translate(rho0(coarse), 0.001), quantization_error);
}

TEST(PartialEnergy, EndpointsAndClosedForm) {
    const auto r = rho0(fine);
    EXPECT_EQ(partial_energy(r, 0.0), 0.0);
    EXPECT_NEAR(partial_energy(r, fine.t_max()), inner_product(r, r).real(), 1e-15);
    EXPECT_NEAR(partial_energy(r, 1.0), 1.0 - std::exp(-2.0), 1e-6);
    // between nodes
    EXPECT_NEAR(partial_energy(rho0(coarse), 0.3), 1.0 - std::exp(-0.6), 1e-6);
}

TEST(PartialEnergy, Monotone) {
    const auto f = CausalSignal::sample(coarse, [](double t) { return std::exp(-t) * std::sin(3.0 * t); });
    double prev = 0.0;
    for (double T = 0.0; T <= 40.0; T += 0.37) {
        const double e = partial_energy(f, T);
        EXPECT_GE(e, prev);
        prev = e;
    }
}

TEST(PartialEnergy, OutOfRange) {
    EXPECT_THROW(partial_energy(rho0(coarse), -0.5), domain_error);
    EXPECT_THROW(partial_energy(rho0(coarse), 41.0), domain_error);
}
