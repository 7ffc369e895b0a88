#include <gtest/gtest.h>

#include <cmath>

#include "minphase/experiment.hpp"
#include "minphase/identification.hpp"

using namespace minphase;
using F = FunctionDescriptor;

namespace {

RunConfig small() {
    RunConfig c;
    c.grid.dt = 1.0 / 128.0;
    c.grid.t_max = 32.0;
    c.grid.y_max = 256.0;
    c.grid.n_freq = 16384;
    c.grid.n_circle = 1024;
    return c;
}

const RunConfig cfg = small();
const TimeGrid grid = cfg.grid.time();
constexpr double band = 64.0;

OperatorModel identity_op() { return OperatorModel::synthesize(F::constant(1.0), F::identity()); }
OperatorModel delay_op(double tau) { return OperatorModel::synthesize(F::exp_singular(tau), F::identity()); }

double sup_in_band(const std::vector<cplx>& v, const std::function<cplx(cplx)>& expected) {
    const auto axis = cfg.grid.axis();
    double e = 0.0;
    for (std::size_t j = 0; j < axis.size(); ++j)
        if (std::abs(axis.node(j)) <= band) e = std::max(e, std::abs(v[j] - expected(axis.point(j))));
    return e;
}

}  // namespace

TEST(IdentifyHalfPlane, IdentityOperator) {
    const auto id = identify(probe(identity_op(), ProbeSet::sigma, cfg), cfg);
    const auto h = id.op.half_plane(cfg.grid.axis());
    EXPECT_LT(sup_in_band(h.kappa, [](cplx) { return 1.0; }), 1e-4);
    EXPECT_LT(sup_in_band(h.xi, [](cplx w) { return w; }), 1e-4);
    EXPECT_LT(sup_in_band(h.alpha, [](cplx w) { return 1.0 / (sqrt_2pi * (1.0 + w)); }), 1e-5);
    EXPECT_EQ(id.op.delay(), 0.0);
    EXPECT_EQ(id.probes, ProbeSet::sigma);
}

TEST(IdentifyHalfPlane, PureDelay) {
    const auto id = identify(probe(delay_op(1.0), ProbeSet::sigma, cfg), cfg);
    EXPECT_NEAR(id.op.delay(), 1.0, grid.dt);
    EXPECT_NEAR(id.diag.estimated_delay, 1.0, grid.dt);
    const auto h = id.op.half_plane(cfg.grid.axis());
    EXPECT_LT(sup_in_band(h.kappa, [](cplx w) { return std::exp(-w); }), 1e-4);
    const auto s1 = sigma1(grid);
    EXPECT_LT(norm(apply(id.op, s1, cfg) - translate(s1, 1.0)) / norm(s1), 1e-3);
}

TEST(IdentifyHalfPlane, RecoversSelfMap) {
    const auto truth = OperatorModel::synthesize(F::polynomial({1.0, -0.5}), F::mobius(0.5, 0.0, 0.0, 1.0));
    const auto id = identify(probe(truth, ProbeSet::sigma, cfg), cfg);
    const auto cv = cross_validate(id.op, truth, {named_signal("exp2", grid), named_signal("t_exp", grid)}, cfg, band);
    EXPECT_LT(cv.xi_error, 1e-4);
    EXPECT_LT(cv.max_signal_error, 1e-3);
}

TEST(IdentifyHalfPlane, DelayAdds) {
    // A = T_0.25 B with B of delay 0.5
    const auto b = OperatorModel::synthesize(F::product({F::exp_singular(0.5), F::polynomial({1.0, -1.0 / 3.0})}),
                                             F::identity());
    auto p = probe(b, ProbeSet::sigma, cfg);
    p.response0 = translate(p.response0, 0.25);
    p.response1 = translate(p.response1, 0.25);
    EXPECT_NEAR(identify(p, cfg).op.delay(), 0.75, 2.0 * grid.dt);
}

TEST(IdentifyDisk, IdentityOperator) {
    const auto id = identify(probe(identity_op(), ProbeSet::rho, cfg), cfg);
    const auto axis = cfg.grid.axis();
    const auto d = id.op.disk(axis);
    double psi = 0.0, phi = 0.0;
    for (std::size_t j = 0; j < axis.size(); ++j) {
        if (std::abs(axis.node(j)) > band) continue;
        psi = std::max(psi, std::abs(d.psi[j] - 1.0));
        phi = std::max(phi, std::abs(d.phi[j] - cayley(axis.point(j))));
    }
    EXPECT_LT(psi, 1e-4);
    EXPECT_LT(phi, 1e-4);
    EXPECT_FALSE(id.diag.rank_one);
    EXPECT_EQ(id.op.delay(), 0.0);
}

TEST(IdentifyDisk, PureDelay) {
    const auto id = identify(probe(delay_op(0.5), ProbeSet::rho, cfg), cfg);
    EXPECT_NEAR(id.op.delay(), 0.5, grid.dt);
}

TEST(IdentifyDisk, RankOneIsFlagged) {
    const auto op = OperatorModel::synthesize(F::constant(1.0), F::constant(0.0));
    const auto id = identify(probe(op, ProbeSet::rho, cfg), cfg);
    EXPECT_TRUE(id.diag.rank_one);
    for (const auto& p : id.op.disk(cfg.grid.axis()).phi) ASSERT_LT(std::abs(p), 1e-6);
}

TEST(Identify, ProbeSetsAgree) {
    const auto truth = OperatorModel::synthesize(F::polynomial({1.0, -0.5}), F::mobius(1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0));
    const auto a = identify(probe(truth, ProbeSet::sigma, cfg), cfg);
    const auto b = identify(probe(truth, ProbeSet::rho, cfg), cfg);
    const auto f = named_signal("exp_sin", grid);
    EXPECT_LT(norm(apply(a.op, f, cfg) - apply(b.op, f, cfg)) / norm(f), 1e-3);
}

TEST(IdentifyPlain, IdentityPasses) {
    const auto id = identify_plain(probe(identity_op(), ProbeSet::sigma, cfg), cfg);
    EXPECT_FALSE(id.diag.plain_violation);
    EXPECT_EQ(id.op.delay(), 0.0);
    EXPECT_EQ(id.mode, IdentifyMode::plain);
}

TEST(IdentifyPlain, OuterSymbolPasses) {
    const auto op = OperatorModel::synthesize(F::polynomial({1.0, -0.5}), F::mobius(0.5, 0.0, 0.0, 1.0));
    const auto id = identify_plain(probe(op, ProbeSet::sigma, cfg), cfg);
    EXPECT_FALSE(id.diag.plain_violation);
    EXPECT_LT(id.diag.estimated_delay, 1e-3);
}

TEST(IdentifyPlain, DelayIsAViolation) {
    const auto id = identify_plain(probe(delay_op(1.0), ProbeSet::sigma, cfg), cfg);
    EXPECT_TRUE(id.diag.plain_violation);
    EXPECT_NEAR(id.diag.estimated_delay, 1.0, grid.dt);
}

TEST(Identify, Errors) {
    const auto r = rho0(grid);
    const auto zero = CausalSignal::sample(grid, [](double) { return 0.0; });
    EXPECT_THROW(identify({ProbeSet::sigma, r, zero}, cfg), ill_conditioned);
    // a smooth bump whose transform drops below the floor on most of the axis
    const auto bump = CausalSignal::sample(grid, [](double t) { return std::exp(-(t - 10.0) * (t - 10.0)); });
    EXPECT_THROW(identify({ProbeSet::sigma, r, bump}, cfg), ill_conditioned);
    const auto other = CausalSignal(TimeGrid::make(1.0 / 64.0, 32.0), std::vector<cplx>(2049, 0.0));
    EXPECT_THROW(identify({ProbeSet::sigma, r, other}, cfg), incompatible_grid);
}

TEST(Identify, SingleResponseIsNotEnough) {
    // Two operators with identical response to sigma0 but different xi
    const auto a = identity_op();
    const auto b = OperatorModel::synthesize(F::polynomial({1.5, 0.5}), F::mobius(1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0));
    const auto pa = probe(a, ProbeSet::sigma, cfg);
    auto pb = probe(b, ProbeSet::sigma, cfg);
    EXPECT_LT(norm(pa.response0 - pb.response0) / norm(pa.response0), 1e-6);
    pb.response0 = pa.response0;
    const auto axis = cfg.grid.axis();
    const auto xa = identify(pa, cfg).op.half_plane(axis).xi, xb = identify(pb, cfg).op.half_plane(axis).xi;
    double diff = 0.0;
    for (std::size_t j = 0; j < axis.size(); ++j) diff = std::max(diff, std::abs(xa[j] - xb[j]));
    EXPECT_GT(diff, 0.1);
}

TEST(CrossValidate, DetectsMismatch) {
    const auto truth = identity_op();
    const auto wrong = OperatorModel::synthesize(F::constant(1.0), F::mobius(0.5, 0.0, 0.0, 1.0));
    const auto id = identify(probe(truth, ProbeSet::sigma, cfg), cfg);
    const std::vector<CausalSignal> fs{named_signal("exp2", grid)};
    EXPECT_LT(cross_validate(id.op, truth, fs, cfg).max_signal_error, 2e-3);
    EXPECT_GT(cross_validate(id.op, wrong, fs, cfg).max_signal_error, 0.1);
}

TEST(Experiment, SmallFamily) {
    ExperimentSpec spec;
    spec.family = {{"id", F::constant(1.0), F::identity()}, {"delay", F::exp_singular(1.0), F::identity()},
                   {"bad", F::constant(1.0), F::mobius(2.0, 0.0, 0.0, 1.0)}};
    spec.signals = {"exp2", "t_exp"};
    spec.probe_sets = {ProbeSet::sigma, ProbeSet::rho};
    spec.invalid = {{"broken", "no kind"}};
    const auto rows = run_experiment(spec, cfg);
    ASSERT_EQ(rows.size(), 16u);
    for (const auto& r : rows) {
        if (r.op == "id" || r.op == "delay") EXPECT_EQ(r.status, "ok") << r.op << " " << r.signal << " " << r.error;
        else EXPECT_NE(r.status, "ok");
    }
    EXPECT_TRUE(run_experiment(ExperimentSpec{}, cfg).empty());
}
