#pragma once

// Round-trip experiments: synthesize an operator, record its probe responses, identify it
// back from them and compare the two on test signals.

#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "config.hpp"
#include "descriptor.hpp"
#include "errors.hpp"
#include "identification.hpp"
#include "operator_model.hpp"
#include "signal.hpp"

namespace minphase {

// Signals known by name: the probes, the round-trip test set and a few extras.
inline CausalSignal named_signal(const std::string& name, TimeGrid g) {
    if (name == "sigma0") return sigma0(g);
    if (name == "sigma1") return sigma1(g);
    if (name == "rho0") return rho0(g);
    if (name == "rho1") return rho1(g);
    if (name == "exp2") return CausalSignal::sample(g, [](double t) { return std::exp(-2.0 * t); });
    if (name == "t_exp") return CausalSignal::sample(g, [](double t) { return t * std::exp(-t); });
    if (name == "exp_sin") return CausalSignal::sample(g, [](double t) { return std::exp(-t) * std::sin(t); });
    if (name == "t2_exp") return CausalSignal::sample(g, [](double t) { return t * t * std::exp(-t); });
    throw domain_error("unknown signal '" + name + "'");
}

inline const std::vector<std::string>& signal_names() {
    static const std::vector<std::string> n{"sigma0", "sigma1", "rho0", "rho1", "exp2", "t_exp", "exp_sin", "t2_exp"};
    return n;
}

struct FamilyMember {
    std::string name;
    FunctionDescriptor psi, phi;
};

inline constexpr double family_delay = 0.5;

// psi in {1, 1 - z/2, S_0.5 (1 - z/3)} times phi in {z, z/2, (z + 1/3)/(1 + z/3)}.
inline std::vector<FamilyMember> default_family() {
    using F = FunctionDescriptor;
    const std::vector<std::pair<std::string, F>> psis{
        {"one", F::constant(1.0)},
        {"outer", F::polynomial({1.0, -0.5})},
        {"delayed", F::product({F::exp_singular(family_delay), F::polynomial({1.0, -1.0 / 3.0})})},
    };
    const std::vector<std::pair<std::string, F>> phis{
        {"id", F::identity()},
        {"half", F::mobius(0.5, 0.0, 0.0, 1.0)},
        {"blaschke", F::mobius(1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0)},
    };
    std::vector<FamilyMember> out;
    for (const auto& [pn, p] : psis)
        for (const auto& [qn, q] : phis) out.push_back({pn + "/" + qn, p, q});
    return out;
}

inline const std::vector<std::string>& default_test_signals() {
    static const std::vector<std::string> n{"exp2", "t_exp", "exp_sin"};
    return n;
}

struct ExperimentSpec {
    std::vector<FamilyMember> family;
    std::vector<std::string> signals = default_test_signals();
    std::vector<ProbeSet> probe_sets{ProbeSet::sigma};
    IdentifyMode mode = IdentifyMode::translated;
    double tolerance = 1e-3;
    std::vector<std::pair<std::string, std::string>> invalid;  // members rejected while reading: name, reason
};

struct ExperimentRow {
    std::string op, signal;
    ProbeSet probes = ProbeSet::sigma;
    double error = 0.0;
    std::string status = "ok";  // anything else explains why no error was measured
};

// One row per operator, probe set and signal. Failures are itemized, never thrown.
inline std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec, const RunConfig& cfg = {}) {
    std::vector<ExperimentRow> rows;
    const TimeGrid g = cfg.grid.time();
    std::vector<CausalSignal> signals;
    for (const auto& s : spec.signals) signals.push_back(named_signal(s, g));
    for (const auto& [name, why] : spec.invalid)
        for (ProbeSet p : spec.probe_sets)
            for (const auto& s : spec.signals) rows.push_back({name, s, p, NAN, "invalid descriptor: " + why});
    for (const auto& m : spec.family) {
        const auto fail = [&](ProbeSet p, const std::string& why) {
            for (const auto& s : spec.signals) rows.push_back({m.name, s, p, NAN, why});
        };
        OperatorModel truth;
        std::vector<CausalSignal> expected;
        try {
            truth = OperatorModel::synthesize(m.psi, m.phi);
            const auto v = validate(truth, cfg);
            if (!v.ok()) throw not_preserving(v.message);
            for (const auto& f : signals) expected.push_back(apply(truth, f, cfg));
        } catch (const std::exception& e) {
            for (ProbeSet p : spec.probe_sets) fail(p, std::string("error: ") + e.what());
            continue;
        }
        for (ProbeSet p : spec.probe_sets) {
            try {
                const auto id = identify(probe(truth, p, cfg), cfg, spec.mode);
                for (std::size_t i = 0; i < signals.size(); ++i) {
                    const auto a = apply(id.op, signals[i], cfg);
                    const double e = norm(a - expected[i]) / norm(signals[i]);
                    rows.push_back({m.name, spec.signals[i], p, e, e < spec.tolerance ? "ok" : "above tolerance"});
                }
            } catch (const std::exception& e) {
                fail(p, std::string("error: ") + e.what());
            }
        }
    }
    return rows;
}

}  // namespace minphase
