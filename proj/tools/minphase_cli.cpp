// minphase: command-line front end.
//
// Exit codes: 0 success, 1 the mathematics refused (validation), 2 bad input or usage.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "minphase/minphase.hpp"

namespace fs = std::filesystem;
using namespace minphase;
using io::json;

namespace {

struct Common {
    std::string config;
    std::string out;
    RunConfig cfg;

    void load() {
        if (!config.empty()) cfg = io::read_config(config);
    }
};

void emit_json(const json& j, const std::string& out) {
    if (out.empty()) std::cout << j.dump(2) << '\n';
    else io::write_json(out, j);
}

void emit_signal(const CausalSignal& f, const std::string& out) {
    if (out.empty()) io::write_signal_csv(std::cout, f);
    else io::write_signal_csv(out, f);
}

void require_grid(const CausalSignal& f, const RunConfig& cfg, const std::string& what) {
    if (!(f.grid() == cfg.grid.time()))
        throw incompatible_grid(what + ": sample grid (dt " + io::fmt(f.grid().dt) + ", " + std::to_string(f.size()) +
                                " samples) differs from the configured grid; pass a matching --config");
}

// "<out>.<suffix>" with a trailing ".json" dropped, or "<input stem>.<suffix>" next to the input
std::string sibling(const std::string& out, const std::string& input, const std::string& suffix) {
    fs::path base = out.empty() ? fs::path(input) : fs::path(out);
    if (base.extension() == ".json" || base.extension() == ".csv") base.replace_extension();
    return base.string() + "." + suffix;
}

int cmd_classify(const Common& c, const std::string& path) {
    const auto f = io::read_signal_csv(path);
    ClassifyOptions o;
    o.n_circle = c.cfg.grid.n_circle;
    o.tol = c.cfg.tol.classify;
    const auto pc = classify(f, o);
    json j;
    j["class"] = to_string(pc.kind);
    j["tau"] = pc.tau;
    j["residuals"] = {{"deviation", std::isfinite(pc.deviation) ? json(pc.deviation) : json(nullptr)},
                      {"tolerance", o.tol}};
    emit_json(j, c.out);
    return 0;
}

int cmd_factor(const Common& c, const std::string& path) {
    // a signal is factorized through its circle boundary values; a boundary CSV directly
    std::ifstream probe(path);
    if (!probe) throw parse_error(path + ": cannot open for reading");
    std::string first;
    while (std::getline(probe, first) && (first.empty() || first[0] == '#')) {}
    probe.close();
    FactorizationResult r;
    if (first.rfind("t,", 0) == 0) {
        const auto f = io::read_signal_csv(path);
        const auto grid = c.cfg.grid.circle();
        const cplx zero = 0.0;
        r = factorize(h_transform(f, grid), h_transform_at(f, std::span<const cplx>(&zero, 1))[0]);
    } else {
        const auto G = io::read_boundary_csv(path);
        if (!G.grid.full_circle()) throw incompatible_grid(path + ": factorization needs a uniform full-circle grid");
        r = factorize(G);
    }
    const auto outer_csv = sibling(c.out, path, "outer.csv"), inner_csv = sibling(c.out, path, "inner.csv");
    io::write_boundary_csv(outer_csv, r.outer.values);
    io::write_boundary_csv(inner_csv, r.inner);
    emit_json(io::factorization_json(r, outer_csv, inner_csv), c.out);
    return r.residual <= c.cfg.tol.factor_residual * std::max(1.0, r.outer.center()) ? 0 : 1;
}

int cmd_synth(const Common& c, const std::string& path) {
    const auto j = io::read_json(path);
    io::reject_unknown(j, {"psi", "phi"}, path);
    const auto op = OperatorModel::synthesize(io::descriptor_from_json(io::field(j, "psi", path), path + ".psi"),
                                              io::descriptor_from_json(io::field(j, "phi", path), path + ".phi"));
    const auto v = validate(op, c.cfg);
    emit_json(io::to_json(op, c.cfg, &v), c.out);
    if (!v.ok()) std::cerr << "minphase: validation failed: " << v.message << '\n';
    return v.ok() ? 0 : 1;
}

int cmd_identify(const Common& c, const std::string& r0, const std::string& r1, const std::string& set,
                 const std::string& mode, const std::string& diagnostics) {
    ProbeResponsePair p;
    p.probes = set == "rho" ? ProbeSet::rho : ProbeSet::sigma;
    p.response0 = io::read_signal_csv(r0);
    p.response1 = io::read_signal_csv(r1);
    require_grid(p.response0, c.cfg, r0);
    require_grid(p.response1, c.cfg, r1);
    const auto m = mode == "plain" ? IdentifyMode::plain : IdentifyMode::translated;
    const auto id = identify(p, c.cfg, m);
    const auto v = validate(id.op, c.cfg);
    auto j = io::to_json(id.op, c.cfg, &v);
    json d = io::to_json(id.diag);
    d["probe_set"] = to_string(id.probes);
    d["mode"] = to_string(id.mode);
    j["diagnostics"] = d;
    emit_json(j, c.out);
    if (!diagnostics.empty()) io::write_json(diagnostics, d);
    if (id.diag.plain_violation) {
        std::cerr << "minphase: plain mode but the responses carry a delay of " << io::fmt(id.diag.estimated_delay)
                  << '\n';
        return 1;
    }
    return v.ok() ? 0 : 1;
}

int cmd_apply(const Common& c, const std::string& op_path, const std::string& sig_path, const std::string& route) {
    const auto op = io::read_operator(op_path);
    const auto f = io::read_signal_csv(sig_path);
    require_grid(f, c.cfg, sig_path);
    emit_signal(route == "disk" ? apply_disk_route(op, f, c.cfg) : apply(op, f, c.cfg), c.out);
    return 0;
}

int cmd_experiment(const Common& c, const std::string& path) {
    ExperimentSpec spec;
    if (path.empty()) spec.family = default_family();
    else spec = io::experiment_from_json(io::read_json(path), path);
    const auto rows = run_experiment(spec, c.cfg);
    if (c.out.empty()) {
        io::write_experiment_csv(std::cout, rows);
    } else {
        std::ofstream o(c.out, std::ios::binary);
        if (!o) throw parse_error(c.out + ": cannot open for writing");
        io::write_experiment_csv(o, rows);
    }
    for (const auto& r : rows)
        if (r.status != "ok") return 1;
    return 0;
}

int cmd_signal(const Common& c, const std::string& name, double delay) {
    auto f = named_signal(name, c.cfg.grid.time());
    if (delay != 0.0) f = translate(f, delay);
    emit_signal(f, c.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimum-phase signals and the operators that preserve them"};
    app.require_subcommand(1);
    Common c;
    const auto common = [&c](CLI::App* s, const char* out_help) {
        s->add_option("--config", c.config, "JSON overriding grid and tolerance defaults")->check(CLI::ExistingFile);
        s->add_option("--out", c.out, out_help);
    };

    std::string a, b, set = "sigma", mode = "translated", diagnostics, route = "halfplane";
    double delay = 0.0;

    auto* classify_cmd = app.add_subcommand("classify", "minimum phase, translated minimum phase, or other");
    classify_cmd->add_option("signal", a, "signal CSV (t,re,im)")->required();
    common(classify_cmd, "report JSON (default: stdout)");

    auto* factor_cmd = app.add_subcommand("factor", "inner-outer factorization on the circle grid");
    factor_cmd->add_option("input", a, "signal CSV or circle boundary CSV")->required();
    common(factor_cmd, "result JSON (default: stdout); outer/inner CSVs are written beside it");

    auto* synth_cmd = app.add_subcommand("synth", "build an operator from psi and phi descriptors");
    synth_cmd->add_option("symbols", a, "JSON {psi, phi}")->required();
    common(synth_cmd, "operator JSON (default: stdout)");

    auto* identify_cmd = app.add_subcommand("identify", "recover an operator from two probe responses");
    identify_cmd->add_option("response0", a, "response to sigma0 or rho0")->required();
    identify_cmd->add_option("response1", b, "response to sigma1 or rho1")->required();
    identify_cmd->add_option("--probe-set", set, "sigma or rho")->check(CLI::IsMember({"sigma", "rho"}));
    identify_cmd->add_option("--mode", mode, "translated or plain")->check(CLI::IsMember({"translated", "plain"}));
    identify_cmd->add_option("--diagnostics", diagnostics, "also write the diagnostics JSON here");
    common(identify_cmd, "operator JSON (default: stdout)");

    auto* apply_cmd = app.add_subcommand("apply", "apply an operator to a signal");
    apply_cmd->add_option("operator", a, "operator JSON")->required();
    apply_cmd->add_option("signal", b, "signal CSV")->required();
    apply_cmd->add_option("--route", route, "halfplane or disk")->check(CLI::IsMember({"halfplane", "disk"}));
    common(apply_cmd, "output signal CSV (default: stdout)");

    auto* experiment_cmd = app.add_subcommand("experiment", "synthesize, probe, identify and cross-validate a family");
    experiment_cmd->add_option("family", a, "family JSON (default: the built-in 3 x 3 family)");
    common(experiment_cmd, "error table CSV (default: stdout)");

    auto* signal_cmd = app.add_subcommand("signal", "write a named signal on the configured grid");
    signal_cmd->add_option("name", a, "sigma0 sigma1 rho0 rho1 exp2 t_exp exp_sin t2_exp")->required();
    signal_cmd->add_option("--delay", delay, "translate by this many seconds (a multiple of dt)");
    common(signal_cmd, "signal CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        c.load();
        if (*classify_cmd) return cmd_classify(c, a);
        if (*factor_cmd) return cmd_factor(c, a);
        if (*synth_cmd) return cmd_synth(c, a);
        if (*identify_cmd) return cmd_identify(c, a, b, set, mode, diagnostics);
        if (*apply_cmd) return cmd_apply(c, a, b, route);
        if (*experiment_cmd) return cmd_experiment(c, a);
        if (*signal_cmd) return cmd_signal(c, a, delay);
    } catch (const minphase::error& e) {
        std::cerr << "minphase: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "minphase: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
