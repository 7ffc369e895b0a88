#pragma once

// Text formats: CSV for sampled functions, JSON for everything structured.
// Doubles are written with 17 significant digits so that files round-trip exactly and
// identical inputs give byte-identical outputs.

#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "descriptor.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "factorization.hpp"
#include "identification.hpp"
#include "operator_model.hpp"
#include "signal.hpp"
#include "transforms.hpp"

namespace minphase::io {

using json = nlohmann::ordered_json;

inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);  // no "-0"
    return buf;
}

namespace detail {

struct Row {
    std::size_t line = 0;
    double x = 0.0;
    cplx v;
};

inline std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r' && c != ' ' && c != '\t') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline double number(const std::string& s, std::size_t line, const std::string& where) {
    if (s.empty()) throw parse_error(where + ":" + std::to_string(line) + ": empty field");
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw parse_error(where + ":" + std::to_string(line) + ": not a number: '" + s + "'");
    }
    if (pos != s.size() || !std::isfinite(v))
        throw parse_error(where + ":" + std::to_string(line) + ": not a finite number: '" + s + "'");
    return v;
}

// Three-column table with a fixed header; '#' lines before the header are returned as
// comments.
inline std::vector<Row> read_table(std::istream& in, const std::vector<std::string>& headers, const std::string& where,
                                   std::string& header, std::vector<std::string>& comments) {
    std::string line;
    std::size_t no = 0;
    bool have_header = false;
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!have_header) {
            if (line[0] == '#') {
                comments.push_back(line);
                continue;
            }
            std::string h;
            for (char c : line)
                if (c != ' ' && c != '\t') h += c;
            bool ok = false;
            for (const auto& cand : headers) ok = ok || h == cand;
            if (!ok) throw parse_error(where + ":" + std::to_string(no) + ": unexpected header '" + line + "'");
            header = h;
            have_header = true;
            continue;
        }
        const auto f = split(line);
        if (f.size() != 3)
            throw parse_error(where + ":" + std::to_string(no) + ": expected 3 fields, got " + std::to_string(f.size()));
        rows.push_back({no, number(f[0], no, where), {number(f[1], no, where), number(f[2], no, where)}});
    }
    if (!have_header) throw parse_error(where + ": empty file or missing header");
    if (rows.empty()) throw parse_error(where + ": no data rows");
    return rows;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw parse_error(path + ": cannot open for reading");
    return f;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw parse_error(path + ": cannot open for writing");
    return f;
}

}  // namespace detail

// ---- signals: t,re,im ----

inline CausalSignal read_signal_csv(std::istream& in, const std::string& where = "<signal>") {
    std::string header;
    std::vector<std::string> comments;
    const auto rows = detail::read_table(in, {"t,re,im"}, where, header, comments);
    if (rows.size() < 2) throw parse_error(where + ": a signal needs at least two samples");
    if (rows[0].x != 0.0) throw parse_error(where + ":" + std::to_string(rows[0].line) + ": first sample must be at t = 0");
    const double dt = rows[1].x - rows[0].x;
    if (!(dt > 0.0)) throw parse_error(where + ":" + std::to_string(rows[1].line) + ": t must increase");
    std::vector<cplx> v(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const double expect = static_cast<double>(k) * dt;
        if (std::abs(rows[k].x - expect) > 1e-9 * std::max(expect, dt))
            throw parse_error(where + ":" + std::to_string(rows[k].line) + ": t is not equispaced");
        v[k] = rows[k].v;
    }
    return {TimeGrid{dt, rows.size()}, std::move(v)};
}

inline CausalSignal read_signal_csv(const std::string& path) {
    auto f = detail::open_in(path);
    return read_signal_csv(f, path);
}

inline void write_signal_csv(std::ostream& out, const CausalSignal& f) {
    out << "t,re,im\n";
    for (std::size_t k = 0; k < f.size(); ++k)
        out << fmt(f.grid().t(k)) << ',' << fmt(f[k].real()) << ',' << fmt(f[k].imag()) << '\n';
}

inline void write_signal_csv(const std::string& path, const CausalSignal& f) {
    auto o = detail::open_out(path);
    write_signal_csv(o, f);
}

// ---- boundary functions: theta,re,im or y,re,im ----

inline BoundaryFunction read_boundary_csv(std::istream& in, const std::string& where = "<boundary>") {
    std::string header;
    std::vector<std::string> comments;
    const auto rows = detail::read_table(in, {"theta,re,im", "y,re,im"}, where, header, comments);
    Domain d = header[0] == 't' ? Domain::circle : Domain::axis;
    for (const auto& c : comments) {
        if (c.rfind("#domain=", 0) != 0) continue;
        const std::string tag = c.substr(8);
        const Domain tagged = tag == "circle" ? Domain::circle : Domain::axis;
        if (tag != "circle" && tag != "axis") throw parse_error(where + ": unknown domain tag '" + tag + "'");
        if (tagged != d) throw parse_error(where + ": domain tag disagrees with the column header");
    }
    std::vector<double> nodes(rows.size());
    std::vector<cplx> v(rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
        nodes[j] = rows[j].x;
        v[j] = rows[j].v;
        if (j > 0 && !(nodes[j] > nodes[j - 1]))
            throw parse_error(where + ":" + std::to_string(rows[j].line) + ": nodes must increase");
    }
    return {FrequencyGrid::from_nodes(d, std::move(nodes)), std::move(v)};
}

inline BoundaryFunction read_boundary_csv(const std::string& path) {
    auto f = detail::open_in(path);
    return read_boundary_csv(f, path);
}

inline void write_boundary_csv(std::ostream& out, const BoundaryFunction& b) {
    const bool circle = b.grid.domain() == Domain::circle;
    out << "#domain=" << (circle ? "circle" : "axis") << '\n' << (circle ? "theta,re,im\n" : "y,re,im\n");
    for (std::size_t j = 0; j < b.size(); ++j)
        out << fmt(b.grid.node(j)) << ',' << fmt(b.values[j].real()) << ',' << fmt(b.values[j].imag()) << '\n';
}

inline void write_boundary_csv(const std::string& path, const BoundaryFunction& b) {
    auto o = detail::open_out(path);
    write_boundary_csv(o, b);
}

// ---- expansions: n,re,im ----

inline std::vector<cplx> read_expansion_csv(std::istream& in, const std::string& where = "<expansion>") {
    std::string header;
    std::vector<std::string> comments;
    const auto rows = detail::read_table(in, {"n,re,im"}, where, header, comments);
    std::vector<cplx> a(rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (rows[j].x != static_cast<double>(j))
            throw parse_error(where + ":" + std::to_string(rows[j].line) + ": expected n = " + std::to_string(j));
        a[j] = rows[j].v;
    }
    return a;
}

inline void write_expansion_csv(std::ostream& out, std::span<const cplx> a) {
    out << "n,re,im\n";
    for (std::size_t n = 0; n < a.size(); ++n) out << n << ',' << fmt(a[n].real()) << ',' << fmt(a[n].imag()) << '\n';
}

// ---- JSON helpers ----

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j, const std::string& what) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw parse_error(what + ": expected a number or an [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(std::span<const cplx> v) {
    json a = json::array();
    for (const auto& z : v) a.push_back(to_json(z));
    return a;
}

inline std::vector<cplx> complex_vector_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) throw parse_error(what + ": expected an array");
    std::vector<cplx> v;
    v.reserve(j.size());
    for (const auto& x : j) v.push_back(complex_from_json(x, what));
    return v;
}

inline const json& field(const json& j, const char* key, const std::string& what) {
    if (!j.is_object() || !j.contains(key)) throw parse_error(what + ": missing field '" + key + "'");
    return j.at(key);
}

inline double number_field(const json& j, const char* key, const std::string& what) {
    const auto& v = field(j, key, what);
    if (!v.is_number()) throw parse_error(what + ": field '" + key + "' must be a number");
    return v.get<double>();
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& what) {
    if (!j.is_object()) throw parse_error(what + ": expected an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw parse_error(what + ": unknown key '" + k + "'");
}

inline json parse_json(std::istream& in, const std::string& where) {
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw parse_error(where + ": " + e.what());
    }
}

inline json read_json(const std::string& path) {
    auto f = detail::open_in(path);
    return parse_json(f, path);
}

inline void write_json(const std::string& path, const json& j) {
    auto o = detail::open_out(path);
    o << j.dump(2) << '\n';
}

// ---- frequency grids ----

inline json to_json(const FrequencyGrid& g) {
    json j;
    if (g.domain() == Domain::circle && g.full_circle()) {
        j["domain"] = "circle";
        j["n"] = g.size();
        j["offset"] = g.circle_offset();
    } else if (g.domain() == Domain::axis && g.symmetric_axis()) {
        j["domain"] = "axis";
        j["y_max"] = g.nodes().back();
        j["n"] = g.size();
    } else {
        j["domain"] = g.domain() == Domain::circle ? "circle" : "axis";
        j["nodes"] = g.nodes();
    }
    return j;
}

inline FrequencyGrid grid_from_json(const json& j, const std::string& what) {
    const auto& d = field(j, "domain", what);
    if (d != "circle" && d != "axis") throw parse_error(what + ": grid domain must be 'circle' or 'axis'");
    const Domain dom = d == "circle" ? Domain::circle : Domain::axis;
    if (j.contains("nodes")) {
        reject_unknown(j, {"domain", "nodes"}, what);
        return FrequencyGrid::from_nodes(dom, j.at("nodes").get<std::vector<double>>());
    }
    const auto n = static_cast<std::size_t>(number_field(j, "n", what));
    if (dom == Domain::circle) {
        reject_unknown(j, {"domain", "n", "offset"}, what);
        return FrequencyGrid::circle(n, j.contains("offset") ? number_field(j, "offset", what) : 0.5);
    }
    reject_unknown(j, {"domain", "n", "y_max"}, what);
    return FrequencyGrid::axis(number_field(j, "y_max", what), n);
}

// ---- function descriptors ----

inline json to_json(const FunctionDescriptor& f) {
    json j;
    j["kind"] = f.kind();
    std::visit(
        [&j](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, desc::Constant>) {
                j["value"] = to_json(x.value);
            } else if constexpr (std::is_same_v<T, desc::Rational>) {
                j["num"] = to_json(x.num);
                j["den"] = to_json(x.den);
            } else if constexpr (std::is_same_v<T, desc::ExpSingular>) {
                j["tau"] = x.tau;
            } else if constexpr (std::is_same_v<T, desc::Mobius>) {
                j["a"] = to_json(x.a);
                j["b"] = to_json(x.b);
                j["c"] = to_json(x.c);
                j["d"] = to_json(x.d);
            } else if constexpr (std::is_same_v<T, desc::Product>) {
                j["factors"] = json::array();
                for (const auto& g : x.factors) j["factors"].push_back(to_json(g));
            } else {
                j["grid"] = to_json(x.data.grid);
                j["values"] = to_json(x.data.values);
            }
        },
        f.get());
    return j;
}

// Besides the kinds written above, "identity" and "polynomial" {coeffs} are accepted.
inline FunctionDescriptor descriptor_from_json(const json& j, const std::string& what = "descriptor") {
    const auto& k = field(j, "kind", what);
    if (!k.is_string()) throw parse_error(what + ": 'kind' must be a string");
    const std::string kind = k.get<std::string>();
    if (kind == "identity") {
        reject_unknown(j, {"kind"}, what);
        return FunctionDescriptor::identity();
    }
    if (kind == "constant") {
        reject_unknown(j, {"kind", "value"}, what);
        return FunctionDescriptor::constant(complex_from_json(field(j, "value", what), what));
    }
    if (kind == "polynomial") {
        reject_unknown(j, {"kind", "coeffs"}, what);
        return FunctionDescriptor::polynomial(complex_vector_from_json(field(j, "coeffs", what), what));
    }
    if (kind == "rational") {
        reject_unknown(j, {"kind", "num", "den"}, what);
        auto num = complex_vector_from_json(field(j, "num", what), what);
        auto den = complex_vector_from_json(field(j, "den", what), what);
        if (num.empty() || den.empty()) throw parse_error(what + ": empty coefficient list");
        if (den[0] == cplx{}) throw domain_error(what + ": denominator vanishes at z = 0");
        return FunctionDescriptor::rational(std::move(num), std::move(den));
    }
    if (kind == "exp_singular") {
        reject_unknown(j, {"kind", "tau"}, what);
        const double tau = number_field(j, "tau", what);
        if (tau < 0.0) throw domain_error(what + ": tau must be nonnegative");
        return FunctionDescriptor::exp_singular(tau);
    }
    if (kind == "mobius_selfmap") {
        reject_unknown(j, {"kind", "a", "b", "c", "d"}, what);
        const cplx a = complex_from_json(field(j, "a", what), what), b = complex_from_json(field(j, "b", what), what);
        const cplx c = complex_from_json(field(j, "c", what), what), d = complex_from_json(field(j, "d", what), what);
        if (a * d - b * c == cplx{}) throw domain_error(what + ": degenerate Mobius map");
        if (d == cplx{}) throw domain_error(what + ": Mobius map has a pole at z = 0");
        return FunctionDescriptor::mobius(a, b, c, d);
    }
    if (kind == "product") {
        reject_unknown(j, {"kind", "factors"}, what);
        const auto& fs = field(j, "factors", what);
        if (!fs.is_array()) throw parse_error(what + ": 'factors' must be an array");
        std::vector<FunctionDescriptor> out;
        for (std::size_t i = 0; i < fs.size(); ++i)
            out.push_back(descriptor_from_json(fs[i], what + ".factors[" + std::to_string(i) + "]"));
        return FunctionDescriptor::product(std::move(out));
    }
    if (kind == "boundary_samples") {
        reject_unknown(j, {"kind", "grid", "values"}, what);
        auto g = grid_from_json(field(j, "grid", what), what + ".grid");
        auto v = complex_vector_from_json(field(j, "values", what), what);
        if (v.size() != g.size()) throw incompatible_grid(what + ": value count does not match the grid");
        return FunctionDescriptor::samples(BoundaryFunction(std::move(g), std::move(v)));
    }
    throw parse_error(what + ": unknown kind '" + kind + "'");
}

// ---- configuration ----

inline json to_json(const RunConfig& c) {
    json j;
    j["grid"] = {{"dt", c.grid.dt},         {"t_max", c.grid.t_max},          {"y_max", c.grid.y_max},
                 {"n_freq", c.grid.n_freq}, {"n_circle", c.grid.n_circle}};
    j["tolerances"] = {{"selfmap", c.tol.selfmap},
                       {"division_floor", c.tol.division_floor},
                       {"ill_fraction", c.tol.ill_fraction},
                       {"plain_delay", c.tol.plain_delay},
                       {"classify", c.tol.classify},
                       {"factor_residual", c.tol.factor_residual},
                       {"series_radius", c.tol.series_radius}};
    return j;
}

// Overrides on top of the defaults; unknown keys are an error.
inline RunConfig config_from_json(const json& j, const std::string& what = "config") {
    RunConfig c;
    reject_unknown(j, {"grid", "tolerances"}, what);
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        const std::string w = what + ".grid";
        reject_unknown(g, {"dt", "t_max", "y_max", "n_freq", "n_circle"}, w);
        if (g.contains("dt")) c.grid.dt = number_field(g, "dt", w);
        if (g.contains("t_max")) c.grid.t_max = number_field(g, "t_max", w);
        if (g.contains("y_max")) c.grid.y_max = number_field(g, "y_max", w);
        if (g.contains("n_freq")) c.grid.n_freq = static_cast<std::size_t>(number_field(g, "n_freq", w));
        if (g.contains("n_circle")) c.grid.n_circle = static_cast<std::size_t>(number_field(g, "n_circle", w));
    }
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        const std::string w = what + ".tolerances";
        reject_unknown(t, {"selfmap", "division_floor", "ill_fraction", "plain_delay", "classify", "factor_residual",
                           "series_radius"},
                       w);
        const auto set = [&](const char* k, double& dst) {
            if (!t.contains(k)) return;
            dst = number_field(t, k, w);
            if (!(dst > 0.0)) throw domain_error(w + ": '" + k + "' must be positive");
        };
        set("selfmap", c.tol.selfmap);
        set("division_floor", c.tol.division_floor);
        set("ill_fraction", c.tol.ill_fraction);
        set("plain_delay", c.tol.plain_delay);
        set("classify", c.tol.classify);
        set("factor_residual", c.tol.factor_residual);
        set("series_radius", c.tol.series_radius);
        if (c.tol.series_radius >= 1.0) throw domain_error(w + ": series_radius must be below 1");
    }
    c.grid.time();  // validates dt / t_max
    if (c.grid.n_freq < 64 || c.grid.n_circle < 64 || !(c.grid.y_max > 0.0))
        throw domain_error(what + ": grid sizes must be at least 64 and y_max positive");
    return c;
}

inline RunConfig read_config(const std::string& path) { return config_from_json(read_json(path), path); }

// ---- results ----

inline json to_json(const ValidationReport& r) {
    json j;
    j["ok"] = r.ok();
    j["self_map"] = r.self_map;
    j["selfmap_excess"] = r.selfmap_excess;
    j["psi_zero_free"] = r.psi_zero_free;
    j["psi_delay"] = r.psi_delay;
    j["psi_deviation"] = std::isfinite(r.psi_deviation) ? json(r.psi_deviation) : json(nullptr);
    j["psi_norm"] = r.psi_norm;
    j["preserving"] = r.preserving_verified ? "verified" : "unverified-preserving";
    j["message"] = r.message;
    return j;
}

inline json to_json(const IdentificationDiagnostics& d) {
    return {{"floored_nodes", d.floored_nodes},
            {"selfmap_excess", d.selfmap_excess},
            {"estimated_delay", d.estimated_delay},
            {"rank_one", d.rank_one},
            {"plain_violation", d.plain_violation}};
}

inline json factorization_json(const FactorizationResult& r, const std::string& outer_csv, const std::string& inner_csv) {
    return {{"tau", r.tau},
            {"residual", r.residual},
            {"inner_modulus_deviation", r.inner_modulus_deviation},
            {"outer_csv_path", outer_csv},
            {"inner_csv_path", inner_csv}};
}

// ---- operators ----
//
// Disk form:       alpha = {kind: "psi", data: <descriptor>}, xi = {kind: "phi", data: <descriptor>}.
// Half-plane form: alpha, xi = {kind: "boundary_samples", data: [[re, im], ...]} on grid.axis,
//                  optionally with disk samples psi, phi at the pulled-back nodes.
// delay is the shift applied by the inverse transform.

inline json to_json(const OperatorModel& op, const RunConfig& cfg, const ValidationReport* validation = nullptr) {
    json j;
    j["form"] = to_string(op.form());
    j["delay"] = op.delay();
    if (op.samples()) {
        const auto& s = *op.samples();
        j["alpha"] = {{"kind", "boundary_samples"}, {"data", to_json(s.alpha)}};
        j["xi"] = {{"kind", "boundary_samples"}, {"data", to_json(s.xi)}};
        if (!s.phi.empty()) j["disk"] = {{"psi", to_json(s.psi)}, {"phi", to_json(s.phi)}};
        j["grid"] = {{"axis", to_json(s.axis)}};
    } else {
        j["alpha"] = {{"kind", "psi"}, {"data", to_json(*op.psi())}};
        j["xi"] = {{"kind", "phi"}, {"data", to_json(*op.phi())}};
        j["grid"] = json::object();
    }
    j["grid"]["time"] = {{"dt", cfg.grid.dt}, {"t_max", cfg.grid.t_max}};
    if (validation) j["validation"] = to_json(*validation);
    return j;
}

inline OperatorModel operator_from_json(const json& j, const std::string& what = "operator") {
    reject_unknown(j, {"form", "delay", "alpha", "xi", "disk", "grid", "validation", "diagnostics"}, what);
    const auto& form = field(j, "form", what);
    const auto& alpha = field(j, "alpha", what);
    const auto& xi = field(j, "xi", what);
    if (form == "disk") {
        if (field(alpha, "kind", what + ".alpha") != "psi" || field(xi, "kind", what + ".xi") != "phi")
            throw parse_error(what + ": disk form expects alpha.kind = 'psi' and xi.kind = 'phi'");
        auto op = OperatorModel::synthesize(descriptor_from_json(field(alpha, "data", what), what + ".alpha.data"),
                                            descriptor_from_json(field(xi, "data", what), what + ".xi.data"));
        if (j.contains("delay") && std::abs(number_field(j, "delay", what) - op.delay()) > 1e-12)
            throw parse_error(what + ": delay disagrees with the singular factors of psi");
        return op;
    }
    if (form != "half_plane") throw parse_error(what + ": form must be 'disk' or 'half_plane'");
    SampledSymbols s;
    s.axis = grid_from_json(field(field(j, "grid", what), "axis", what), what + ".grid.axis");
    if (s.axis.domain() != Domain::axis) throw parse_error(what + ": grid.axis must be an axis grid");
    s.alpha = complex_vector_from_json(field(alpha, "data", what), what + ".alpha.data");
    s.xi = complex_vector_from_json(field(xi, "data", what), what + ".xi.data");
    if (j.contains("disk")) {
        s.psi = complex_vector_from_json(field(j.at("disk"), "psi", what), what + ".disk.psi");
        s.phi = complex_vector_from_json(field(j.at("disk"), "phi", what), what + ".disk.phi");
        if (s.psi.size() != s.axis.size() || s.phi.size() != s.axis.size())
            throw incompatible_grid(what + ": disk samples do not match the axis grid");
    }
    const double delay = j.contains("delay") ? number_field(j, "delay", what) : 0.0;
    if (delay < 0.0) throw domain_error(what + ": delay must be nonnegative");
    return OperatorModel::from_samples(std::move(s), delay);
}

inline OperatorModel read_operator(const std::string& path) { return operator_from_json(read_json(path), path); }

// ---- experiments ----
//
// {"operators": [{"name", "psi", "phi"}], "signals": [names], "probe_sets": ["sigma", "rho"],
//  "mode": "translated" | "plain", "tolerance": 1e-3}; every key is optional.

inline ExperimentSpec experiment_from_json(const json& j, const std::string& what = "family") {
    reject_unknown(j, {"operators", "signals", "probe_sets", "mode", "tolerance"}, what);
    ExperimentSpec s;
    if (j.contains("operators")) {
        const auto& ops = j.at("operators");
        if (!ops.is_array()) throw parse_error(what + ": 'operators' must be an array");
        for (std::size_t i = 0; i < ops.size(); ++i) {
            const std::string w = what + ".operators[" + std::to_string(i) + "]";
            reject_unknown(ops[i], {"name", "psi", "phi"}, w);
            FamilyMember m;
            m.name = ops[i].contains("name") ? ops[i].at("name").get<std::string>() : "op" + std::to_string(i);
            // a malformed descriptor becomes an itemized failure in the table, not a parse error
            try {
                m.psi = descriptor_from_json(field(ops[i], "psi", w), w + ".psi");
                m.phi = descriptor_from_json(field(ops[i], "phi", w), w + ".phi");
            } catch (const input_error& e) {
                s.invalid.push_back({m.name, e.what()});
                continue;
            }
            s.family.push_back(std::move(m));
        }
    }
    if (j.contains("signals")) {
        s.signals.clear();
        for (const auto& n : j.at("signals")) {
            const auto name = n.get<std::string>();
            named_signal(name, TimeGrid{1.0, 2});  // rejects unknown names early
            s.signals.push_back(name);
        }
    }
    if (j.contains("probe_sets")) {
        s.probe_sets.clear();
        for (const auto& p : j.at("probe_sets")) {
            if (p == "sigma") s.probe_sets.push_back(ProbeSet::sigma);
            else if (p == "rho") s.probe_sets.push_back(ProbeSet::rho);
            else throw parse_error(what + ": probe set must be 'sigma' or 'rho'");
        }
    }
    if (j.contains("mode")) {
        const auto& m = j.at("mode");
        if (m == "translated") s.mode = IdentifyMode::translated;
        else if (m == "plain") s.mode = IdentifyMode::plain;
        else throw parse_error(what + ": mode must be 'translated' or 'plain'");
    }
    if (j.contains("tolerance")) s.tolerance = number_field(j, "tolerance", what);
    return s;
}

inline void write_experiment_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
    out << "operator,probe_set,signal,error,status\n";
    for (const auto& r : rows) {
        std::string status = r.status;
        for (auto& c : status)
            if (c == ',' || c == '\n') c = ';';
        out << r.op << ',' << to_string(r.probes) << ',' << r.signal << ',' << (std::isnan(r.error) ? "" : fmt(r.error))
            << ',' << status << '\n';
    }
}

}  // namespace minphase::io
