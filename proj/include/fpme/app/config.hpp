#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpme/app/json_lines.hpp"
#include "fpme/estimates/exponents.hpp"

namespace fpme::app {

using ojson = nlohmann::ordered_json;

/// Invalid configuration, anchored to a line of the source document.
class ConfigError : public Error {
public:
    ConfigError(const std::string& source, int line, const std::string& msg)
        : Error(source + ":" + std::to_string(line) + ": " + msg), line(line)
    {
    }
    int line;
};

struct ForcingConfig {
    ForcingKind kind = ForcingKind::zero;
    double amplitude = 0.0;
    InitialData profile{};
    double decay = 1.0;

    ForcingSpec build(const DomainSpec& d) const
    {
        switch (kind) {
        case ForcingKind::zero:
            return ForcingSpec::zero();
        case ForcingKind::constant:
            return ForcingSpec::constant(amplitude);
        case ForcingKind::field:
            return ForcingSpec::field(profile.evaluate(d), amplitude);
        default:
            return ForcingSpec::time_scaled(profile.evaluate(d), amplitude, decay);
        }
    }
};

/// One requested check.  Fields that do not apply to `check` keep their
/// defaults and are not serialized.
struct Experiment {
    std::string check;
    std::vector<double> p;
    double tol = 0.0;
    double q0 = 1.0;
    double q = infinity_norm;
    FitWindow window{};
    double theta = 0.5;
    std::vector<double> masses;
    std::vector<double> k;
    double t_probe = 0.0;
    double l = 2.0;
    double slope_tol = 0.15;
    double collapse_tol = 0.10;
};

struct RunConfig {
    std::string name = "run";
    DomainSpec domain = DomainSpec::line(1.0, 128);
    ModelParams model{};
    InitialData initial{};
    ForcingConfig forcing{};
    double T = 1.0;
    SolverControls time{};
    std::vector<Experiment> experiments;
    bool plots = true;
};

inline const std::vector<std::string>& known_checks()
{
    static const std::vector<std::string> ids{"l1",    "lp_energy",    "linfty",          "smoothing",
                                              "dissipation_rate", "hs_energy", "theta", "weak_lorentz",
                                              "holder_ladder", "universal_bound", "scaling"};
    return ids;
}

namespace detail {

inline std::string preset_name(InitialPreset p)
{
    switch (p) {
    case InitialPreset::zero:
        return "zero";
    case InitialPreset::gaussian_bump:
        return "gaussian_bump";
    case InitialPreset::box:
        return "box";
    case InitialPreset::spike:
        return "spike";
    case InitialPreset::single_mode:
        return "single_mode";
    case InitialPreset::random_bandlimited:
        return "random_bandlimited";
    default:
        return "signed_dipole";
    }
}

inline std::string forcing_name(ForcingKind k)
{
    switch (k) {
    case ForcingKind::zero:
        return "zero";
    case ForcingKind::constant:
        return "constant";
    case ForcingKind::field:
        return "field";
    default:
        return "time_scaled";
    }
}

/// Reads the members of one JSON object and rejects keys nobody asked for.
class ObjectReader {
public:
    ObjectReader(const ojson& j, std::string ptr, const JsonLineIndex& lines, const std::string& source)
        : j_(j), ptr_(std::move(ptr)), lines_(lines), source_(source)
    {
        if (!j_.is_object()) {
            fail(ptr_, "expected an object");
        }
    }

    [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const
    {
        throw ConfigError(source_, lines_.line(ptr), msg);
    }

    std::string at(const std::string& key) const { return ptr_ + "/" + key; }

    const ojson* get(const std::string& key)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    double number(const std::string& key, double def)
    {
        const ojson* v = get(key);
        if (!v) {
            return def;
        }
        if (!v->is_number()) {
            fail(at(key), "'" + key + "' must be a number");
        }
        const double x = v->get<double>();
        if (!std::isfinite(x)) {
            fail(at(key), "'" + key + "' must be finite");
        }
        return x;
    }

    /// A number, or null meaning infinity.
    double number_or_inf(const std::string& key, double def)
    {
        const ojson* v = get(key);
        if (!v) {
            return def;
        }
        if (v->is_null()) {
            return infinity_norm;
        }
        if (v->is_string() && v->get<std::string>() == "inf") {
            return infinity_norm;
        }
        if (!v->is_number()) {
            fail(at(key), "'" + key + "' must be a number, \"inf\" or null");
        }
        return v->get<double>();
    }

    std::uint64_t uinteger(const std::string& key, std::uint64_t def)
    {
        const ojson* v = get(key);
        if (!v) {
            return def;
        }
        if (!v->is_number_unsigned()) {
            fail(at(key), "'" + key + "' must be a non-negative integer");
        }
        return v->get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool def)
    {
        const ojson* v = get(key);
        if (!v) {
            return def;
        }
        if (!v->is_boolean()) {
            fail(at(key), "'" + key + "' must be true or false");
        }
        return v->get<bool>();
    }

    std::string string(const std::string& key, const std::string& def, const std::vector<std::string>& allowed = {})
    {
        const ojson* v = get(key);
        if (!v) {
            return def;
        }
        if (!v->is_string()) {
            fail(at(key), "'" + key + "' must be a string");
        }
        std::string s = v->get<std::string>();
        if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
            std::string list;
            for (const auto& a : allowed) {
                list += (list.empty() ? "" : ", ") + a;
            }
            fail(at(key), "'" + key + "' must be one of: " + list);
        }
        return s;
    }

    std::vector<double> numbers(const std::string& key, const std::vector<double>& def, bool allow_empty = false)
    {
        const ojson* v = get(key);
        if (!v) {
            return def;
        }
        if (!v->is_array() || (!allow_empty && v->empty())) {
            fail(at(key), "'" + key + "' must be a non-empty array of numbers");
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            const ojson& e = (*v)[i];
            if (!e.is_number() || !std::isfinite(e.get<double>())) {
                fail(at(key) + "/" + std::to_string(i), "'" + key + "' entries must be finite numbers");
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) {
                fail(at(it.key()), "unknown key '" + it.key() + "'");
            }
        }
    }

    const JsonLineIndex& lines() const { return lines_; }
    const std::string& source() const { return source_; }

private:
    const ojson& j_;
    std::string ptr_;
    const JsonLineIndex& lines_;
    const std::string& source_;
    std::set<std::string> seen_;
};

inline InitialPreset parse_preset(const std::string& s)
{
    for (auto p : {InitialPreset::zero, InitialPreset::gaussian_bump, InitialPreset::box, InitialPreset::spike,
                   InitialPreset::single_mode, InitialPreset::random_bandlimited, InitialPreset::signed_dipole}) {
        if (preset_name(p) == s) {
            return p;
        }
    }
    throw InvalidArgument("unknown preset " + s);
}

inline InitialData read_initial(ObjectReader r, const DomainSpec& d)
{
    InitialData id;
    id.preset = parse_preset(r.string("preset", "gaussian_bump",
                                      {"zero", "gaussian_bump", "box", "spike", "single_mode", "random_bandlimited",
                                       "signed_dipole"}));
    id.amplitude = r.number("amplitude", id.amplitude);
    id.width = r.number("width", id.width);
    if (const ojson* loc = r.get("location"); loc && !loc->is_null()) {
        const auto v = r.numbers("location", {});
        if (v.size() != static_cast<std::size_t>(d.dim)) {
            r.fail(r.at("location"), "'location' needs one entry per dimension");
        }
        for (std::size_t a = 0; a < v.size(); ++a) {
            id.location[a] = v[a];
        }
    }
    id.mass = r.number("mass", id.preset == InitialPreset::spike ? 1.0 : 0.0);
    id.separation = r.number("separation", id.separation);
    if (r.get("mode")) {
        const auto v = r.numbers("mode", {});
        if (v.size() != static_cast<std::size_t>(d.dim)) {
            r.fail(r.at("mode"), "'mode' needs one entry per dimension");
        }
        for (std::size_t a = 0; a < v.size(); ++a) {
            if (v[a] < 1 || v[a] != std::floor(v[a])) {
                r.fail(r.at("mode"), "'mode' entries must be positive integers");
            }
            id.mode[a] = static_cast<std::size_t>(v[a]);
        }
    }
    id.seed = r.uinteger("seed", 0);
    r.finish();
    return id;
}

inline ojson initial_json(const InitialData& id, const DomainSpec& d)
{
    ojson j;
    j["preset"] = preset_name(id.preset);
    j["amplitude"] = id.amplitude;
    j["width"] = id.width;
    ojson loc = ojson::array();
    for (int a = 0; a < d.dim; ++a) {
        loc.push_back(std::isnan(id.location[a]) ? d.lengths[a] / 2.0 : id.location[a]);
    }
    j["location"] = loc;
    j["mass"] = id.mass;
    j["separation"] = id.separation;
    ojson mode = ojson::array();
    for (int a = 0; a < d.dim; ++a) {
        mode.push_back(id.mode[a]);
    }
    j["mode"] = mode;
    j["seed"] = id.seed;
    return j;
}

inline ojson number_or_inf_json(double v) { return std::isinf(v) ? ojson("inf") : ojson(v); }

} // namespace detail

inline Experiment read_experiment(detail::ObjectReader r, const RunConfig& cfg)
{
    Experiment e;
    const auto& ids = known_checks();
    e.check = r.string("check", "", ids);
    if (e.check.empty()) {
        r.fail(r.at("check"), "experiment needs a 'check' identifier");
    }
    const double gamma = cfg.model.gamma();
    const std::string& c = e.check;
    auto window = [&] {
        const auto w = r.numbers("window", {e.window.lo, e.window.hi});
        if (w.size() != 2 || !(w[0] > 0.0) || !(w[1] > w[0]) || w[1] > 1.0) {
            r.fail(r.at("window"), "'window' must be [lo, hi] with 0 < lo < hi <= 1");
        }
        e.window = {w[0], w[1]};
    };
    auto positive = [&](const std::vector<double>& v, const char* key) {
        for (double x : v) {
            if (!(x > 0.0)) {
                r.fail(r.at(key), std::string("'") + key + "' entries must be positive");
            }
        }
    };
    if (c == "l1") {
        e.tol = r.number("tol", 1e-4);
    } else if (c == "lp_energy") {
        e.p = r.numbers("p", {2.0, gamma + 1.0});
        for (double p : e.p) {
            if (!(p > 1.0)) {
                r.fail(r.at("p"), "'p' entries must exceed 1");
            }
        }
        e.tol = r.number("tol", 0.01);
    } else if (c == "linfty") {
        e.tol = r.number("tol", 1e-3);
    } else if (c == "smoothing" || c == "dissipation_rate") {
        e.q0 = r.number("q0", 1.0);
        e.q = r.number_or_inf("q", c == "smoothing" ? infinity_norm : 2.0);
        window();
        e.tol = r.number("tol", 0.15);
        if (e.q < e.q0 || e.q0 < 1.0 || (c == "dissipation_rate" && (std::isinf(e.q) || !(e.q > 1.0)))) {
            r.fail(r.at("q"), "'q' must satisfy q >= q0 >= 1 (finite and > 1 for dissipation_rate)");
        }
    } else if (c == "hs_energy") {
        e.tol = r.number("tol", 0.01);
    } else if (c == "theta") {
        e.theta = r.number("theta", 0.5);
        if (!(e.theta > 0.0)) {
            r.fail(r.at("theta"), "'theta' must be positive");
        }
        e.masses = r.numbers("masses", {}, true);
        positive(e.masses, "masses");
        e.tol = r.number("tol", 3.0);
    } else if (c == "weak_lorentz") {
        e.l = r.number("l", 2.0);
        if (!(e.l > 1.0)) {
            r.fail(r.at("l"), "'l' must exceed 1");
        }
    } else if (c == "holder_ladder") {
        e.p = r.numbers("p", {1.0, 2.0, 4.0, 8.0});
        for (double p : e.p) {
            if (!(p >= 1.0)) {
                r.fail(r.at("p"), "'p' entries must be at least 1");
            }
        }
        e.tol = r.number("tol", 1e-10);
    } else if (c == "universal_bound") {
        e.masses = r.numbers("masses", {1.0, 10.0, 100.0});
        positive(e.masses, "masses");
        window();
        e.slope_tol = r.number("slope_tol", 0.15);
        e.collapse_tol = r.number("collapse_tol", 0.10);
    } else if (c == "scaling") {
        e.k = r.numbers("k", {0.5, 2.0});
        positive(e.k, "k");
        e.t_probe = r.number("t_probe", cfg.T);
        if (!(e.t_probe > 0.0)) {
            r.fail(r.at("t_probe"), "'t_probe' must be positive");
        }
        e.tol = r.number("tol", 0.02);
    }
    r.finish();
    const bool forced = cfg.forcing.kind != ForcingKind::zero && cfg.forcing.amplitude != 0.0;
    if (forced && (c == "smoothing" || c == "dissipation_rate" || c == "universal_bound" || c == "scaling")) {
        r.fail(r.at("check"), "check '" + c + "' requires zero forcing");
    }
    if (c == "hs_energy" && cfg.model.m2 != 1.0) {
        r.fail(r.at("check"), "check 'hs_energy' requires m2 = 1");
    }
    if (c == "universal_bound" && !(gamma > 1.0)) {
        r.fail(r.at("check"), "check 'universal_bound' requires m1 + m2 > 1");
    }
    return e;
}

inline ojson experiment_json(const Experiment& e)
{
    ojson j;
    j["check"] = e.check;
    const std::string& c = e.check;
    auto window = [&] { j["window"] = ojson::array({e.window.lo, e.window.hi}); };
    if (c == "lp_energy" || c == "holder_ladder") {
        j["p"] = e.p;
    }
    if (c == "smoothing" || c == "dissipation_rate") {
        j["q0"] = e.q0;
        j["q"] = detail::number_or_inf_json(e.q);
        window();
    }
    if (c == "theta") {
        j["theta"] = e.theta;
        j["masses"] = e.masses;
    }
    if (c == "weak_lorentz") {
        j["l"] = e.l;
    }
    if (c == "universal_bound") {
        j["masses"] = e.masses;
        window();
        j["slope_tol"] = e.slope_tol;
        j["collapse_tol"] = e.collapse_tol;
    }
    if (c == "scaling") {
        j["k"] = e.k;
        j["t_probe"] = e.t_probe;
    }
    if (c != "weak_lorentz" && c != "universal_bound") {
        j["tol"] = e.tol;
    }
    return j;
}

/// Parses a configuration document; `source` names it in error messages.
inline RunConfig parse_config(const std::string& text, const std::string& source = "config")
{
    ojson root;
    try {
        root = ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // Byte offset -> line number.
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
        std::string msg = e.what();
        if (auto pos = msg.find("syntax error"); pos != std::string::npos) {
            msg = msg.substr(pos);
        }
        throw ConfigError(source, line, "malformed JSON: " + msg);
    }
    const JsonLineIndex lines(text);
    detail::ObjectReader top(root, "", lines, source);
    RunConfig cfg;
    cfg.name = top.string("name", cfg.name);

    // domain
    if (const ojson* dj = top.get("domain")) {
        detail::ObjectReader r(*dj, "/domain", lines, source);
        const auto dim = r.uinteger("dim", 1);
        if (dim != 1 && dim != 2) {
            r.fail(r.at("dim"), "'dim' must be 1 or 2");
        }
        const auto L = r.numbers("lengths", std::vector<double>(dim, 1.0));
        const auto n = r.numbers("n", std::vector<double>(dim, 128.0));
        if (L.size() != dim) {
            r.fail(r.at("lengths"), "'lengths' needs one entry per dimension");
        }
        if (n.size() != dim) {
            r.fail(r.at("n"), "'n' needs one entry per dimension");
        }
        for (std::size_t a = 0; a < dim; ++a) {
            if (!(L[a] > 0.0)) {
                r.fail(r.at("lengths"), "'lengths' entries must be positive");
            }
            if (!(n[a] >= 2.0) || n[a] != std::floor(n[a]) || n[a] > 1e7) {
                r.fail(r.at("n"), "'n' entries must be integers >= 2");
            }
        }
        cfg.domain = dim == 1 ? DomainSpec::line(L[0], static_cast<std::size_t>(n[0]))
                              : DomainSpec::rect(L[0], L[1], static_cast<std::size_t>(n[0]),
                                                 static_cast<std::size_t>(n[1]));
        r.finish();
    }

    // model
    if (const ojson* mj = top.get("model")) {
        detail::ObjectReader r(*mj, "/model", lines, source);
        ModelParams& p = cfg.model;
        p.m1 = r.number("m1", p.m1);
        p.m2 = r.number("m2", p.m2);
        p.s = r.number("s", p.s);
        p.delta = r.number("delta", p.delta);
        p.varpi = r.number("varpi", p.varpi);
        p.kappa1 = r.number("kappa1", p.kappa1);
        p.kappa2 = r.number("kappa2", p.kappa2);
        p.use_mollified = r.boolean("use_mollified", p.use_mollified);
        p.pressure = r.string("pressure", "exact", {"exact", "truncated"}) == "exact" ? PressureMode::exact
                                                                                     : PressureMode::truncated;
        p.eps = r.number("eps", p.eps);
        p.transport = r.boolean("transport", p.transport);
        r.finish();
        try {
            p.validate();
        } catch (const InvalidArgument& e) {
            r.fail("/model", e.what());
        }
    }

    // initial
    if (const ojson* ij = top.get("initial")) {
        cfg.initial = detail::read_initial(detail::ObjectReader(*ij, "/initial", lines, source), cfg.domain);
    }

    // forcing
    if (const ojson* fj = top.get("forcing")) {
        detail::ObjectReader r(*fj, "/forcing", lines, source);
        const std::string kind = r.string("kind", "zero", {"zero", "constant", "field", "time_scaled"});
        ForcingConfig& f = cfg.forcing;
        f.kind = kind == "zero"       ? ForcingKind::zero
                 : kind == "constant" ? ForcingKind::constant
                 : kind == "field"    ? ForcingKind::field
                                      : ForcingKind::time_scaled;
        f.amplitude = r.number("amplitude", f.kind == ForcingKind::zero ? 0.0 : 1.0);
        f.decay = r.number("decay", 1.0);
        if (f.decay < 0.0) {
            r.fail(r.at("decay"), "'decay' must be non-negative");
        }
        if (const ojson* pj = r.get("profile")) {
            if (f.kind != ForcingKind::field && f.kind != ForcingKind::time_scaled) {
                r.fail(r.at("profile"), "'profile' only applies to field and time_scaled forcing");
            }
            f.profile = detail::read_initial(detail::ObjectReader(*pj, "/forcing/profile", lines, source), cfg.domain);
        }
        r.finish();
    }

    // time
    if (const ojson* tj = top.get("time")) {
        detail::ObjectReader r(*tj, "/time", lines, source);
        SolverControls& c = cfg.time;
        cfg.T = r.number("T", cfg.T);
        if (!(cfg.T > 0.0)) {
            r.fail(r.at("T"), "'T' must be positive");
        }
        c.samples = r.uinteger("samples", c.samples);
        if (c.samples < 1) {
            r.fail(r.at("samples"), "'samples' must be at least 1");
        }
        c.spacing = r.string("spacing", "log", {"log", "linear"}) == "log" ? RecordSpacing::log : RecordSpacing::linear;
        c.t_first = r.number("t_first", 0.0);
        c.c_cfl = r.number("cfl", c.c_cfl);
        c.dt_max = r.number_or_inf("dt_max", c.dt_max);
        c.fixed_dt = r.number("fixed_dt", 0.0);
        c.blowup = r.number("blowup", c.blowup);
        c.dt_floor = r.number("dt_floor", c.dt_floor);
        r.finish();
        if (c.t_first < 0.0) {
            r.fail(r.at("t_first"), "'t_first' must be non-negative");
        }
        try {
            c.validate();
        } catch (const InvalidArgument& e) {
            r.fail("/time", e.what());
        }
    }

    // experiments
    if (const ojson* ej = top.get("experiments")) {
        if (!ej->is_array()) {
            top.fail("/experiments", "'experiments' must be an array");
        }
        for (std::size_t i = 0; i < ej->size(); ++i) {
            const std::string ptr = "/experiments/" + std::to_string(i);
            cfg.experiments.push_back(read_experiment(detail::ObjectReader((*ej)[i], ptr, lines, source), cfg));
        }
    }

    // output
    if (const ojson* oj = top.get("output")) {
        detail::ObjectReader r(*oj, "/output", lines, source);
        cfg.plots = r.boolean("plots", cfg.plots);
        r.finish();
    }
    top.finish();

    try {
        cfg.initial.evaluate(cfg.domain);
        cfg.forcing.build(cfg.domain).validate(cfg.domain);
    } catch (const InvalidArgument& e) {
        top.fail("/initial", e.what());
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is) {
        throw ConfigError(path, 1, "cannot open file");
    }
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), path);
}

/// Fully defaulted configuration.  Parsing it yields the same RunConfig.
inline ojson effective_config(const RunConfig& cfg)
{
    ojson j;
    j["name"] = cfg.name;
    const DomainSpec& d = cfg.domain;
    ojson dom;
    dom["dim"] = d.dim;
    dom["lengths"] = d.dim == 1 ? ojson::array({d.lengths[0]}) : ojson::array({d.lengths[0], d.lengths[1]});
    dom["n"] = d.dim == 1 ? ojson::array({d.n[0]}) : ojson::array({d.n[0], d.n[1]});
    j["domain"] = dom;
    const ModelParams& p = cfg.model;
    ojson m;
    m["m1"] = p.m1;
    m["m2"] = p.m2;
    m["s"] = p.s;
    m["delta"] = p.delta;
    m["varpi"] = p.varpi;
    m["kappa1"] = p.kappa1;
    m["kappa2"] = p.kappa2;
    m["use_mollified"] = p.use_mollified;
    m["pressure"] = p.pressure == PressureMode::exact ? "exact" : "truncated";
    m["eps"] = p.eps;
    m["transport"] = p.transport;
    j["model"] = m;
    j["initial"] = detail::initial_json(cfg.initial, d);
    ojson f;
    f["kind"] = detail::forcing_name(cfg.forcing.kind);
    f["amplitude"] = cfg.forcing.amplitude;
    f["decay"] = cfg.forcing.decay;
    if (cfg.forcing.kind == ForcingKind::field || cfg.forcing.kind == ForcingKind::time_scaled) {
        f["profile"] = detail::initial_json(cfg.forcing.profile, d);
    }
    j["forcing"] = f;
    const SolverControls& c = cfg.time;
    ojson t;
    t["T"] = cfg.T;
    t["samples"] = c.samples;
    t["spacing"] = c.spacing == RecordSpacing::log ? "log" : "linear";
    t["t_first"] = c.t_first;
    t["cfl"] = c.c_cfl;
    t["dt_max"] = std::isinf(c.dt_max) ? ojson(nullptr) : ojson(c.dt_max);
    t["fixed_dt"] = c.fixed_dt;
    t["blowup"] = c.blowup;
    t["dt_floor"] = c.dt_floor;
    j["time"] = t;
    ojson ex = ojson::array();
    for (const auto& e : cfg.experiments) {
        ex.push_back(experiment_json(e));
    }
    j["experiments"] = ex;
    j["output"] = ojson{{"plots", cfg.plots}};
    return j;
}

} // namespace fpme::app
