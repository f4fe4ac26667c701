#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fpme/app/config.hpp"
#include "fpme/app/svg.hpp"
#include "fpme/core/csv.hpp"
#include "fpme/core/parallel.hpp"
#include "fpme/estimates/report.hpp"
#include "fpme/evolution/sweep.hpp"

namespace fpme::app {

enum ExitCode { exit_ok = 0, exit_check_failed = 1, exit_config = 2, exit_solver = 3 };

struct RunOutcome {
    EstimateReport report;
    Trajectory trajectory;
    std::vector<PlotSeries> plots;
};

struct SweepOutcome {
    EstimateReport report;
    std::vector<std::string> csv_header;
    std::vector<std::vector<double>> csv_rows;
};

namespace detail {

inline GridField initial_with_mass(const RunConfig& cfg, double mass)
{
    InitialData id = cfg.initial;
    id.mass = mass;
    return id.evaluate(cfg.domain);
}

inline std::vector<Trajectory> mass_runs(const RunConfig& cfg, const std::vector<double>& masses, std::size_t jobs)
{
    std::vector<Trajectory> runs(masses.size());
    const auto basis = std::make_shared<const SineBasis>(cfg.domain);
    const ForcingSpec f = cfg.forcing.build(cfg.domain);
    parallel_for(masses.size(), jobs, [&](std::size_t i) {
        runs[i] = Solver(basis, cfg.model, f).solve(initial_with_mass(cfg, masses[i]), cfg.T, cfg.time);
    });
    return runs;
}

inline std::string number_label(double v)
{
    return csv::number(v);
}

} // namespace detail

/// Solves the configured problem and evaluates every requested check.
inline RunOutcome execute_run(const RunConfig& cfg, std::size_t jobs = 1)
{
    RunOutcome out;
    const ojson eff = effective_config(cfg);
    out.report.run_id = fnv1a_hex(eff.dump());
    out.report.params = cfg.model;
    out.report.config = eff;

    const DomainSpec& d = cfg.domain;
    const GridField u0 = cfg.initial.evaluate(d);
    const ForcingSpec f = cfg.forcing.build(d);
    const auto basis = std::make_shared<const SineBasis>(d);
    out.trajectory = Solver(basis, cfg.model, f).solve(u0, cfg.T, cfg.time);
    const Trajectory& tr = out.trajectory;
    const double M = data_mass(u0, f, cfg.T);

    std::vector<double> l1;
    std::vector<double> l2;
    std::vector<double> linf;
    for (const auto& s : tr.diagnostics) {
        l1.push_back(s.l1);
        l2.push_back(s.l2);
        linf.push_back(s.linf);
    }
    out.plots.push_back({"||u||_1", tr.times, l1, false});
    out.plots.push_back({"||u||_2", tr.times, l2, false});
    out.plots.push_back({"||u||_inf", tr.times, linf, false});

    for (const Experiment& e : cfg.experiments) {
        const std::string& c = e.check;
        if (c == "l1") {
            out.report.checks.push_back(check_l1(tr, u0, f, e.tol));
        } else if (c == "lp_energy") {
            for (double p : e.p) {
                out.report.checks.push_back(check_lp_energy(tr, p, u0, f, e.tol));
            }
        } else if (c == "linfty") {
            out.report.checks.push_back(check_linfty(tr, u0, f, e.tol));
        } else if (c == "smoothing") {
            const ExponentFit fit = fit_smoothing_exponent(tr, e.q0, e.q, cfg.model, e.window);
            CheckResult r = fit_to_check("smoothing", "smoothing effect", fit, e.tol);
            r.set("q0", e.q0);
            r.set("q", e.q);
            out.report.checks.push_back(r);
            // Guide line through the fitted value at the window start.
            const double a = std::exp(fit.intercept + fit.slope * std::log(fit.t_min));
            out.plots.push_back({"guide t^" + detail::number_label(fit.theoretical_slope),
                                 {fit.t_min, fit.t_max},
                                 {a, a * std::pow(fit.t_max / fit.t_min, fit.theoretical_slope)},
                                 true});
        } else if (c == "dissipation_rate") {
            const ExponentFit fit = fit_dissipation_exponent(tr, e.q, e.q0, cfg.model, e.window);
            CheckResult r = fit_to_check("dissipation_rate", "decay of the dissipation", fit, e.tol);
            r.set("q0", e.q0);
            r.set("q", e.q);
            out.report.checks.push_back(r);
        } else if (c == "hs_energy") {
            out.report.checks.push_back(check_hs_energy_m2eq1(tr, u0, f, e.tol));
        } else if (c == "theta") {
            CheckResult r{"theta_diagnostic", "theta-weighted dissipation bound", CheckStatus::pass, {}, std::nullopt,
                          "diagnostic only; the constant is not tracked"};
            const double I = theta_functional(tr, e.theta);
            r.set("theta", e.theta);
            r.set("integral", I);
            r.set("M", M);
            r.set("ratio", M > 0.0 ? I / M : 0.0);
            out.report.checks.push_back(r);
            if (!e.masses.empty()) {
                const auto runs = detail::mass_runs(cfg, e.masses, jobs);
                std::vector<double> Ms;
                for (double m : e.masses) {
                    Ms.push_back(data_mass(detail::initial_with_mass(cfg, m), f, cfg.T));
                }
                out.report.checks.push_back(check_theta_mass_sweep(runs, Ms, e.theta, e.tol));
            }
        } else if (c == "weak_lorentz") {
            const double r_exp = lorentz_exponent(d.dim, cfg.model.s, cfg.model.gamma(), e.l);
            CheckResult r{"weak_lorentz", "weak Lorentz estimate", CheckStatus::pass, {}, std::nullopt,
                          "diagnostic only; the constant is not tracked"};
            r.set("exponent", r_exp);
            r.set("l", e.l);
            r.set("quasinorm", weak_lorentz_quasinorm(tr, r_exp));
            r.set("M", M);
            out.report.checks.push_back(r);
        } else if (c == "holder_ladder") {
            FunctionalRequest req;
            req.p_values = e.p;
            const auto recs = record_functionals(tr, u0, f, req);
            const double vol = static_cast<double>(d.size()) * d.cell_volume();
            double bad = 0.0;
            for (const auto& rec : recs) {
                bad += holder_ladder_consistent(rec, vol, e.tol) ? 0.0 : 1.0;
            }
            CheckResult r{"holder_ladder", "norm consistency", bad == 0.0 ? CheckStatus::pass : CheckStatus::fail,
                          {}, std::nullopt, {}};
            r.set("violations", bad);
            r.set("records", static_cast<double>(recs.size()));
            out.report.checks.push_back(r);
        } else if (c == "universal_bound") {
            const auto runs = detail::mass_runs(cfg, e.masses, jobs);
            UniversalBoundOptions o;
            o.window = e.window;
            o.slope_tol = e.slope_tol;
            o.collapse_tol = e.collapse_tol;
            out.report.checks.push_back(check_universal_bound(runs, cfg.model, o));
        } else if (c == "scaling") {
            std::vector<CheckResult> rs(e.k.size());
            parallel_for(e.k.size(), jobs, [&](std::size_t i) {
                rs[i] = check_scaling_invariance(u0, cfg.model, e.k[i], e.t_probe, cfg.time, e.tol);
            });
            for (auto& r : rs) {
                out.report.checks.push_back(std::move(r));
            }
        }
    }
    return out;
}

inline std::vector<double> parse_value_list(const std::string& s)
{
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t comma = s.find(',', pos);
        const std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw InvalidArgument("cannot parse sweep value '" + tok + "'");
        }
        if (used != tok.size() || !std::isfinite(v)) {
            throw InvalidArgument("cannot parse sweep value '" + tok + "'");
        }
        out.push_back(v);
        if (comma == std::string::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

inline const std::vector<std::string>& sweep_axes()
{
    static const std::vector<std::string> a{"delta", "kappa1", "kappa2", "varpi", "mass", "k_scaling"};
    return a;
}

/// One sub-run per value along `axis`, aggregated into a table.
inline SweepOutcome execute_sweep(const RunConfig& cfg, const std::string& axis, const std::vector<double>& values,
                                  std::size_t jobs = 1)
{
    if (std::find(sweep_axes().begin(), sweep_axes().end(), axis) == sweep_axes().end()) {
        throw InvalidArgument("unknown sweep axis '" + axis + "'");
    }
    if (values.empty()) {
        throw InvalidArgument("sweep needs at least one value");
    }
    SweepOutcome out;
    ojson eff = effective_config(cfg);
    eff["sweep"] = ojson{{"axis", axis}, {"values", values}};
    out.report.run_id = fnv1a_hex(eff.dump());
    out.report.params = cfg.model;
    out.report.config = eff;
    const DomainSpec& d = cfg.domain;
    const GridField u0 = cfg.initial.evaluate(d);
    const ForcingSpec f = cfg.forcing.build(d);

    if (axis == "mass") {
        for (double m : values) {
            if (!(m > 0.0)) {
                throw InvalidArgument("mass values must be positive");
            }
        }
        const auto runs = detail::mass_runs(cfg, values, jobs);
        out.csv_header = {"mass", "final_linf", "final_l1", "linf_slope"};
        ojson rows = ojson::array();
        const double gamma = cfg.model.gamma();
        for (std::size_t i = 0; i < runs.size(); ++i) {
            std::vector<double> sup;
            for (const auto& s : runs[i].diagnostics) {
                sup.push_back(s.linf);
            }
            const double theory = gamma > 1.0 ? -1.0 / (gamma - 1.0) : 0.0;
            double slope = std::nan("");
            try {
                slope = fit_power_law(runs[i].times, sup, {}, theory).slope;
            } catch (const InvalidArgument&) {
            }
            const auto& last = runs[i].diagnostics.back();
            out.csv_rows.push_back({values[i], last.linf, last.l1, slope});
            rows.push_back(ojson{{"mass", values[i]}, {"final_linf", last.linf}, {"final_l1", last.l1},
                                 {"linf_slope", slope}});
        }
        out.report.tables["mass_sweep"] = rows;
        if (gamma > 1.0 && f.is_zero()) {
            out.report.checks.push_back(check_universal_bound(runs, cfg.model));
        }
        return out;
    }
    if (axis == "k_scaling") {
        if (!f.is_zero()) {
            throw InvalidArgument("k_scaling sweeps require zero forcing");
        }
        std::vector<ScalingResult> res(values.size());
        parallel_for(values.size(), jobs,
                     [&](std::size_t i) { res[i] = scaling_discrepancy(u0, cfg.model, values[i], cfg.T, cfg.time); });
        out.csv_header = {"k", "discrepancy"};
        ojson rows = ojson::array();
        CheckResult r{"scaling_invariance", "scaling invariance", CheckStatus::pass, {}, std::nullopt, {}};
        double worst = 0.0;
        for (const auto& s : res) {
            out.csv_rows.push_back({s.k, s.discrepancy});
            rows.push_back(ojson{{"k", s.k}, {"discrepancy", s.discrepancy}});
            worst = std::max(worst, s.discrepancy);
        }
        r.set("t_probe", cfg.T);
        r.set("max_discrepancy", worst);
        r.set("tolerance", 0.02);
        r.status = worst <= 0.02 ? CheckStatus::pass : CheckStatus::fail;
        out.report.tables["k_scaling"] = rows;
        out.report.checks.push_back(r);
        return out;
    }

    // Regularization parameters.
    std::vector<ModelParams> schedule;
    for (double v : values) {
        ModelParams p = cfg.model;
        if (axis == "delta") {
            p.delta = v;
        } else if (axis == "kappa1") {
            p.kappa1 = v;
        } else if (axis == "kappa2") {
            p.kappa2 = v;
        } else {
            p.varpi = v;
        }
        p.validate();
        schedule.push_back(p);
    }
    const SweepTable t = regularization_sweep(u0, f, schedule, cfg.T, cfg.time, jobs);
    out.csv_header = {axis, "diff_to_next"};
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        out.csv_rows.push_back({values[i], t.rows[i].diff_to_next});
        rows.push_back(ojson{{axis, values[i]}, {"diff_to_next", t.rows[i].diff_to_next}});
    }
    out.report.tables["regularization_sweep"] =
        ojson{{"axis", axis},          {"rows", rows},           {"refinement_error", t.refinement_error},
              {"dt", t.dt},            {"decreasing", t.decreasing}, {"divergent", t.divergent}};
    CheckResult r{"regularization_chain", "vanishing regularization limits", CheckStatus::pass, {}, std::nullopt, {}};
    r.set("final_difference", t.final_difference());
    r.set("refinement_error", t.refinement_error);
    r.set("ratio", t.refinement_error > 0.0 ? t.final_difference() / t.refinement_error : 0.0);
    r.set("decreasing", t.decreasing ? 1.0 : 0.0);
    const bool ok = (t.decreasing && !t.divergent && t.final_difference() <= 5.0 * t.refinement_error) ||
                    t.final_difference() == 0.0;
    r.status = ok ? CheckStatus::pass : CheckStatus::fail;
    out.report.checks.push_back(r);
    return out;
}

inline void write_text(const std::filesystem::path& p, const std::string& s)
{
    std::ofstream os(p, std::ios::binary);
    if (!os) {
        throw Error("cannot write " + p.string());
    }
    os << s;
}

inline void write_run_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const RunOutcome& r)
{
    std::filesystem::create_directories(dir);
    std::ostringstream csvs;
    csv::write_row(csvs, {"t", "l1", "mass_plus", "mass_minus", "l2", "linf", "min"});
    for (const auto& s : r.trajectory.diagnostics) {
        csv::write_row(csvs, {csv::number(s.t), csv::number(s.l1), csv::number(s.mass_plus), csv::number(s.mass_minus),
                              csv::number(s.l2), csv::number(s.linf), csv::number(s.min)});
    }
    write_text(dir / "diagnostics.csv", csvs.str());
    write_text(dir / "report.json", to_json(r.report).dump(2) + "\n");
    if (cfg.plots) {
        std::filesystem::create_directories(dir / "plots");
        write_text(dir / "plots" / "norms.svg", loglog_svg(cfg.name + ": norms", "t", "norm", r.plots));
    }
}

inline void write_sweep_outputs(const std::filesystem::path& dir, const SweepOutcome& s)
{
    std::filesystem::create_directories(dir);
    std::ostringstream csvs;
    csv::write_row(csvs, s.csv_header);
    for (const auto& row : s.csv_rows) {
        std::vector<std::string> cells;
        for (double v : row) {
            cells.push_back(std::isnan(v) ? std::string() : csv::number(v));
        }
        csv::write_row(csvs, cells);
    }
    write_text(dir / "sweep.csv", csvs.str());
    write_text(dir / "report.json", to_json(s.report).dump(2) + "\n");
}

} // namespace fpme::app
