#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fpme/estimates/exponents.hpp"

namespace fpme {

enum class CheckStatus { pass, fail, inconclusive };

inline const char* to_string(CheckStatus s)
{
    switch (s) {
    case CheckStatus::pass:
        return "pass";
    case CheckStatus::fail:
        return "fail";
    default:
        return "inconclusive";
    }
}

struct CheckResult {
    std::string id;
    std::string ref; // which estimate the check exercises
    CheckStatus status = CheckStatus::pass;
    std::vector<std::pair<std::string, double>> residuals; // ordered for stable output
    std::optional<ExponentFit> fit;
    std::string note;

    bool passed() const { return status != CheckStatus::fail; }
    void set(const std::string& key, double v) { residuals.emplace_back(key, v); }
};

namespace detail {

inline void require_states(const Trajectory& tr)
{
    if (tr.states.size() != tr.times.size() || tr.times.empty()) {
        throw InvalidArgument("trajectory has no stored states");
    }
}

inline std::vector<GridField> grid_states(const Trajectory& tr, const SineBasis& basis)
{
    require_states(tr);
    std::vector<GridField> out;
    out.reserve(tr.states.size());
    for (const auto& st : tr.states) {
        out.push_back(basis.from_spectral(st));
    }
    return out;
}

} // namespace detail

/// ||u(t)^+||_1 <= ||u0^+||_1 + ||f^+||_{L^1(Omega_t)} + 1e-4 M, same for the negative parts.
inline CheckResult check_l1(const Trajectory& tr, const GridField& u0, const ForcingSpec& f, double rel_tol = 1e-4)
{
    CheckResult r{"l1", "basic L1 estimate", CheckStatus::pass, {}, std::nullopt, {}};
    const StateDiagnostics d0 = diagnose(u0, 0.0);
    const double T = tr.times.empty() ? 0.0 : tr.times.back();
    const double M = data_mass(u0, f, T);
    const double tol = rel_tol * M;
    double worst = -std::numeric_limits<double>::infinity();
    double worst_t = 0.0;
    for (const auto& d : tr.diagnostics) {
        const auto [fp, fm] = f.l1_parts(u0.domain, d.t);
        const double excess = std::max(d.mass_plus - d0.mass_plus - fp, d.mass_minus - d0.mass_minus - fm);
        if (excess > worst) {
            worst = excess;
            worst_t = d.t;
        }
    }
    if (tr.diagnostics.empty()) {
        worst = 0.0;
    }
    r.set("M", M);
    r.set("max_excess", worst);
    r.set("max_excess_t", worst_t);
    r.set("tolerance", tol);
    r.status = worst <= tol ? CheckStatus::pass : CheckStatus::fail;
    return r;
}

/// R(t) = int|u0|^p + p int_0^t int |f||u|^{p-1} - int|u(t)|^p - c_p int_0^t D_p,
/// c_p = 4 m2 p (p-1) / (gamma+p-1)^2, time integrals by the trapezoid rule.
inline std::vector<double> lp_energy_residual(const Trajectory& tr, double p, const ForcingSpec& f)
{
    if (!(p > 1.0)) {
        throw InvalidArgument("the L^p energy needs p > 1");
    }
    const SineBasis basis(tr.domain);
    const auto u = detail::grid_states(tr, basis);
    const ModelParams& mp = tr.params;
    const double gamma = mp.gamma();
    const double cp = 4.0 * mp.m2 * p * (p - 1.0) / ((gamma + p - 1.0) * (gamma + p - 1.0));
    std::vector<double> Ip;
    std::vector<double> D;
    std::vector<double> F;
    for (std::size_t k = 0; k < u.size(); ++k) {
        Ip.push_back(lp_integral(u[k], p));
        D.push_back(dissipation(basis, u[k], p, mp.s, gamma));
        double fk = 0.0;
        if (!f.is_zero()) {
            const GridField fg = f.at(tr.domain, tr.times[k]);
            for (std::size_t i = 0; i < fg.size(); ++i) {
                fk += std::abs(fg[i]) * std::pow(std::abs(u[k][i]), p - 1.0);
            }
            fk *= p * tr.domain.cell_volume();
        }
        F.push_back(fk);
    }
    const auto cD = cumulative_trapezoid(tr.times, D);
    const auto cF = cumulative_trapezoid(tr.times, F);
    std::vector<double> R(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
        R[k] = Ip.front() + cF[k] - Ip[k] - cp * cD[k];
    }
    return R;
}

inline CheckResult check_lp_energy(const Trajectory& tr, double p, const GridField& u0, const ForcingSpec& f,
                                   double rel_tol = 0.01)
{
    CheckResult r{"lp_energy", "L^p energy inequality", CheckStatus::pass, {}, std::nullopt, {}};
    const auto R = lp_energy_residual(tr, p, f);
    const double scale = lp_integral(u0, p) + 1e-12;
    const auto it = std::min_element(R.begin(), R.end());
    r.set("p", p);
    r.set("min_residual", *it);
    r.set("min_residual_t", tr.times[static_cast<std::size_t>(it - R.begin())]);
    r.set("data_side", scale);
    r.set("tolerance", rel_tol * scale);
    r.status = *it >= -rel_tol * scale ? CheckStatus::pass : CheckStatus::fail;
    return r;
}

/// ||u||_{L^inf(Omega_T)} <= ||u0||_inf + T ||f||_inf + slack (||u0||_inf + 1).
inline CheckResult check_linfty(const Trajectory& tr, const GridField& u0, const ForcingSpec& f, double slack = 1e-3)
{
    CheckResult r{"linfty", "L-infinity bound", CheckStatus::pass, {}, std::nullopt, {}};
    const double T = tr.times.empty() ? 0.0 : tr.times.back();
    const double u0max = max_abs(u0.values);
    const double bound = u0max + T * f.sup_norm();
    double sup = 0.0;
    for (const auto& d : tr.diagnostics) {
        sup = std::max(sup, d.linf);
    }
    const double tol = slack * (u0max + 1.0);
    r.set("sup", sup);
    r.set("bound", bound);
    r.set("excess", sup - bound);
    r.set("tolerance", tol);
    r.status = sup <= bound + tol ? CheckStatus::pass : CheckStatus::fail;
    return r;
}

inline CheckResult fit_to_check(std::string id, std::string ref, const ExponentFit& fit, double rel_tol)
{
    CheckResult r{std::move(id), std::move(ref), CheckStatus::pass, {}, fit, {}};
    r.set("rel_error", fit.rel_error);
    r.set("tolerance", rel_tol);
    if (fit.inconclusive) {
        r.status = CheckStatus::inconclusive;
        r.note = "r^2 below 0.95; window is not in the asymptotic regime";
    } else {
        r.status = fit.within(rel_tol) ? CheckStatus::pass : CheckStatus::fail;
    }
    return r;
}

/// Relative sup-norm distance of two states, normalized by the second.
inline double relative_sup_distance(const GridField& a, const GridField& b)
{
    detail::require_same(a.domain, b.domain, "relative_sup_distance");
    double num = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
    }
    const double den = max_abs(b.values);
    return den > 0.0 ? num / den : num;
}

struct UniversalBoundOptions {
    FitWindow window{0.1, 0.8};
    double slope_tol = 0.15;
    double collapse_tol = 0.10;
};

/// Trajectories from data of increasing mass, recorded on common times.
/// (a) late-time slope of ||u||_inf against -1/(gamma-1) for each run;
/// (b) every run within collapse_tol of the largest-mass run on the window.
inline CheckResult check_universal_bound(const std::vector<Trajectory>& runs, const ModelParams& p,
                                         const UniversalBoundOptions& opt = {})
{
    const double gamma = p.gamma();
    if (!(gamma > 1.0)) {
        throw InvalidArgument("the universal bound needs gamma = m1 + m2 > 1");
    }
    if (runs.empty()) {
        throw InvalidArgument("check_universal_bound needs at least one trajectory");
    }
    CheckResult r{"universal_bound", "universal bound", CheckStatus::pass, {}, std::nullopt, {}};
    const double theory = -1.0 / (gamma - 1.0);
    const SineBasis basis(runs.front().domain);
    bool inconclusive = false;
    bool ok = true;
    double worst_slope_err = 0.0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        std::vector<double> sup;
        for (const auto& d : runs[i].diagnostics) {
            sup.push_back(d.linf);
        }
        const ExponentFit fit = fit_power_law(runs[i].times, sup, opt.window, theory);
        r.set("slope_" + std::to_string(i), fit.slope);
        worst_slope_err = std::max(worst_slope_err, fit.rel_error);
        inconclusive = inconclusive || fit.inconclusive;
        ok = ok && fit.within(opt.slope_tol);
        if (i + 1 == runs.size()) {
            r.fit = fit;
        }
    }
    const Trajectory& ref = runs.back();
    const double t_lo = opt.window.lo * ref.times.back();
    const double t_hi = opt.window.hi * ref.times.back();
    double collapse = 0.0;
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
        detail::require_states(runs[i]);
        if (runs[i].times != ref.times) {
            throw ShapeMismatch("universal-bound runs must share record times");
        }
        for (std::size_t k = 0; k < ref.times.size(); ++k) {
            if (ref.times[k] < t_lo || ref.times[k] > t_hi) {
                continue;
            }
            collapse = std::max(collapse, relative_sup_distance(basis.from_spectral(runs[i].states[k]),
                                                                 basis.from_spectral(ref.states[k])));
        }
    }
    r.set("theoretical_slope", theory);
    r.set("max_slope_rel_error", worst_slope_err);
    r.set("max_collapse", collapse);
    r.set("slope_tolerance", opt.slope_tol);
    r.set("collapse_tolerance", opt.collapse_tol);
    if (!ok || collapse > opt.collapse_tol) {
        r.status = CheckStatus::fail;
    } else if (inconclusive) {
        r.status = CheckStatus::inconclusive;
        r.note = "r^2 below 0.95; window is not in the asymptotic regime";
    }
    return r;
}

struct ScalingResult {
    double k = 1.0;
    double t_probe = 0.0;
    double discrepancy = 0.0; // ||k u(k^{gamma-1} t) - u_k(t)||_inf / ||u_k(t)||_inf
};

/// Solves from u0 up to k^{gamma-1} t_probe and from k u0 up to t_probe, then
/// compares k u(., k^{gamma-1} t_probe) with u_k(., t_probe).  Both runs use
/// the same absolute step cap (default 0.01 h_min).  With CFL steps alone
/// the two runs are exact rescalings of each other and the comparison would
/// only see rounding.
inline ScalingResult scaling_discrepancy(const GridField& u0, const ModelParams& p, double k, double t_probe,
                                         SolverControls c = {})
{
    if (!(k > 0.0) || !(t_probe > 0.0)) {
        throw InvalidArgument("scaling check needs k > 0 and t_probe > 0");
    }
    if (std::isinf(c.dt_max) && !(c.fixed_dt > 0.0)) {
        c.dt_max = 0.01 * u0.domain.min_spacing();
    }
    c.samples = 1;
    c.spacing = RecordSpacing::linear;
    c.store_states = true;
    const auto basis = std::make_shared<const SineBasis>(u0.domain);
    const Solver s(basis, p);
    GridField ku0 = u0;
    for (double& v : ku0.values) {
        v *= k;
    }
    const double t_long = std::pow(k, p.gamma() - 1.0) * t_probe;
    const Trajectory a = s.solve(u0, t_long, c);
    const Trajectory b = k == 1.0 ? a : s.solve(ku0, t_probe, c);
    GridField ua = basis->from_spectral(a.states.back());
    for (double& v : ua.values) {
        v *= k;
    }
    return {k, t_probe, relative_sup_distance(ua, basis->from_spectral(b.states.back()))};
}

inline CheckResult check_scaling_invariance(const GridField& u0, const ModelParams& p, double k, double t_probe,
                                            const SolverControls& c = {}, double rel_tol = 0.02)
{
    CheckResult r{"scaling_invariance", "scaling invariance", CheckStatus::pass, {}, std::nullopt, {}};
    const ScalingResult s = scaling_discrepancy(u0, p, k, t_probe, c);
    r.set("k", k);
    r.set("t_probe", t_probe);
    r.set("discrepancy", s.discrepancy);
    r.set("tolerance", rel_tol);
    if (p.delta != 0.0 || p.varpi != 0.0) {
        r.note = "regularization terms are not scale invariant";
    }
    r.status = s.discrepancy <= rel_tol ? CheckStatus::pass : CheckStatus::fail;
    return r;
}

/// int_0^T of the theta integrand.
inline double theta_functional(const Trajectory& tr, double theta)
{
    const SineBasis basis(tr.domain);
    const auto u = detail::grid_states(tr, basis);
    std::vector<double> y;
    for (const auto& g : u) {
        y.push_back(theta_integrand(basis, g, tr.params.s, tr.params.gamma(), theta));
    }
    return trapezoid(tr.times, y);
}

/// Theta functional over a mass sweep; the ratio I/M may grow at most
/// linearly in M, with a factor `slack`.
inline CheckResult check_theta_mass_sweep(const std::vector<Trajectory>& runs, const std::vector<double>& masses,
                                          double theta, double slack = 3.0)
{
    if (runs.size() != masses.size() || runs.empty()) {
        throw InvalidArgument("theta sweep needs one mass per trajectory");
    }
    CheckResult r{"theta_functional", "theta-weighted dissipation bound", CheckStatus::pass, {}, std::nullopt, {}};
    r.set("theta", theta);
    double ratio0 = 0.0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const double ratio = theta_functional(runs[i], theta) / masses[i];
        r.set("ratio_" + std::to_string(i), ratio);
        if (i == 0) {
            ratio0 = ratio;
        } else if (ratio > slack * ratio0 * masses[i] / masses[0]) {
            r.status = CheckStatus::fail;
        }
    }
    return r;
}

/// Lorentz exponent for the three cases of the weak estimate; l > 1 only
/// matters in the borderline case s = 1 - N/2.
inline double lorentz_exponent(int N, double s, double gamma, double l = 2.0)
{
    const double edge = 1.0 - N / 2.0;
    if (std::abs(s - edge) < 1e-12) {
        if (!(l > 1.0)) {
            throw InvalidArgument("the borderline Lorentz case needs l > 1");
        }
        return gamma + 1.0 - 1.0 / l;
    }
    if (s < edge) {
        return gamma + 2.0 * (1.0 - s) / N;
    }
    return gamma + 1.0;
}

/// sup_k k |{|u| > k}|^{1/r} over the space-time grid, with trapezoid
/// weights in time and cell volumes in space.
inline double weak_lorentz_quasinorm(const Trajectory& tr, double r)
{
    if (!(r > 1.0)) {
        throw InvalidArgument("weak Lorentz exponent must exceed 1");
    }
    const SineBasis basis(tr.domain);
    const auto u = detail::grid_states(tr, basis);
    const double cell = tr.domain.cell_volume();
    std::vector<std::pair<double, double>> vw; // (|u|, weight)
    for (std::size_t k = 0; k < u.size(); ++k) {
        double wt = 0.0;
        if (k > 0) {
            wt += 0.5 * (tr.times[k] - tr.times[k - 1]);
        }
        if (k + 1 < u.size()) {
            wt += 0.5 * (tr.times[k + 1] - tr.times[k]);
        }
        if (wt <= 0.0) {
            continue;
        }
        for (double v : u[k].values) {
            if (v != 0.0) {
                vw.emplace_back(std::abs(v), wt * cell);
            }
        }
    }
    std::sort(vw.begin(), vw.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    // For k just below a sample value v the level set {|u| > k} holds every
    // entry >= v, so the supremum is max over v of v * W(>= v)^{1/r}.
    double best = 0.0;
    double above = 0.0;
    for (std::size_t i = 0; i < vw.size();) {
        const double level = vw[i].first;
        while (i < vw.size() && vw[i].first == level) {
            above += vw[i].second;
            ++i;
        }
        best = std::max(best, level * std::pow(above, 1.0 / r));
    }
    return best;
}

/// Negative-order energy for m2 = 1:
///   LHS(t) = 1/2 |(-Lap)^{-s/2} u(t)|^2 + delta int |(-Lap)^{(1-s)/2} u|^2
///            + int int |u|^{m1} |grad (-Lap)^{-s} u|^2,
///   RHS(t) = 1/2 |(-Lap)^{-s/2} u0|^2
///            + (int |(-Lap)^{-s/2} f|^2)^{1/2} (int |(-Lap)^{-s/2} u|^2)^{1/2}.
/// Returns RHS - LHS per record time.
inline std::vector<double> hs_energy_residual(const Trajectory& tr, const ForcingSpec& f)
{
    const ModelParams& p = tr.params;
    if (p.m2 != 1.0) {
        throw InvalidArgument("the negative-order energy needs m2 = 1");
    }
    const SineBasis basis(tr.domain);
    detail::require_states(tr);
    const auto& lam = basis.eigen().lambda;
    const DomainSpec& d = tr.domain;
    std::vector<double> E;
    std::vector<double> V;
    std::vector<double> T;
    std::vector<double> Fs;
    std::vector<double> Us;
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
        const SpectralField& c = tr.states[k];
        double e = 0.0;
        double v = 0.0;
        SpectralField q = c;
        for (std::size_t j = 0; j < c.size(); ++j) {
            e += std::pow(lam[j], -p.s) * c[j] * c[j];
            v += std::pow(lam[j], 1.0 - p.s) * c[j] * c[j];
            q[j] *= std::pow(lam[j], -p.s);
        }
        E.push_back(0.5 * e);
        V.push_back(p.delta * v);
        Us.push_back(e);
        const GridField ug = basis.from_spectral(c);
        const VectorField grad = basis.gradient(q);
        double t = 0.0;
        for (int a = 0; a < d.dim; ++a) {
            const AxisField h = extend_to_axis(ug, a);
            const AxisField& g = grad.components[a];
            const std::size_t n_ext = d.points(a) + 2;
            const std::size_t other = a == 0 ? d.points(1) : d.points(0);
            const double other_h = d.dim == 2 ? d.spacing(1 - a) : 1.0;
            for (std::size_t i = 0; i < n_ext; ++i) {
                const double w = (i == 0 || i + 1 == n_ext ? 0.5 : 1.0) * d.spacing(a) * other_h;
                for (std::size_t j = 0; j < other; ++j) {
                    const std::size_t idx = a == 0 ? i * other + j : j * n_ext + i;
                    t += w * std::pow(std::abs(h.values[idx]), p.m1) * g.values[idx] * g.values[idx];
                }
            }
        }
        T.push_back(t);
        double fs = 0.0;
        if (!f.is_zero()) {
            const SpectralField fh = basis.to_spectral(f.at(d, tr.times[k]));
            for (std::size_t j = 0; j < fh.size(); ++j) {
                fs += std::pow(lam[j], -p.s) * fh[j] * fh[j];
            }
        }
        Fs.push_back(fs);
    }
    const auto cV = cumulative_trapezoid(tr.times, V);
    const auto cT = cumulative_trapezoid(tr.times, T);
    const auto cF = cumulative_trapezoid(tr.times, Fs);
    const auto cU = cumulative_trapezoid(tr.times, Us);
    std::vector<double> out(E.size());
    for (std::size_t k = 0; k < E.size(); ++k) {
        const double rhs = E.front() + std::sqrt(cF[k] * cU[k]);
        out[k] = rhs - (E[k] + cV[k] + cT[k]);
    }
    return out;
}

inline CheckResult check_hs_energy_m2eq1(const Trajectory& tr, const GridField& u0, const ForcingSpec& f,
                                         double rel_tol = 0.01)
{
    CheckResult r{"hs_energy", "negative-order energy for m2 = 1", CheckStatus::pass, {}, std::nullopt, {}};
    const auto R = hs_energy_residual(tr, f);
    const SineBasis basis(u0.domain);
    const SpectralField c0 = basis.to_spectral(u0);
    double scale = 0.0;
    for (std::size_t j = 0; j < c0.size(); ++j) {
        scale += 0.5 * std::pow(basis.eigen().lambda[j], -tr.params.s) * c0[j] * c0[j];
    }
    scale += 1e-300;
    const auto it = std::min_element(R.begin(), R.end());
    r.set("min_residual", *it);
    r.set("data_side", scale);
    r.set("tolerance", rel_tol * scale);
    r.status = *it >= -rel_tol * scale ? CheckStatus::pass : CheckStatus::fail;
    return r;
}

} // namespace fpme
