#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "fpme/evolution/operator.hpp"

namespace fpme {

/// A single step failed (non-finite values); retry with `suggested_dt`.
class StepRejected : public Error {
public:
    StepRejected(const std::string& what, double suggested) : Error(what), suggested_dt(suggested) {}
    double suggested_dt;
};

/// The run cannot continue: blowup or the step size fell below the floor.
class SolverFailure : public Error {
public:
    enum class Kind { blowup, dt_floor, step_limit };
    SolverFailure(Kind k, const std::string& what, double time) : Error(what), kind(k), t(time) {}
    Kind kind;
    double t;
};

enum class RecordSpacing { log, linear };

struct SolverControls {
    double c_cfl = 0.4;
    double dt_max = std::numeric_limits<double>::infinity();
    double fixed_dt = 0.0; // > 0 disables the CFL control
    std::size_t samples = 200;
    double t_first = 0.0; // first logarithmic record time; 0 means T * 1e-4
    RecordSpacing spacing = RecordSpacing::log;
    double blowup = 1e8;
    double dt_floor = 1e-12;
    std::size_t max_steps = 100'000'000;
    bool store_states = true;

    void validate() const
    {
        if (!(c_cfl > 0.0) || !(dt_max > 0.0) || fixed_dt < 0.0 || !(blowup > 0.0) || !(dt_floor > 0.0)) {
            throw InvalidArgument("invalid solver controls");
        }
    }
};

/// Cheap per-record diagnostics, all from nodal values.
struct StateDiagnostics {
    double t = 0.0;
    double l1 = 0.0;
    double mass_plus = 0.0;
    double mass_minus = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
    double min = 0.0;
};

inline StateDiagnostics diagnose(const GridField& u, double t)
{
    StateDiagnostics d;
    d.t = t;
    const double w = u.domain.cell_volume();
    double s2 = 0.0;
    double mn = 0.0;
    for (double v : u.values) {
        (v > 0 ? d.mass_plus : d.mass_minus) += std::abs(v);
        s2 += v * v;
        d.linf = std::max(d.linf, std::abs(v));
        mn = std::min(mn, v);
    }
    d.mass_plus *= w;
    d.mass_minus *= w;
    d.l1 = d.mass_plus + d.mass_minus;
    d.l2 = std::sqrt(s2 * w);
    d.min = mn;
    return d;
}

struct Trajectory {
    DomainSpec domain;
    ModelParams params;
    std::vector<double> times;
    std::vector<SpectralField> states;
    std::vector<StateDiagnostics> diagnostics;
    std::size_t steps = 0;
    std::size_t rejected = 0;
    double smallest_dt = std::numeric_limits<double>::infinity();
    double largest_dt = 0.0;
};

/// Record times in (0, T]: log-spaced from t_first, or uniform.
inline std::vector<double> record_times(double T, const SolverControls& c)
{
    std::vector<double> out;
    const std::size_t k = std::max<std::size_t>(c.samples, 1);
    if (c.spacing == RecordSpacing::linear || k == 1) {
        for (std::size_t i = 1; i <= k; ++i) {
            out.push_back(T * static_cast<double>(i) / static_cast<double>(k));
        }
    } else {
        const double t0 = c.t_first > 0.0 ? std::min(c.t_first, T) : T * 1e-4;
        const double r = std::log(T / t0);
        for (std::size_t i = 0; i < k; ++i) {
            out.push_back(t0 * std::exp(r * static_cast<double>(i) / static_cast<double>(k - 1)));
        }
        out.back() = T;
    }
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

class Solver {
public:
    Solver(const DomainSpec& domain, ModelParams params, ForcingSpec forcing = {})
        : op_(std::make_shared<const SineBasis>(domain), params, std::move(forcing))
    {
    }

    Solver(std::shared_ptr<const SineBasis> basis, ModelParams params, ForcingSpec forcing = {})
        : op_(std::move(basis), params, std::move(forcing))
    {
    }

    const EvolutionOperator& op() const { return op_; }
    const SineBasis& basis() const { return op_.basis(); }

    /// One integrating-factor SSP-RK2 step: with E = exp(delta Lap dt),
    ///   u1 = E (u + dt N(u, t)),  u_new = (E u + u1 + dt N(u1, t+dt)) / 2.
    SpectralField step(const SpectralField& u, double t, double dt) const
    {
        if (!(dt > 0.0)) {
            throw InvalidArgument("time step must be positive");
        }
        const auto& lam = basis().eigen().lambda;
        const double delta = op_.params().delta;
        try {
            SpectralField n0 = op_.nonlinear(u, t);
            SpectralField u1(u.domain);
            SpectralField eu(u.domain);
            for (std::size_t j = 0; j < u.size(); ++j) {
                const double e = delta > 0.0 ? std::exp(-delta * lam[j] * dt) : 1.0;
                eu[j] = e * u[j];
                u1[j] = e * (u[j] + dt * n0[j]);
            }
            const SpectralField n1 = op_.nonlinear(u1, t + dt);
            SpectralField out(u.domain);
            for (std::size_t j = 0; j < u.size(); ++j) {
                out[j] = 0.5 * (eu[j] + u1[j] + dt * n1[j]);
            }
            if (!all_finite(out.coeffs)) {
                throw StepRejected("step produced non-finite values", dt / 2.0);
            }
            return out;
        } catch (const NumericalOverflow& e) {
            throw StepRejected(e.what(), dt / 2.0);
        }
    }

    Trajectory solve(const GridField& u0, double T, const SolverControls& c = {}) const
    {
        c.validate();
        if (!(T > 0.0)) {
            throw InvalidArgument("horizon T must be positive");
        }
        detail::require_same(u0.domain, basis().domain(), "solve");
        if (!all_finite(u0.values)) {
            throw InvalidArgument("initial data must be finite");
        }
        Trajectory tr;
        tr.domain = basis().domain();
        tr.params = op_.params();
        SpectralField u = basis().to_spectral(u0);
        record(tr, u, u0, 0.0, c);
        const std::vector<double> marks = record_times(T, c);
        double t = 0.0;
        double cap = std::numeric_limits<double>::infinity();
        for (double mark : marks) {
            while (t < mark) {
                if (tr.steps >= c.max_steps) {
                    throw SolverFailure(SolverFailure::Kind::step_limit, "step limit reached", t);
                }
                double dt = c.fixed_dt > 0.0 ? c.fixed_dt : std::min({op_.stable_dt(u, c.c_cfl), c.dt_max, cap});
                // Land exactly on the record time, avoiding a sliver step.
                const double remaining = mark - t;
                if (dt >= remaining - 1e-9 * dt) {
                    dt = remaining;
                } else if (dt > remaining / 2.0 && c.fixed_dt == 0.0) {
                    dt = remaining / 2.0;
                }
                for (;;) {
                    if (dt < c.dt_floor) {
                        throw SolverFailure(SolverFailure::Kind::dt_floor, "time step fell below the floor", t);
                    }
                    try {
                        SpectralField next = step(u, t, dt);
                        u = std::move(next);
                        break;
                    } catch (const StepRejected& e) {
                        ++tr.rejected;
                        dt = e.suggested_dt;
                        cap = dt;
                    }
                }
                t = dt == remaining ? mark : t + dt;
                ++tr.steps;
                tr.smallest_dt = std::min(tr.smallest_dt, dt);
                tr.largest_dt = std::max(tr.largest_dt, dt);
                if (cap < std::numeric_limits<double>::infinity()) {
                    cap *= 1.25;
                }
                const double sup = max_abs(basis().from_spectral(u).values);
                if (!(sup <= c.blowup)) {
                    throw SolverFailure(SolverFailure::Kind::blowup, "solution exceeded the blowup threshold", t);
                }
            }
            record(tr, u, basis().from_spectral(u), t, c);
        }
        return tr;
    }

private:
    static void record(Trajectory& tr, const SpectralField& u, const GridField& ug, double t, const SolverControls& c)
    {
        tr.times.push_back(t);
        tr.diagnostics.push_back(diagnose(ug, t));
        if (c.store_states) {
            tr.states.push_back(u);
        }
    }

    EvolutionOperator op_;
};

inline SpectralField step_imex(const SpectralField& u, double t, double dt, const ModelParams& p,
                               const ForcingSpec& f = {})
{
    return Solver(u.domain, p, f).step(u, t, dt);
}

inline Trajectory solve(const GridField& u0, const ForcingSpec& f, const ModelParams& p, double T,
                        const SolverControls& c = {})
{
    return Solver(u0.domain, p, f).solve(u0, T, c);
}

inline Trajectory solve(const DomainSpec& d, const InitialData& u0, const ForcingSpec& f, const ModelParams& p,
                        double T, const SolverControls& c = {})
{
    return solve(u0.evaluate(d), f, p, T, c);
}

} // namespace fpme
