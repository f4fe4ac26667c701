#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "fpme/core/parallel.hpp"
#include "fpme/evolution/solver.hpp"

namespace fpme {

struct SweepRow {
    ModelParams params;
    double diff_to_next = 0.0; // ||u_level - u_next||_{L^1(Omega_T)}; unset on the last level
};

struct SweepTable {
    std::vector<SweepRow> rows;
    double refinement_error = 0.0; // same norm, final level at dt against dt/2
    double dt = 0.0;
    bool decreasing = false; // strictly decreasing consecutive differences
    bool divergent = false;  // the last difference exceeds the first

    double final_difference() const { return rows.size() >= 2 ? rows[rows.size() - 2].diff_to_next : 0.0; }
};

/// int_0^T ||a(t) - b(t)||_{L^1} dt by the trapezoid rule on shared record times.
inline double l1_space_time_distance(const Trajectory& a, const Trajectory& b, const SineBasis& basis)
{
    if (a.times.size() != b.times.size() || a.states.size() != a.times.size() || b.states.size() != b.times.size()) {
        throw ShapeMismatch("trajectories are not recorded on the same times");
    }
    std::vector<double> d(a.times.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
        if (a.times[k] != b.times[k]) {
            throw ShapeMismatch("trajectories are not recorded on the same times");
        }
        const GridField g = basis.from_spectral(a.states[k] - b.states[k]);
        double s = 0.0;
        for (double v : g.values) {
            s += std::abs(v);
        }
        d[k] = s * basis.domain().cell_volume();
    }
    double total = 0.0;
    for (std::size_t k = 1; k < d.size(); ++k) {
        total += 0.5 * (a.times[k] - a.times[k - 1]) * (d[k] + d[k - 1]);
    }
    return total;
}

/// Solves along a schedule of regularization levels with one fixed step and
/// reports Cauchy differences between consecutive levels.  If controls do
/// not fix dt, half the CFL step of the most restrictive level at t = 0 is
/// used for every level.
inline SweepTable regularization_sweep(const GridField& u0, const ForcingSpec& f, const std::vector<ModelParams>& schedule,
                                       double T, SolverControls controls = {}, std::size_t jobs = 1)
{
    if (schedule.size() < 2) {
        throw InvalidArgument("a regularization sweep needs at least two levels");
    }
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        const auto& a = schedule[i - 1];
        const auto& b = schedule[i];
        if (b.delta > a.delta || b.varpi > a.varpi || b.kappa1 > a.kappa1 || b.kappa2 > a.kappa2) {
            throw InvalidArgument("regularization parameters must be nonincreasing along the schedule");
        }
    }
    auto basis = std::make_shared<const SineBasis>(u0.domain);
    const SpectralField uh = basis->to_spectral(u0);
    if (!(controls.fixed_dt > 0.0)) {
        double dt = controls.dt_max;
        for (const auto& p : schedule) {
            dt = std::min(dt, 0.5 * EvolutionOperator(basis, p, f).stable_dt(uh, controls.c_cfl));
        }
        if (!std::isfinite(dt)) {
            dt = T / 100.0;
        }
        controls.fixed_dt = dt;
    }
    controls.spacing = RecordSpacing::linear;
    controls.store_states = true;

    std::vector<Trajectory> runs(schedule.size() + 1);
    parallel_for(schedule.size() + 1, jobs, [&](std::size_t i) {
        if (i < schedule.size()) {
            runs[i] = Solver(basis, schedule[i], f).solve(u0, T, controls);
        } else {
            SolverControls fine = controls;
            fine.fixed_dt /= 2.0;
            runs[i] = Solver(basis, schedule.back(), f).solve(u0, T, fine);
        }
    });

    SweepTable out;
    out.dt = controls.fixed_dt;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        SweepRow row{schedule[i], std::numeric_limits<double>::quiet_NaN()};
        if (i + 1 < schedule.size()) {
            row.diff_to_next = l1_space_time_distance(runs[i], runs[i + 1], *basis);
        }
        out.rows.push_back(row);
    }
    out.refinement_error = l1_space_time_distance(runs[schedule.size() - 1], runs[schedule.size()], *basis);
    out.decreasing = true;
    for (std::size_t i = 1; i + 1 < out.rows.size(); ++i) {
        if (!(out.rows[i].diff_to_next < out.rows[i - 1].diff_to_next)) {
            out.decreasing = false;
        }
    }
    out.divergent = out.rows.size() > 2 && out.final_difference() > out.rows.front().diff_to_next;
    return out;
}

} // namespace fpme
