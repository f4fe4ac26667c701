#pragma once

#include <cmath>
#include <vector>

#include "fpme/core/fit.hpp"
#include "fpme/estimates/functionals.hpp"

namespace fpme {

/// Fit window as fractions of the final recorded time.
struct FitWindow {
    double lo = 0.1;
    double hi = 0.8;
};

struct ExponentFit {
    double t_min = 0.0;
    double t_max = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double theoretical_slope = 0.0;
    double rel_error = 0.0; // |slope - theory| / |theory|, or |slope| when theory is 0
    std::size_t points = 0;
    bool inconclusive = false; // r^2 below 0.95

    bool within(double rel_tol) const
    {
        return theoretical_slope == 0.0 ? std::abs(slope) <= rel_tol : rel_error <= rel_tol;
    }
};

/// -(1 - q0/q) N / (N (gamma-1) + 2 q0 (1-s)); q may be infinite.
inline double smoothing_slope(int N, double gamma, double s, double q0, double q)
{
    const double den = N * (gamma - 1.0) + 2.0 * q0 * (1.0 - s);
    if (!(den > 0.0)) {
        throw InvalidArgument("smoothing exponent needs N(gamma-1) + 2 q0 (1-s) > 0");
    }
    if (q < q0) {
        throw InvalidArgument("smoothing exponent needs q >= q0");
    }
    const double frac = std::isinf(q) ? 1.0 : 1.0 - q0 / q;
    return -frac * N / den;
}

/// -(q - q0) N / (N (gamma-1) + 2 q0 (1-s)) - 1.
inline double dissipation_slope(int N, double gamma, double s, double q0, double q)
{
    const double den = N * (gamma - 1.0) + 2.0 * q0 * (1.0 - s);
    if (!(den > 0.0)) {
        throw InvalidArgument("dissipation exponent needs N(gamma-1) + 2 q0 (1-s) > 0");
    }
    if (!(q > 1.0) || q < q0 || std::isinf(q)) {
        throw InvalidArgument("dissipation exponent needs q in [q0, inf) and q > 1");
    }
    return -(q - q0) * N / den - 1.0;
}

/// Least-squares slope of log y against log t over [lo T, hi T], T the final time.
inline ExponentFit fit_power_law(const std::vector<double>& t, const std::vector<double>& y, const FitWindow& w,
                                 double theoretical)
{
    if (t.size() != y.size() || t.empty()) {
        throw InvalidArgument("fit_power_law: empty or mismatched series");
    }
    if (!(w.lo > 0.0) || !(w.hi > w.lo) || w.hi > 1.0) {
        throw InvalidArgument("fit window must satisfy 0 < lo < hi <= 1");
    }
    const double T = t.back();
    ExponentFit out;
    out.t_min = w.lo * T;
    out.t_max = w.hi * T;
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] >= out.t_min && t[k] <= out.t_max && t[k] > 0.0 && y[k] > 0.0) {
            lx.push_back(std::log(t[k]));
            ly.push_back(std::log(y[k]));
        }
    }
    if (lx.size() < 3) {
        throw InvalidArgument("fit window holds fewer than three positive samples");
    }
    const LineFit f = fit_line(lx, ly);
    out.slope = f.slope;
    out.intercept = f.intercept;
    out.r2 = f.r2;
    out.points = f.points;
    out.theoretical_slope = theoretical;
    out.rel_error = theoretical == 0.0 ? std::abs(f.slope) : std::abs(f.slope - theoretical) / std::abs(theoretical);
    out.inconclusive = f.r2 < 0.95;
    return out;
}

/// Decay of ||u(t)||_q against the smoothing exponent.
inline ExponentFit fit_smoothing_exponent(const Trajectory& tr, double q0, double q, const ModelParams& p,
                                          const FitWindow& w = {})
{
    const double theory = smoothing_slope(tr.domain.dim, p.gamma(), p.s, q0, q);
    const SineBasis basis(tr.domain);
    std::vector<double> y;
    for (const auto& st : tr.states) {
        y.push_back(lp_norm(basis.from_spectral(st), q));
    }
    if (y.size() != tr.times.size()) {
        throw InvalidArgument("trajectory has no stored states");
    }
    return fit_power_law(tr.times, y, w, theory);
}

/// Decay of D_q(t) against the dissipation exponent.
inline ExponentFit fit_dissipation_exponent(const Trajectory& tr, double q, double q0, const ModelParams& p,
                                            const FitWindow& w = {})
{
    const double theory = dissipation_slope(tr.domain.dim, p.gamma(), p.s, q0, q);
    const SineBasis basis(tr.domain);
    std::vector<double> y;
    for (const auto& st : tr.states) {
        y.push_back(dissipation(basis, basis.from_spectral(st), q, p.s, p.gamma()));
    }
    if (y.size() != tr.times.size()) {
        throw InvalidArgument("trajectory has no stored states");
    }
    return fit_power_law(tr.times, y, w, theory);
}

} // namespace fpme
