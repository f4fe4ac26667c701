#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "fpme/core/transforms.hpp"
#include "fpme/evolution/solver.hpp"

namespace fpme {

inline constexpr double infinity_norm = std::numeric_limits<double>::infinity();

/// int |u|^p with nodal quadrature.
inline double lp_integral(const GridField& u, double p)
{
    double s = 0.0;
    for (double v : u.values) {
        s += std::pow(std::abs(v), p);
    }
    return s * u.domain.cell_volume();
}

/// ||u||_p; p = infinity gives the grid maximum.
inline double lp_norm(const GridField& u, double p)
{
    if (!(p >= 1.0)) {
        throw InvalidArgument("lp_norm needs p >= 1");
    }
    if (std::isinf(p)) {
        return max_abs(u.values);
    }
    return std::pow(lp_integral(u, p), 1.0 / p);
}

/// ||(-Lap)^{(1-s)/2} (|u|^{(gamma+p-1)/2 - 1} u)||^2 by Parseval.
inline double dissipation(const SineBasis& basis, const GridField& u, double p, double s, double gamma)
{
    if (!(p > 1.0)) {
        throw InvalidArgument("dissipation needs p > 1");
    }
    const double e = (gamma + p - 1.0) / 2.0;
    const GridField w = map_grid(u, [e](double v) { return signed_power(v, e); });
    const SpectralField wh = basis.to_spectral(w);
    const auto& lam = basis.eigen().lambda;
    double total = 0.0;
    for (std::size_t j = 0; j < wh.size(); ++j) {
        total += std::pow(lam[j], 1.0 - s) * wh[j] * wh[j];
    }
    return total;
}

inline double dissipation(const SpectralField& u, double p, double s, double gamma)
{
    const SineBasis basis(u.domain);
    return dissipation(basis, basis.from_spectral(u), p, s, gamma);
}

/// ||(-Lap)^{(1-s)/2} (|u|^{gamma/2 + theta - 1} u / (|u|^{2 theta} + 1))||^2.
inline double theta_integrand(const SineBasis& basis, const GridField& u, double s, double gamma, double theta)
{
    if (!(theta > 0.0)) {
        throw InvalidArgument("theta must be positive");
    }
    const GridField w = map_grid(u, [&](double v) {
        const double a = std::abs(v);
        return signed_power(v, gamma / 2.0 + theta) / (std::pow(a, 2.0 * theta) + 1.0);
    });
    const SpectralField wh = basis.to_spectral(w);
    const auto& lam = basis.eigen().lambda;
    double total = 0.0;
    for (std::size_t j = 0; j < wh.size(); ++j) {
        total += std::pow(lam[j], 1.0 - s) * wh[j] * wh[j];
    }
    return total;
}

/// M = ||u0||_1 + ||f||_{L^1(Omega_T)}.
inline double data_mass(const GridField& u0, const ForcingSpec& f, double T)
{
    const auto [fp, fm] = f.l1_parts(u0.domain, T);
    return lp_integral(u0, 1.0) + fp + fm;
}

inline double trapezoid(const std::vector<double>& t, const std::vector<double>& y)
{
    if (t.size() != y.size()) {
        throw ShapeMismatch("trapezoid: abscissae and values differ in length");
    }
    double s = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) {
        s += 0.5 * (t[k] - t[k - 1]) * (y[k] + y[k - 1]);
    }
    return s;
}

/// Running trapezoid integral, same length as t, starting at 0.
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& t, const std::vector<double>& y)
{
    std::vector<double> out(t.size(), 0.0);
    for (std::size_t k = 1; k < t.size(); ++k) {
        out[k] = out[k - 1] + 0.5 * (t[k] - t[k - 1]) * (y[k] + y[k - 1]);
    }
    return out;
}

struct FunctionalRecord {
    double t = 0.0;
    std::map<double, double> lp_norms; // includes infinity
    double mass_plus = 0.0;
    double mass_minus = 0.0;
    std::map<double, double> dissipation; // D_p for each requested p > 1
    std::map<double, double> theta;       // theta integrand per theta
    double M = 0.0;
};

struct FunctionalRequest {
    std::vector<double> p_values{1.0, 2.0};
    std::vector<double> thetas{};
};

inline std::vector<FunctionalRecord> record_functionals(const Trajectory& tr, const GridField& u0, const ForcingSpec& f,
                                                        const FunctionalRequest& req = {})
{
    if (tr.states.size() != tr.times.size()) {
        throw InvalidArgument("trajectory has no stored states");
    }
    const SineBasis basis(tr.domain);
    const double T = tr.times.empty() ? 0.0 : tr.times.back();
    const double M = data_mass(u0, f, T);
    const double gamma = tr.params.gamma();
    std::vector<FunctionalRecord> out;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        const GridField u = basis.from_spectral(tr.states[k]);
        FunctionalRecord r;
        r.t = tr.times[k];
        r.M = M;
        for (double p : req.p_values) {
            r.lp_norms[p] = lp_norm(u, p);
            if (p > 1.0) {
                r.dissipation[p] = dissipation(basis, u, p, tr.params.s, gamma);
            }
        }
        r.lp_norms[infinity_norm] = max_abs(u.values);
        const auto d = diagnose(u, r.t);
        r.mass_plus = d.mass_plus;
        r.mass_minus = d.mass_minus;
        for (double th : req.thetas) {
            r.theta[th] = theta_integrand(basis, u, tr.params.s, gamma, th);
        }
        out.push_back(std::move(r));
    }
    return out;
}

/// ||u||_p / |Omega|^{1/p} must be nondecreasing in p.
inline bool holder_ladder_consistent(const FunctionalRecord& r, double volume, double tol = 1e-10)
{
    double prev = -1.0;
    for (const auto& [p, v] : r.lp_norms) {
        const double scaled = std::isinf(p) ? v : v / std::pow(volume, 1.0 / p);
        if (scaled < prev - tol * std::max(1.0, prev)) {
            return false;
        }
        prev = scaled;
    }
    return true;
}

} // namespace fpme
