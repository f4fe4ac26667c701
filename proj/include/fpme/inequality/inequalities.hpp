#pragma once

#include <cmath>
#include <vector>

#include "fpme/core/fields.hpp"
#include "fpme/core/fit.hpp"
#include "fpme/core/special_functions.hpp"
#include "fpme/core/transforms.hpp"
#include "fpme/inequality/profiles.hpp"

namespace fpme {

/// Mutation switch for sensitivity checks: flips the sign of every operator
/// multiplier used by the gap functions.
struct FaultInjection {
    bool negate_multiplier = false;

    double sign() const { return negate_multiplier ? -1.0 : 1.0; }
};

namespace detail {

inline std::pair<double, double> field_range(const GridField& f)
{
    double lo = 0.0;
    double hi = 0.0;
    for (double v : f.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

inline GridField apply_on_grid(const SineBasis& basis, const GridField& u, const MultiplierSpec& m, double sign)
{
    SpectralField c = basis.apply(basis.to_spectral(u), m);
    c *= sign;
    return basis.from_spectral(c);
}

} // namespace detail

/// Phi'(f) L[f] - L[Phi(f)] at every node, L the truncated-semigroup
/// operator with parameters (alpha, eps).
inline GridField cordoba_gap(const SineBasis& basis, const GridField& f, const ConvexProfile& profile, double alpha,
                             double eps, const FaultInjection& fault = {})
{
    detail::require_same(f.domain, basis.domain(), "cordoba_gap");
    const auto [lo, hi] = detail::field_range(f);
    profile.validate(lo, hi);
    const MultiplierSpec op = TruncatedSemigroup{alpha, eps};
    const GridField lf = detail::apply_on_grid(basis, f, op, fault.sign());
    const GridField lphi = detail::apply_on_grid(basis, map_grid(f, profile.phi), op, fault.sign());
    GridField gap(f.domain);
    for (std::size_t i = 0; i < gap.size(); ++i) {
        gap[i] = profile.dphi(f[i]) * lf[i] - lphi[i];
    }
    return gap;
}

/// Scale used for the nodewise Cordoba tolerance: ||Phi'(f)||_inf ||L f||_inf.
inline double cordoba_scale(const SineBasis& basis, const GridField& f, const ConvexProfile& profile, double alpha,
                            double eps)
{
    const GridField lf = detail::apply_on_grid(basis, f, TruncatedSemigroup{alpha, eps}, 1.0);
    return max_abs(map_grid(f, profile.dphi).values) * max_abs(lf.values);
}

/// Both sides of the Stroock-Varopoulos inequality for (-Laplacian)^alpha.
struct SVSides {
    double lhs = 0.0; // int psi(u) (-Lap)^alpha u
    double rhs = 0.0; // ||(-Lap)^{alpha/2} Psi(u)||^2

    double gap() const { return lhs - rhs; }
    double scale() const { return std::abs(lhs) + std::abs(rhs); }
};

inline SVSides sv_sides(const SineBasis& basis, const GridField& u, const SVProfile& profile, double alpha,
                        const FaultInjection& fault = {})
{
    detail::require_same(u.domain, basis.domain(), "sv_gap");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidArgument("sv_gap requires alpha in (0,1)");
    }
    const SpectralField uc = basis.to_spectral(u);
    const SpectralField psi = basis.to_spectral(map_grid(u, profile.psi));
    const SpectralField big = basis.to_spectral(map_grid(u, profile.Psi));
    SVSides s;
    s.lhs = fault.sign() * spectral_inner(psi, apply_power(uc, basis.eigen(), alpha));
    s.rhs = fault.sign() * weighted_energy(big, basis.eigen(), alpha);
    return s;
}

inline double sv_gap(const SineBasis& basis, const GridField& u, const SVProfile& profile, double alpha,
                     const FaultInjection& fault = {})
{
    const auto [lo, hi] = detail::field_range(u);
    profile.validate(lo, hi);
    return sv_sides(basis, u, profile, alpha, fault).gap();
}

inline double power_sv_constant(double q1, double q2)
{
    return 4.0 * q1 * q2 / ((q1 + q2) * (q1 + q2));
}

/// int |u|^{q1-1}u (-Lap)^alpha(|u|^{q2-1}u)
///   - 4 q1 q2/(q1+q2)^2 ||(-Lap)^{alpha/2}(|u|^{(q1+q2)/2-1}u)||^2.
inline SVSides power_sv_sides(const SineBasis& basis, const GridField& u, double q1, double q2, double alpha,
                              const FaultInjection& fault = {})
{
    detail::require_same(u.domain, basis.domain(), "power_sv_gap");
    if (!(q1 > 0.0) || !(q2 > 0.0)) {
        throw InvalidArgument("power_sv_gap requires q1, q2 > 0");
    }
    const SpectralField a = basis.to_spectral(map_grid(u, [q1](double x) { return signed_power(x, q1); }));
    const SpectralField b = basis.to_spectral(map_grid(u, [q2](double x) { return signed_power(x, q2); }));
    const double qm = (q1 + q2) / 2.0;
    const SpectralField c = basis.to_spectral(map_grid(u, [qm](double x) { return signed_power(x, qm); }));
    SVSides s;
    s.lhs = fault.sign() * spectral_inner(a, apply_power(b, basis.eigen(), alpha));
    s.rhs = fault.sign() * power_sv_constant(q1, q2) * weighted_energy(c, basis.eigen(), alpha);
    return s;
}

inline double power_sv_gap(const SineBasis& basis, const GridField& u, double q1, double q2, double alpha,
                           const FaultInjection& fault = {})
{
    return power_sv_sides(basis, u, q1, q2, alpha, fault).gap();
}

/// <L f, f> for the truncated-semigroup operator.
inline double positivity_form(const SineBasis& basis, const GridField& f, double alpha, double eps,
                              const FaultInjection& fault = {})
{
    detail::require_same(f.domain, basis.domain(), "positivity_form");
    const SpectralField c = basis.to_spectral(f);
    return fault.sign() * spectral_inner(c, basis.apply(c, TruncatedSemigroup{alpha, eps}));
}

struct ConvergenceRow {
    double eps;
    double error;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    LineFit fit; // log error against log eps
};

/// Errors ||(-Lap)^{-1} L_eps f - |Gamma(-alpha)| (-Lap)^{alpha-1} f||_2 over
/// a decreasing list of eps, with the fitted log-log slope.
inline ConvergenceStudy approx_convergence_study(const SineBasis& basis, const GridField& f, double alpha,
                                                 const std::vector<double>& eps_list, const FaultInjection& fault = {})
{
    detail::require_same(f.domain, basis.domain(), "approx_convergence_study");
    if (eps_list.size() < 3) {
        throw InvalidArgument("approx_convergence_study needs at least 3 eps values");
    }
    for (std::size_t i = 1; i < eps_list.size(); ++i) {
        if (!(eps_list[i] < eps_list[i - 1])) {
            throw InvalidArgument("eps values must be strictly decreasing");
        }
    }
    const SpectralField c = basis.to_spectral(f);
    const auto& eig = basis.eigen();
    const double g = special::abs_gamma_neg(alpha);
    ConvergenceStudy out;
    std::vector<double> xs;
    std::vector<double> ys;
    for (double eps : eps_list) {
        double e2 = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) {
            const double lam = eig.lambda[j];
            const double mu = fault.sign() * truncated_semigroup_multiplier(lam, alpha, eps);
            const double d = (mu - g * std::pow(lam, alpha)) / lam * c[j];
            e2 += d * d;
        }
        const double err = std::sqrt(e2);
        out.rows.push_back({eps, err});
        if (err > 0.0) {
            xs.push_back(std::log(eps));
            ys.push_back(std::log(err));
        }
    }
    if (xs.size() >= 2) {
        out.fit = fit_line(xs, ys);
    }
    return out;
}

} // namespace fpme
