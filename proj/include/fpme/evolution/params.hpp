#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>

#include "fpme/core/fields.hpp"
#include "fpme/core/random_fields.hpp"
#include "fpme/core/transforms.hpp"

namespace fpme {

enum class PressureMode {
    exact,     // (-Lap)^{-s}
    truncated, // (-Lap)^{-1} L_eps^{1-s} / |Gamma(s-1)|, damping with L_eps^{s0}
};

/// Parameters of the regularized equation
///   u_t = delta Lap u + div(H(u) grad P[G(u)]) - varpi A^{s0} J(u) + f.
struct ModelParams {
    double m1 = 1.0;
    double m2 = 1.0;
    double s = 0.5;
    double delta = 0.0;
    double varpi = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    bool use_mollified = false;
    PressureMode pressure = PressureMode::exact;
    double eps = 1e-3; // truncation parameter in PressureMode::truncated
    bool transport = true; // false drops the div(H grad P) term (linear limit)

    double gamma() const { return m1 + m2; }
    double m0() const { return std::min(m1, m2) / 8.0; }
    double s0() const { return (std::max(1.0 - 2.0 * s, 0.0) + 1.0) / 2.0; }

    void validate() const
    {
        if (!(m1 > 0.0) || !(m2 > 0.0)) {
            throw InvalidArgument("m1 and m2 must be positive");
        }
        if (!(s > 0.0 && s < 1.0)) {
            throw InvalidArgument("s must lie in (0,1)");
        }
        if (!(delta >= 0.0) || !(varpi >= 0.0)) {
            throw InvalidArgument("delta and varpi must be nonnegative");
        }
        if (!(kappa1 >= 0.0 && kappa1 <= 1.0) || !(kappa2 >= 0.0 && kappa2 <= 1.0)) {
            throw InvalidArgument("kappa1 and kappa2 must lie in [0,1]");
        }
        if (pressure == PressureMode::truncated && !(eps > 0.0)) {
            throw InvalidArgument("truncated pressure requires eps > 0");
        }
        if (!std::isfinite(delta) || !std::isfinite(varpi)) {
            throw InvalidArgument("delta and varpi must be finite");
        }
    }

    /// Mollification parameters in effect.  Outside mollified mode they are
    /// zero, except for a 1e-10 floor where the unmollified map is not
    /// Lipschitz at the origin.
    double effective_kappa1() const
    {
        if (use_mollified) {
            return kappa1;
        }
        return m0() < 1.0 && varpi > 0.0 ? 1e-10 : 0.0;
    }

    double effective_kappa2() const
    {
        if (use_mollified) {
            return kappa2;
        }
        return std::min(m1, m2) < 1.0 ? 1e-10 : 0.0;
    }
};

enum class ForcingKind { zero, constant, field, time_scaled };

/// f(x,t).  `constant`: amplitude on every node.  `field`: amplitude times
/// a fixed profile.  `time_scaled`: the field form times (1+t)^{-decay}.
struct ForcingSpec {
    ForcingKind kind = ForcingKind::zero;
    double amplitude = 0.0;
    GridField profile{};
    double decay = 1.0;

    static ForcingSpec zero() { return {}; }

    static ForcingSpec constant(double a)
    {
        ForcingSpec f;
        f.kind = ForcingKind::constant;
        f.amplitude = a;
        return f;
    }

    static ForcingSpec field(GridField p, double a = 1.0)
    {
        ForcingSpec f;
        f.kind = ForcingKind::field;
        f.amplitude = a;
        f.profile = std::move(p);
        return f;
    }

    static ForcingSpec time_scaled(GridField p, double a, double decay)
    {
        ForcingSpec f = field(std::move(p), a);
        f.kind = ForcingKind::time_scaled;
        f.decay = decay;
        return f;
    }

    bool is_zero() const { return kind == ForcingKind::zero || amplitude == 0.0; }

    double time_factor(double t) const
    {
        return kind == ForcingKind::time_scaled ? std::pow(1.0 + t, -decay) : 1.0;
    }

    /// Nodal values at time t.
    GridField at(const DomainSpec& d, double t) const
    {
        GridField out(d);
        if (is_zero()) {
            return out;
        }
        if (kind == ForcingKind::constant) {
            std::fill(out.values.begin(), out.values.end(), amplitude);
            return out;
        }
        detail::require_same(profile.domain, d, "forcing profile");
        const double a = amplitude * time_factor(t);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = a * profile[i];
        }
        return out;
    }

    void validate(const DomainSpec& d) const
    {
        if (!std::isfinite(amplitude) || !std::isfinite(decay) || decay < 0.0) {
            throw InvalidArgument("forcing amplitude and decay must be finite, decay >= 0");
        }
        if ((kind == ForcingKind::field || kind == ForcingKind::time_scaled)) {
            detail::require_same(profile.domain, d, "forcing profile");
            if (!all_finite(profile.values)) {
                throw InvalidArgument("forcing profile must be finite");
            }
        }
    }

    /// ||f^+||_{L^1(Omega_t)} and ||f^-||_{L^1(Omega_t)}.
    std::pair<double, double> l1_parts(const DomainSpec& d, double t) const
    {
        if (is_zero() || t <= 0.0) {
            return {0.0, 0.0};
        }
        const GridField f0 = at(d, 0.0);
        double pos = 0.0;
        double neg = 0.0;
        for (double v : f0.values) {
            (v > 0 ? pos : neg) += std::abs(v);
        }
        double tint = t;
        if (kind == ForcingKind::time_scaled) {
            tint = decay == 1.0 ? std::log1p(t) : (std::pow(1.0 + t, 1.0 - decay) - 1.0) / (1.0 - decay);
        }
        const double w = d.cell_volume() * tint;
        return {pos * w, neg * w};
    }

    /// sup over Omega x (0,t) of |f|.
    double sup_norm() const
    {
        if (is_zero()) {
            return 0.0;
        }
        if (kind == ForcingKind::constant) {
            return std::abs(amplitude);
        }
        return std::abs(amplitude) * max_abs(profile.values);
    }
};

enum class InitialPreset { zero, gaussian_bump, box, spike, single_mode, random_bandlimited, signed_dipole };

struct InitialData {
    InitialPreset preset = InitialPreset::gaussian_bump;
    double amplitude = 1.0;
    double width = 0.1;
    std::array<double, 2> location{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    double mass = 0.0; // > 0: rescale so that int |u0| equals mass
    double separation = 0.0; // dipole lobe distance; 0 means 4 * width
    std::array<std::size_t, 2> mode{1, 1};
    std::uint64_t seed = 0;

    GridField evaluate(const DomainSpec& d) const
    {
        d.validate();
        GridField u(d);
        std::array<double, 2> c{};
        for (int a = 0; a < 2; ++a) {
            c[a] = std::isnan(location[a]) ? d.lengths[a] / 2.0 : location[a];
        }
        auto gauss = [&](double x, double y, double x0, double y0) {
            double r2 = (x - x0) * (x - x0);
            if (d.dim == 2) {
                r2 += (y - y0) * (y - y0);
            }
            return std::exp(-r2 / (2.0 * width * width));
        };
        if (!(width > 0.0) && preset != InitialPreset::single_mode && preset != InitialPreset::random_bandlimited &&
            preset != InitialPreset::zero) {
            throw InvalidArgument("initial width must be positive");
        }
        const double sep = separation > 0.0 ? separation : 4.0 * width;
        switch (preset) {
        case InitialPreset::zero:
            break;
        case InitialPreset::random_bandlimited: {
            std::mt19937_64 rng(seed);
            u = SineBasis(d).from_spectral(random_bandlimited(d, rng));
            for (double& v : u.values) {
                v *= amplitude;
            }
            break;
        }
        case InitialPreset::single_mode: {
            if (mode[0] < 1 || mode[0] > d.points(0) || (d.dim == 2 && (mode[1] < 1 || mode[1] > d.points(1)))) {
                throw InvalidArgument("single_mode index out of range");
            }
            const std::size_t idx = (mode[0] - 1) * d.points(1) + (d.dim == 2 ? mode[1] - 1 : 0);
            u = SineBasis(d).from_spectral(SpectralField::unit(d, idx));
            for (double& v : u.values) {
                v *= amplitude;
            }
            break;
        }
        default:
            for (std::size_t i = 0; i < d.points(0); ++i) {
                for (std::size_t j = 0; j < d.points(1); ++j) {
                    const double x = d.node(0, i);
                    const double y = d.dim == 2 ? d.node(1, j) : 0.0;
                    double v = 0.0;
                    switch (preset) {
                    case InitialPreset::gaussian_bump:
                    case InitialPreset::spike:
                        v = amplitude * gauss(x, y, c[0], c[1]);
                        break;
                    case InitialPreset::box: {
                        bool inside = std::abs(x - c[0]) <= width;
                        if (d.dim == 2) {
                            inside = inside && std::abs(y - c[1]) <= width;
                        }
                        v = inside ? amplitude : 0.0;
                        break;
                    }
                    case InitialPreset::signed_dipole:
                        v = amplitude * (gauss(x, y, c[0] - sep / 2.0, c[1]) - gauss(x, y, c[0] + sep / 2.0, c[1]));
                        break;
                    default:
                        break;
                    }
                    u.at(i, j) = v;
                }
            }
        }
        double target = mass;
        if (preset == InitialPreset::spike && !(target > 0.0)) {
            target = 1.0;
        }
        if (target > 0.0) {
            double l1 = 0.0;
            for (double v : u.values) {
                l1 += std::abs(v);
            }
            l1 *= d.cell_volume();
            if (l1 == 0.0) {
                throw InvalidArgument("cannot normalize the mass of a zero initial field");
            }
            for (double& v : u.values) {
                v *= target / l1;
            }
        }
        return u;
    }
};

} // namespace fpme
