#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fpme/core/domain.hpp"
#include "fpme/core/fields.hpp"

namespace fpme {

using ScalarMap = std::function<double(double)>;

/// Convex Phi with Phi(0) = 0 and its derivative.
struct ConvexProfile {
    std::string name;
    ScalarMap phi;
    ScalarMap dphi;
    bool convex = true;

    /// Samples Phi on `samples` points of [lo, hi] and rejects Phi(0) != 0 or
    /// a negative second difference beyond roundoff.
    void validate(double lo, double hi, std::size_t samples = 10000) const
    {
        if (!phi || !dphi) {
            throw InvalidArgument("profile '" + name + "' is incomplete");
        }
        if (std::abs(phi(0.0)) > 1e-14) {
            throw InvalidArgument("profile '" + name + "' must vanish at 0");
        }
        if (!(hi > lo)) {
            hi = lo + 1.0;
        }
        const double step = (hi - lo) / static_cast<double>(samples - 1);
        for (std::size_t i = 1; i + 1 < samples; ++i) {
            const double x = lo + step * static_cast<double>(i);
            const double a = phi(x - step);
            const double b = phi(x);
            const double c = phi(x + step);
            const double d2 = a - 2.0 * b + c;
            const double noise = 1e-12 * (std::abs(a) + 2.0 * std::abs(b) + std::abs(c)) + 1e-300;
            if (d2 < -noise) {
                throw InvalidArgument("profile '" + name + "' is not convex near " + std::to_string(x));
            }
        }
        if (!convex) {
            throw InvalidArgument("profile '" + name + "' is flagged non-convex");
        }
    }
};

/// Pair (psi, Psi) with psi' = (Psi')^2.
struct SVProfile {
    std::string name;
    ScalarMap psi;
    ScalarMap dpsi;
    ScalarMap Psi;
    ScalarMap dPsi;

    void validate(double lo, double hi, std::size_t samples = 10000) const
    {
        if (!psi || !dpsi || !Psi || !dPsi) {
            throw InvalidArgument("SV profile '" + name + "' is incomplete");
        }
        if (!(hi > lo)) {
            hi = lo + 1.0;
        }
        const double step = (hi - lo) / static_cast<double>(samples - 1);
        for (std::size_t i = 0; i < samples; ++i) {
            const double x = lo + step * static_cast<double>(i);
            const double dp = dpsi(x);
            if (dp < 0.0) {
                throw InvalidArgument("SV profile '" + name + "' has decreasing psi");
            }
            const double q = dPsi(x);
            if (std::abs(q * q - dp) > 1e-10 * std::max(1.0, dp)) {
                throw InvalidArgument("SV profile '" + name + "' violates psi' = (Psi')^2");
            }
        }
    }
};

inline ConvexProfile identity_profile()
{
    return {"identity", [](double u) { return u; }, [](double) { return 1.0; }};
}

inline ConvexProfile square_profile()
{
    return {"square", [](double u) { return u * u; }, [](double u) { return 2.0 * u; }};
}

inline ConvexProfile quartic_profile()
{
    return {"quartic", [](double u) { return u * u * u * u; }, [](double u) { return 4.0 * u * u * u; }};
}

/// C^2 stand-in for |u|: sqrt(u^2 + eta^2) - eta.
inline ConvexProfile smooth_abs_profile(double eta = 1e-3)
{
    return {"smooth_abs",
            [eta](double u) { return std::hypot(u, eta) - eta; },
            [eta](double u) { return u / std::hypot(u, eta); }};
}

inline std::vector<ConvexProfile> convex_registry()
{
    return {identity_profile(), square_profile(), quartic_profile(), smooth_abs_profile()};
}

inline SVProfile identity_sv_profile()
{
    auto id = [](double u) { return u; };
    auto one = [](double) { return 1.0; };
    return {"identity", id, one, id, one};
}

/// psi(u) = |u|^{q-1} u, Psi(u) = (2 sqrt(q)/(q+1)) |u|^{(q-1)/2} u.
inline SVProfile power_sv_profile(double q)
{
    if (!(q > 0.0)) {
        throw InvalidArgument("power SV profile requires q > 0");
    }
    const double c = 2.0 * std::sqrt(q) / (q + 1.0);
    return {"power",
            [q](double u) { return signed_power(u, q); },
            [q](double u) { return u == 0.0 ? (q == 1.0 ? 1.0 : (q < 1.0 ? INFINITY : 0.0)) : q * std::pow(std::abs(u), q - 1.0); },
            [q, c](double u) { return c * signed_power(u, (q + 1.0) / 2.0); },
            [q, c](double u) {
                return u == 0.0 ? (q == 1.0 ? c : (q < 1.0 ? INFINITY : 0.0))
                                : c * (q + 1.0) / 2.0 * std::pow(std::abs(u), (q - 1.0) / 2.0);
            }};
}

} // namespace fpme
