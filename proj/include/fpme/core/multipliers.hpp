#pragma once

#include <cmath>
#include <variant>
#include <vector>

#include "fpme/core/eigen.hpp"
#include "fpme/core/fields.hpp"
#include "fpme/core/special_functions.hpp"

namespace fpme {

/// (-Laplacian)^alpha, alpha in (0,1].
struct FracPower {
    double alpha;
};

/// (-Laplacian)^{-s}, s in (0,1).
struct InverseFracPower {
    double s;
};

/// Heat semigroup e^{t Laplacian}, t >= 0.
struct Heat {
    double t;
};

/// Truncated semigroup operator
///   L_eps[f] = int_eps^inf (f - e^{t Laplacian} f) t^{-1-alpha} dt.
/// With `normalized` the multiplier is divided by |Gamma(-alpha)| so that
/// it tends to lambda^alpha as eps -> 0.
struct TruncatedSemigroup {
    double alpha;
    double eps;
    bool normalized = false;
};

using MultiplierSpec = std::variant<FracPower, InverseFracPower, Heat, TruncatedSemigroup>;

/// mu(eps) = int_eps^inf (1 - e^{-lambda t}) t^{-1-alpha} dt
///         = [eps^{-alpha} (1 - e^{-lambda eps}) + lambda^alpha Gamma(1-alpha, lambda eps)] / alpha.
/// The second form follows from Gamma(1-a,x) = -a Gamma(-a,x) + x^{-a} e^{-x}
/// and has no cancellation for small lambda eps.
inline double truncated_semigroup_multiplier(double lambda, double alpha, double eps)
{
    if (!(lambda > 0.0) || !(alpha > 0.0 && alpha < 1.0) || !(eps > 0.0)) {
        throw InvalidArgument("truncated_semigroup_multiplier requires lambda > 0, alpha in (0,1), eps > 0");
    }
    const double x = lambda * eps;
    const double head = -std::expm1(-x) * std::pow(eps, -alpha);
    const double tail = std::pow(lambda, alpha) * special::upper_incomplete_gamma(1.0 - alpha, x);
    return (head + tail) / alpha;
}

inline void validate(const MultiplierSpec& m)
{
    std::visit(
        [](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, FracPower>) {
                if (!(k.alpha > 0.0 && k.alpha <= 1.0)) {
                    throw InvalidArgument("frac_power requires alpha in (0,1]");
                }
            } else if constexpr (std::is_same_v<K, InverseFracPower>) {
                if (!(k.s > 0.0 && k.s < 1.0)) {
                    throw InvalidArgument("inverse_frac_power requires s in (0,1)");
                }
            } else if constexpr (std::is_same_v<K, Heat>) {
                if (!(k.t >= 0.0)) {
                    throw InvalidArgument("heat requires t >= 0");
                }
            } else {
                if (!(k.alpha > 0.0 && k.alpha < 1.0) || !(k.eps > 0.0)) {
                    throw InvalidArgument("truncated_semigroup requires alpha in (0,1) and eps > 0");
                }
            }
        },
        m);
}

/// Per-mode multiplier table for `m` on the eigenvalues of `eig`.
inline std::vector<double> multiplier_table(const EigenTable& eig, const MultiplierSpec& m)
{
    validate(m);
    std::vector<double> out(eig.lambda.size());
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            for (std::size_t i = 0; i < out.size(); ++i) {
                const double lam = eig.lambda[i];
                if constexpr (std::is_same_v<K, FracPower>) {
                    out[i] = k.alpha == 1.0 ? lam : std::pow(lam, k.alpha);
                } else if constexpr (std::is_same_v<K, InverseFracPower>) {
                    out[i] = std::pow(lam, -k.s);
                } else if constexpr (std::is_same_v<K, Heat>) {
                    out[i] = std::exp(-k.t * lam);
                } else {
                    out[i] = truncated_semigroup_multiplier(lam, k.alpha, k.eps);
                    if (k.normalized) {
                        out[i] /= special::abs_gamma_neg(k.alpha);
                    }
                }
            }
        },
        m);
    return out;
}

/// lambda_j^beta for any real beta.
inline std::vector<double> power_table(const EigenTable& eig, double beta)
{
    std::vector<double> out(eig.lambda.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = beta == 1.0 ? eig.lambda[i] : std::pow(eig.lambda[i], beta);
    }
    return out;
}

inline SpectralField apply_table(SpectralField f, const std::vector<double>& table)
{
    if (table.size() != f.size()) {
        throw ShapeMismatch("multiplier table does not match field");
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] *= table[i];
    }
    return f;
}

inline SpectralField apply_multiplier(const SpectralField& f, const EigenTable& eig, const MultiplierSpec& m)
{
    detail::require_same(f.domain, eig.domain, "apply_multiplier");
    return apply_table(f, multiplier_table(eig, m));
}

inline SpectralField apply_power(const SpectralField& f, const EigenTable& eig, double beta)
{
    detail::require_same(f.domain, eig.domain, "apply_power");
    return apply_table(f, power_table(eig, beta));
}

/// sum_j lambda_j^beta f_j^2 = || (-Laplacian)^{beta/2} f ||^2.
inline double weighted_energy(const SpectralField& f, const EigenTable& eig, double beta)
{
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double w = beta == 0.0 ? 1.0 : std::pow(eig.lambda[i], beta);
        s += w * f[i] * f[i];
    }
    return s;
}

} // namespace fpme
