#pragma once

#include <cmath>

#include "fpme/core/fields.hpp"
#include "fpme/evolution/params.hpp"

namespace fpme {

/// |u|^{m+1} u / (u^2 + kappa); with kappa = 0 the limit |u|^{m-1} u.
inline double mollified_odd_power(double u, double m, double kappa)
{
    if (u == 0.0) {
        return 0.0;
    }
    if (kappa == 0.0) {
        return signed_power(u, m);
    }
    return std::pow(std::abs(u), m + 1.0) * u / (u * u + kappa);
}

/// |u|^{m+2} / (u^2 + kappa); with kappa = 0 the limit |u|^m.
inline double mollified_abs_power(double u, double m, double kappa)
{
    if (u == 0.0) {
        return 0.0;
    }
    if (kappa == 0.0) {
        return std::pow(std::abs(u), m);
    }
    return std::pow(std::abs(u), m + 2.0) / (u * u + kappa);
}

/// Derivative of mollified_odd_power: |u|^{m+1}(m u^2 + (m+2) kappa)/(u^2+kappa)^2.
inline double mollified_odd_power_derivative(double u, double m, double kappa)
{
    const double a = std::abs(u);
    if (kappa == 0.0) {
        return a == 0.0 ? (m == 1.0 ? 1.0 : (m < 1.0 ? INFINITY : 0.0)) : m * std::pow(a, m - 1.0);
    }
    const double d = u * u + kappa;
    return std::pow(a, m + 1.0) * (m * u * u + (m + 2.0) * kappa) / (d * d);
}

struct NonlinearFields {
    GridField J;
    GridField H;
    GridField G;
};

inline NonlinearFields nonlinear_functions(const GridField& u, const ModelParams& p)
{
    p.validate();
    const double k1 = p.effective_kappa1();
    const double k2 = p.effective_kappa2();
    NonlinearFields out{GridField(u.domain), GridField(u.domain), GridField(u.domain)};
    for (std::size_t i = 0; i < u.size(); ++i) {
        out.J[i] = mollified_odd_power(u[i], p.m0(), k1);
        out.H[i] = mollified_abs_power(u[i], p.m1, k2);
        out.G[i] = mollified_odd_power(u[i], p.m2, k2);
    }
    return out;
}

} // namespace fpme
