#pragma once

#include <cmath>
#include <limits>

#include "fpme/core/domain.hpp"

namespace fpme::special {

namespace detail {

constexpr int kMaxIter = 1000;
constexpr double kEps = 1e-16;

// Lower incomplete gamma gamma(a,x) by its power series, x < a + 1 region.
inline double lower_gamma_series(double a, double x)
{
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < kMaxIter; ++k) {
        term *= x / (a + k);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) {
            break;
        }
    }
    return sum * std::exp(a * std::log(x) - x);
}

// Upper incomplete gamma Gamma(a,x) by the Legendre continued fraction
// evaluated with the modified Lentz algorithm.
inline double upper_gamma_cf(double a, double x)
{
    constexpr double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) {
            break;
        }
    }
    return std::exp(a * std::log(x) - x) * h;
}

} // namespace detail

/// Upper incomplete gamma Gamma(a, x) for a > 0, x >= 0.  Series below
/// x = 1, continued fraction above.
inline double upper_incomplete_gamma(double a, double x)
{
    if (!(a > 0.0) || !(x >= 0.0)) {
        throw InvalidArgument("upper_incomplete_gamma requires a > 0 and x >= 0");
    }
    if (x == 0.0) {
        return std::tgamma(a);
    }
    if (x < 1.0) {
        return std::tgamma(a) - detail::lower_gamma_series(a, x);
    }
    return detail::upper_gamma_cf(a, x);
}

/// |Gamma(-alpha)| = Gamma(1-alpha)/alpha for alpha in (0,1).  This is the
/// value of the integral of (1 - e^{-t}) t^{-1-alpha} over (0, inf).
inline double abs_gamma_neg(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidArgument("abs_gamma_neg requires alpha in (0,1)");
    }
    return std::tgamma(1.0 - alpha) / alpha;
}

} // namespace fpme::special
