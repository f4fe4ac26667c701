#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "fpme/core/random_fields.hpp"
#include "fpme/core/transforms.hpp"

using namespace fpme;
using std::numbers::pi;

namespace {

// Direct O(n^2) evaluation of f_j = h * sum_i u_i phi_j(x_i), the oracle for
// the FFT path.
SpectralField direct_sine_coefficients(const GridField& u)
{
    const DomainSpec& d = u.domain;
    SpectralField f(d);
    const std::size_t n0 = d.points(0);
    const std::size_t n1 = d.points(1);
    auto phi = [&](int axis, std::size_t j, std::size_t i) {
        return std::sqrt(2.0 / d.lengths[axis]) * std::sin((j + 1) * pi * d.node(axis, i) / d.lengths[axis]);
    };
    for (std::size_t j = 0; j < n0; ++j) {
        for (std::size_t k = 0; k < n1; ++k) {
            double s = 0.0;
            for (std::size_t a = 0; a < n0; ++a) {
                for (std::size_t b = 0; b < n1; ++b) {
                    const double py = d.dim == 2 ? phi(1, k, b) : 1.0;
                    s += u.at(a, b) * phi(0, j, a) * py;
                }
            }
            f[j * n1 + k] = s * d.cell_volume();
        }
    }
    return f;
}

GridField sample(const DomainSpec& d, auto&& fn)
{
    GridField u(d);
    for (std::size_t i = 0; i < d.points(0); ++i) {
        for (std::size_t j = 0; j < d.points(1); ++j) {
            const double y = d.dim == 2 ? d.node(1, j) : 0.0;
            u.at(i, j) = fn(d.node(0, i), y);
        }
    }
    return u;
}

double max_rel_diff(std::span<const double> a, std::span<const double> b)
{
    double num = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
    }
    return num / std::max(max_abs(b), 1e-300);
}

// Independent quadrature of int_eps^inf (1 - e^{-lambda t}) t^{-1-alpha} dt
// in the variable y = log t, with the analytic tail beyond the point where
// e^{-lambda t} underflows the tolerance.
double truncated_integral_oracle(double lambda, double alpha, double eps)
{
    using boost::math::quadrature::gauss_kronrod;
    const double t_hi = std::max(eps, 60.0 / lambda);
    auto g = [&](double y) {
        const double t = std::exp(y);
        return -std::expm1(-lambda * t) * std::exp(-alpha * y);
    };
    // Unit-length pieces in log t keep each panel smooth for the Kronrod rule.
    double body = 0.0;
    const double y0 = std::log(eps);
    const double y1 = std::log(t_hi);
    for (double a = y0; a < y1; a += 1.0) {
        body += gauss_kronrod<double, 61>::integrate(g, a, std::min(a + 1.0, y1), 8, 1e-14);
    }
    return body + std::pow(t_hi, -alpha) / alpha;
}

} // namespace

TEST(BuildEigen, OneDimensionalValues)
{
    const auto t = build_eigen(DomainSpec::line(1.0, 64));
    EXPECT_NEAR(t.lambda[0], pi * pi, 1e-13);
    for (std::size_t j = 0; j < t.lambda.size(); ++j) {
        const double jj = static_cast<double>(j + 1);
        EXPECT_NEAR(t.lambda[j] / (jj * jj), pi * pi, 1e-12);
        if (j > 0) {
            EXPECT_GT(t.lambda[j], t.lambda[j - 1]);
        }
    }
}

TEST(BuildEigen, TwoDimensionalTensorSum)
{
    const auto d = DomainSpec::rect(1.0, 2.0, 16, 12);
    const auto t = build_eigen(d);
    EXPECT_NEAR(build_eigen(DomainSpec::rect(1.0, 1.0, 8, 8)).lambda[0], 2 * pi * pi, 1e-12);
    for (std::size_t j = 0; j < 16; ++j) {
        for (std::size_t k = 0; k < 12; ++k) {
            const double expect = std::pow((j + 1) * pi / 1.0, 2) + std::pow((k + 1) * pi / 2.0, 2);
            EXPECT_NEAR(t.lambda[j * 12 + k], expect, 1e-10);
            EXPECT_GT(t.lambda[j * 12 + k], 0.0);
        }
    }
}

TEST(DomainSpec, RejectsInvalid)
{
    EXPECT_THROW(DomainSpec::line(0.0, 64), InvalidArgument);
    EXPECT_THROW(DomainSpec::line(1.0, 4), InvalidArgument);
    DomainSpec bad;
    bad.dim = 3;
    EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(ToSpectral, EigenfunctionIsSingleMode)
{
    const auto d = DomainSpec::line(1.0, 128);
    SineBasis basis(d);
    const auto f = basis.to_spectral(sample(d, [](double x, double) { return std::sin(pi * x); }));
    // sin(pi x) = phi_1 / sqrt(2)
    EXPECT_NEAR(f[0], 1.0 / std::sqrt(2.0), 1e-14);
    for (std::size_t j = 1; j < f.size(); ++j) {
        EXPECT_NEAR(f[j], 0.0, 1e-14);
    }
    const auto zero = basis.to_spectral(GridField(d));
    EXPECT_EQ(max_abs(zero.coeffs), 0.0);
}

TEST(ToSpectral, MatchesDirectSumOracle)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (const auto& d : {DomainSpec::line(1.7, 37), DomainSpec::rect(1.0, 0.6, 12, 9)}) {
        SineBasis basis(d);
        GridField u(d);
        for (double& v : u.values) {
            v = unif(rng);
        }
        const auto fast = basis.to_spectral(u);
        const auto slow = direct_sine_coefficients(u);
        EXPECT_LT(max_rel_diff(fast.coeffs, slow.coeffs), 1e-12);
    }
}

TEST(ToSpectral, ShapeMismatchIsRejected)
{
    SineBasis basis(DomainSpec::line(1.0, 64));
    EXPECT_THROW(basis.to_spectral(GridField(DomainSpec::line(1.0, 32))), ShapeMismatch);
    EXPECT_THROW(basis.from_spectral(SpectralField(DomainSpec::line(2.0, 64))), ShapeMismatch);
}

TEST(Roundtrip, AllResolutions)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<DomainSpec> domains{DomainSpec::line(1.0, 64), DomainSpec::line(1.0, 128),
                                    DomainSpec::line(1.0, 256), DomainSpec::line(1.0, 512),
                                    DomainSpec::rect(1.0, 1.0, 64, 64), DomainSpec::rect(2.0, 1.0, 128, 128)};
    for (const auto& d : domains) {
        SineBasis basis(d);
        for (int trial = 0; trial < 5; ++trial) {
            GridField u(d);
            for (double& v : u.values) {
                v = unif(rng);
            }
            const auto back = basis.from_spectral(basis.to_spectral(u));
            EXPECT_LT(max_rel_diff(back.values, u.values), 1e-12) << "n=" << d.n[0] << " dim=" << d.dim;
        }
    }
}

TEST(FromSpectral, UnitModeIsEigenfunction)
{
    const auto d = DomainSpec::line(1.0, 64);
    SineBasis basis(d);
    const auto u = basis.from_spectral(SpectralField::unit(d, 0));
    for (std::size_t i = 0; i < u.size(); ++i) {
        EXPECT_NEAR(u[i], std::sqrt(2.0) * std::sin(pi * d.node(0, i)), 1e-13);
    }
}

TEST(FromSpectral, LinearityAndParseval)
{
    std::mt19937_64 rng(3);
    for (const auto& d : {DomainSpec::line(2.5, 96), DomainSpec::rect(1.0, 1.5, 32, 40)}) {
        SineBasis basis(d);
        const auto a = random_bandlimited(d, rng);
        const auto b = random_bandlimited(d, rng);
        const auto ua = basis.from_spectral(a);
        const auto ub = basis.from_spectral(b);
        const auto uab = basis.from_spectral(a + b);
        for (std::size_t i = 0; i < uab.size(); ++i) {
            EXPECT_NEAR(uab[i], ua[i] + ub[i], 1e-13);
        }
        // Quadrature of |u|^2 on the nodes equals the coefficient norm.
        const double grid = grid_inner(ua, ua);
        const double spec = spectral_inner(a, a);
        EXPECT_NEAR(grid / spec, 1.0, 1e-12);
    }
}

TEST(ApplyMultiplier, ExamplesAndEigenAction)
{
    const auto d = DomainSpec::line(1.0, 256);
    SineBasis basis(d);
    const auto e1 = SpectralField::unit(d, 0);
    EXPECT_NEAR(basis.apply(e1, FracPower{1.0})[0], pi * pi, 1e-12);

    std::mt19937_64 rng(5);
    const auto f = random_bandlimited(d, rng);
    const auto back = basis.apply(basis.apply(f, InverseFracPower{0.3}), FracPower{0.3});
    EXPECT_LT(max_rel_diff(back.coeffs, f.coeffs), 1e-12);
    const auto same = basis.apply(f, Heat{0.0});
    EXPECT_EQ(same.coeffs, f.coeffs);

    for (std::size_t j : {0UL, 10UL, 255UL}) {
        const auto ej = SpectralField::unit(d, j);
        const auto r = basis.apply(ej, FracPower{0.37});
        const double expect = std::pow(basis.eigen().lambda[j], 0.37);
        EXPECT_NEAR(r[j], expect, 4 * std::numeric_limits<double>::epsilon() * expect);
    }
}

TEST(ApplyMultiplier, HeatSemigroupProperty)
{
    const auto d = DomainSpec::rect(1.0, 1.0, 32, 32);
    SineBasis basis(d);
    std::mt19937_64 rng(9);
    const auto f = random_bandlimited(d, rng);
    const auto two = basis.apply(basis.apply(f, Heat{0.013}), Heat{0.004});
    const auto one = basis.apply(f, Heat{0.017});
    EXPECT_LT(max_rel_diff(two.coeffs, one.coeffs), 1e-13);
}

TEST(ApplyMultiplier, RejectsOutOfRange)
{
    SineBasis basis(DomainSpec::line(1.0, 16));
    SpectralField f(basis.domain());
    EXPECT_THROW(basis.apply(f, FracPower{1.5}), InvalidArgument);
    EXPECT_THROW(basis.apply(f, InverseFracPower{1.0}), InvalidArgument);
    EXPECT_THROW(basis.apply(f, Heat{-1.0}), InvalidArgument);
    EXPECT_THROW(basis.apply(f, TruncatedSemigroup{0.5, 0.0}), InvalidArgument);
    EXPECT_THROW(truncated_semigroup_multiplier(1.0, 1.0, 0.1), InvalidArgument);
}

TEST(TruncatedMultiplier, MatchesQuadratureOracle)
{
    for (double alpha : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        for (double eps : {1e-4, 1e-3, 0.01, 0.1, 1.0, 5.0}) {
            for (double lambda : {pi * pi, 4 * pi * pi, 1e3, 1e5, 2.6e6}) {
                const double got = truncated_semigroup_multiplier(lambda, alpha, eps);
                const double want = truncated_integral_oracle(lambda, alpha, eps);
                EXPECT_NEAR(got / want, 1.0, 1e-10) << alpha << " " << eps << " " << lambda;
            }
        }
    }
    // The reference example of the operator table.
    const double v = truncated_semigroup_multiplier(pi * pi, 0.5, 0.1);
    EXPECT_NEAR(v / truncated_integral_oracle(pi * pi, 0.5, 0.1), 1.0, 1e-10);
}

TEST(TruncatedMultiplier, LimitsAndBounds)
{
    const double lambda = pi * pi;
    for (double alpha : {0.25, 0.5, 0.75}) {
        const double full = special::abs_gamma_neg(alpha) * std::pow(lambda, alpha);
        double prev = std::numeric_limits<double>::infinity();
        for (double eps : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0}) {
            const double mu = truncated_semigroup_multiplier(lambda, alpha, eps);
            EXPECT_GE(mu, 0.0);
            EXPECT_LE(mu, prev);
            prev = mu;
            // Unit-amplitude bound 2/(alpha eps^alpha).
            EXPECT_LE(mu, 2.0 / (alpha * std::pow(eps, alpha)));
            // Small-eps deficit bound lambda eps^{1-alpha}/(1-alpha).
            EXPECT_LE(std::abs(mu - full), lambda * std::pow(eps, 1 - alpha) / (1 - alpha) * (1 + 1e-12));
        }
        // Large eps: mu ~ eps^{-alpha}(1 - e^{-lambda eps})/alpha.
        const double eps = 50.0;
        const double approx = std::pow(eps, -alpha) * (-std::expm1(-lambda * eps)) / alpha;
        EXPECT_NEAR(truncated_semigroup_multiplier(lambda, alpha, eps), approx, 1e-12);
    }
}

TEST(TruncatedMultiplier, MonotoneOverTable)
{
    const auto t = build_eigen(DomainSpec::rect(1.0, 1.0, 24, 24));
    for (std::size_t i = 0; i < t.lambda.size(); i += 7) {
        double prev = std::numeric_limits<double>::infinity();
        for (double eps = 1e-5; eps < 10; eps *= 3) {
            const double mu = truncated_semigroup_multiplier(t.lambda[i], 0.6, eps);
            EXPECT_GE(mu, 0.0);
            EXPECT_LE(mu, prev);
            prev = mu;
        }
    }
}

TEST(TruncatedOperator, PositivityAndUniformBound)
{
    const auto d = DomainSpec::line(1.0, 128);
    SineBasis basis(d);
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const double alpha = 0.2 + 0.6 * (trial % 4) / 3.0;
        const double eps = trial % 2 ? 0.1 : 0.01;
        const auto f = random_bandlimited(d, rng);
        const auto lf = basis.apply(f, TruncatedSemigroup{alpha, eps});
        const auto ug = basis.from_spectral(f);
        const auto lg = basis.from_spectral(lf);
        EXPECT_GE(grid_inner(lg, ug), -1e-10 * grid_inner(ug, ug));
        EXPECT_LE(max_abs(lg.values), 2.0 / (alpha * std::pow(eps, alpha)) * max_abs(ug.values) + 1e-8);
    }
}

TEST(TruncatedOperator, ConvergenceRateSlope)
{
    const auto d = DomainSpec::line(1.0, 128);
    SineBasis basis(d);
    const auto f = SpectralField::unit(d, 0);
    for (double alpha : {0.25, 0.5, 0.75}) {
        std::vector<double> le, lerr;
        for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
            // (-Laplacian)^{-1} L_eps f against |Gamma(-alpha)| (-Laplacian)^{-1+alpha} f.
            auto a = apply_power(basis.apply(f, TruncatedSemigroup{alpha, eps}), basis.eigen(), -1.0);
            auto b = apply_power(f, basis.eigen(), -1.0 + alpha);
            b *= special::abs_gamma_neg(alpha);
            le.push_back(std::log(eps));
            lerr.push_back(std::log(std::sqrt(spectral_inner(a - b, a - b))));
        }
        // Least-squares slope.
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < le.size(); ++i) {
            mx += le[i];
            my += lerr[i];
        }
        mx /= le.size();
        my /= le.size();
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < le.size(); ++i) {
            sxy += (le[i] - mx) * (lerr[i] - my);
            sxx += (le[i] - mx) * (le[i] - mx);
        }
        EXPECT_GE(sxy / sxx, 1 - alpha - 0.05) << alpha;
    }
}

TEST(Gradient, AnalyticDerivativeIncludingBoundary)
{
    const auto d = DomainSpec::line(1.0, 64);
    SineBasis basis(d);
    const auto f = basis.to_spectral(sample(d, [](double x, double) { return std::sin(pi * x); }));
    const auto g = basis.gradient(f);
    ASSERT_EQ(g.components.size(), 1u);
    const auto& c = g.components[0];
    ASSERT_EQ(c.shape[0], 66u);
    for (std::size_t i = 0; i < 66; ++i) {
        const double x = static_cast<double>(i) * d.spacing(0);
        EXPECT_NEAR(c.values[i], pi * std::cos(pi * x), 1e-10);
    }
    const auto z = basis.gradient(SpectralField(d));
    EXPECT_EQ(max_abs(z.components[0].values), 0.0);
}

TEST(Gradient, TwoDimensionalEigenfunction)
{
    const auto d = DomainSpec::rect(1.0, 2.0, 32, 24);
    SineBasis basis(d);
    auto fn = [](double x, double y) { return std::sin(2 * pi * x) * std::sin(pi * y / 2.0); };
    const auto g = basis.gradient(basis.to_spectral(sample(d, fn)));
    const auto& gx = g.components[0];
    const auto& gy = g.components[1];
    for (std::size_t i = 0; i < gx.shape[0]; ++i) {
        for (std::size_t j = 0; j < gx.shape[1]; ++j) {
            const double x = i * d.spacing(0);
            const double y = d.node(1, j);
            EXPECT_NEAR(gx.at(i, j), 2 * pi * std::cos(2 * pi * x) * std::sin(pi * y / 2), 1e-10);
        }
    }
    for (std::size_t i = 0; i < gy.shape[0]; ++i) {
        for (std::size_t j = 0; j < gy.shape[1]; ++j) {
            const double x = d.node(0, i);
            const double y = j * d.spacing(1);
            EXPECT_NEAR(gy.at(i, j), std::sin(2 * pi * x) * (pi / 2) * std::cos(pi * y / 2), 1e-10);
        }
    }
}

TEST(Gradient, FourthOrderFiniteDifferenceOracle)
{
    // Smooth field with a handful of modes; the FD error must shrink like h^4.
    auto fn = [](double x, double) {
        return std::sin(pi * x) + 0.3 * std::sin(3 * pi * x) - 0.2 * std::sin(5 * pi * x);
    };
    std::vector<double> errs;
    for (std::size_t n : {64UL, 128UL}) {
        const auto d = DomainSpec::line(1.0, n);
        SineBasis basis(d);
        const auto u = sample(d, fn);
        const auto g = basis.gradient(basis.to_spectral(u)).components[0];
        const double h = d.spacing(0);
        double err = 0.0;
        for (std::size_t i = 2; i + 2 < n; ++i) {
            const double fd = (-u[i + 2] + 8 * u[i + 1] - 8 * u[i - 1] + u[i - 2]) / (12 * h);
            err = std::max(err, std::abs(fd - g.values[i + 1]));
        }
        errs.push_back(err);
    }
    EXPECT_LT(errs[0], 1e-3);
    EXPECT_GT(errs[0] / errs[1], 12.0);
}

TEST(Divergence, OfGradientIsLaplacian)
{
    std::mt19937_64 rng(4);
    for (const auto& d : {DomainSpec::line(1.3, 128), DomainSpec::rect(1.0, 0.7, 48, 40)}) {
        SineBasis basis(d);
        const auto f = random_bandlimited(d, rng);
        const auto lap = basis.divergence_of_flux(basis.gradient(f));
        auto expect = apply_power(f, basis.eigen(), 1.0);
        expect *= -1.0;
        EXPECT_LT(max_rel_diff(lap.coeffs, expect.coeffs), 1e-9);
    }
}

TEST(Divergence, ZeroAndConstantFlux)
{
    const auto d = DomainSpec::line(1.0, 64);
    SineBasis basis(d);
    auto flux = VectorField::zeros(d);
    EXPECT_EQ(max_abs(basis.divergence_of_flux(flux).coeffs), 0.0);
    for (double& v : flux.components[0].values) {
        v = 2.5;
    }
    // int div(c) phi_j = -c int phi_j' = 0 for every interior mode.
    EXPECT_LT(max_abs(basis.divergence_of_flux(flux).coeffs), 1e-12);
}

TEST(Divergence, QuadratureOracleForGeneralFlux)
{
    // <div F, phi_k> = -int F phi_k' dx by adaptive quadrature; the
    // trapezoid-based projection converges to it at second order.
    using boost::math::quadrature::gauss_kronrod;
    auto F = [](double x) { return std::cos(1.3 * x) + x * x; };
    std::vector<double> errs;
    for (std::size_t n : {64UL, 128UL}) {
        const auto d = DomainSpec::line(1.0, n);
        SineBasis basis(d);
        auto flux = VectorField::zeros(d);
        for (std::size_t i = 0; i < n + 2; ++i) {
            flux.components[0].values[i] = F(i * d.spacing(0));
        }
        const auto div = basis.divergence_of_flux(flux);
        double err = 0.0;
        for (std::size_t k = 1; k <= 8; ++k) {
            auto integrand = [&](double x) {
                return -F(x) * std::sqrt(2.0) * k * pi * std::cos(k * pi * x);
            };
            const double exact = gauss_kronrod<double, 61>::integrate(integrand, 0.0, 1.0, 15, 1e-14);
            err = std::max(err, std::abs(div[k - 1] - exact));
        }
        errs.push_back(err);
    }
    EXPECT_LT(errs[0], 1e-3);
    EXPECT_GT(errs[0] / errs[1], 3.5);
}

TEST(Divergence, DealiasDropsHighModes)
{
    const auto d = DomainSpec::line(1.0, 60);
    SineBasis basis(d);
    std::mt19937_64 rng(1);
    SpectralField f(d);
    for (double& c : f.coeffs) {
        c = 1.0;
    }
    const auto div = basis.divergence_of_flux(basis.gradient(f), true);
    EXPECT_EQ(basis.dealias_cutoff(0), 40u);
    for (std::size_t j = 0; j < 60; ++j) {
        if (j + 1 > 40) {
            EXPECT_EQ(div[j], 0.0);
        } else {
            EXPECT_NEAR(div[j], -basis.eigen().lambda[j], 1e-9 * basis.eigen().lambda[j]);
        }
    }
}
