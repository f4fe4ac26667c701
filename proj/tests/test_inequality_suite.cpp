#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fpme/inequality/battery.hpp"

using namespace fpme;

namespace {

constexpr double pi = std::numbers::pi;

GridField sample(const DomainSpec& d, auto&& fn)
{
    GridField u(d);
    for (std::size_t i = 0; i < d.points(0); ++i) {
        for (std::size_t j = 0; j < d.points(1); ++j) {
            u.at(i, j) = d.dim == 1 ? fn(d.node(0, i), 0.0) : fn(d.node(0, i), d.node(1, j));
        }
    }
    return u;
}

double min_of(const GridField& g)
{
    return *std::min_element(g.values.begin(), g.values.end());
}

} // namespace

TEST(ConvexProfile, RegistryValidates)
{
    for (const auto& p : convex_registry()) {
        EXPECT_NO_THROW(p.validate(-3.0, 3.0)) << p.name;
    }
}

TEST(ConvexProfile, RejectsNonConvexAndOffset)
{
    ConvexProfile concave{"concave", [](double u) { return -u * u; }, [](double u) { return -2 * u; }};
    EXPECT_THROW(concave.validate(-1.0, 1.0), InvalidArgument);
    ConvexProfile shifted{"shifted", [](double u) { return u * u + 1.0; }, [](double u) { return 2 * u; }};
    EXPECT_THROW(shifted.validate(-1.0, 1.0), InvalidArgument);
    ConvexProfile wavy{"sin", [](double u) { return std::sin(u); }, [](double u) { return std::cos(u); }};
    EXPECT_THROW(wavy.validate(-2.0, 2.0), InvalidArgument);

    const SineBasis basis(DomainSpec::line(1.0, 64));
    const GridField f = sample(basis.domain(), [](double x, double) { return std::sin(pi * x); });
    EXPECT_THROW(cordoba_gap(basis, f, concave, 0.5, 0.1), InvalidArgument);
}

TEST(SVProfile, PowerProfileConsistency)
{
    for (double q : {0.5, 1.0, 2.0, 3.0}) {
        EXPECT_NO_THROW(power_sv_profile(q).validate(-2.0, 2.0)) << q;
    }
    // psi = u^3 pairs with Psi = (sqrt(3)/2)|u|u.
    const auto p = power_sv_profile(3.0);
    EXPECT_NEAR(p.Psi(2.0), std::sqrt(3.0) / 2.0 * 4.0, 1e-14);
    SVProfile bad{"bad", [](double u) { return u; }, [](double) { return 1.0; }, [](double u) { return 2 * u; },
                  [](double) { return 2.0; }};
    EXPECT_THROW(bad.validate(-1.0, 1.0), InvalidArgument);
}

TEST(CordobaGap, IdentityProfileIsZero)
{
    const SineBasis basis(DomainSpec::line(1.0, 128));
    std::mt19937_64 rng(3);
    const GridField f = basis.from_spectral(random_bandlimited(basis.domain(), rng));
    const GridField g = cordoba_gap(basis, f, identity_profile(), 0.5, 0.01);
    EXPECT_LE(max_abs(g.values), 1e-13 * cordoba_scale(basis, f, identity_profile(), 0.5, 0.01));
}

TEST(CordobaGap, SquareOnFirstMode)
{
    const SineBasis basis(DomainSpec::line(1.0, 128));
    const GridField f = sample(basis.domain(), [](double x, double) { return std::sin(pi * x); });
    for (double alpha : {0.25, 0.5, 0.75}) {
        for (double eps : {0.1, 0.01}) {
            EXPECT_GE(min_of(cordoba_gap(basis, f, square_profile(), alpha, eps)), -1e-8);
        }
    }
}

TEST(CordobaGap, ScaledBumpIn2D)
{
    const SineBasis basis(DomainSpec::rect(1.0, 1.0, 48, 48));
    const GridField f = sample(basis.domain(), [](double x, double y) {
        return 3.0 * std::exp(-40.0 * ((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5))) * x * (1 - x) * y * (1 - y) * 16;
    });
    for (const auto& p : convex_registry()) {
        const double tol = 1e-8 * cordoba_scale(basis, f, p, 0.5, 0.01);
        EXPECT_GE(min_of(cordoba_gap(basis, f, p, 0.5, 0.01)), -tol) << p.name;
    }
}

TEST(CordobaGap, RandomEnsembleAllProfiles)
{
    const SineBasis basis(DomainSpec::line(1.0, 96));
    std::mt19937_64 rng(11);
    for (int k = 0; k < 20; ++k) {
        const GridField f = basis.from_spectral(random_bandlimited(basis.domain(), rng));
        for (const auto& p : convex_registry()) {
            for (double alpha : {0.25, 0.75}) {
                const double tol = 1e-8 * cordoba_scale(basis, f, p, alpha, 0.01);
                EXPECT_GE(min_of(cordoba_gap(basis, f, p, alpha, 0.01)), -tol) << p.name;
            }
        }
    }
}

TEST(SVGap, IdentityIsPlancherel)
{
    const SineBasis basis(DomainSpec::line(1.0, 128));
    std::mt19937_64 rng(5);
    const GridField u = basis.from_spectral(random_bandlimited(basis.domain(), rng));
    const SVSides s = sv_sides(basis, u, identity_sv_profile(), 0.4);
    EXPECT_NEAR(s.gap(), 0.0, 1e-13 * s.scale());
}

TEST(SVGap, CubicOnTwoModes)
{
    const SineBasis basis(DomainSpec::line(1.0, 128));
    const GridField u =
        sample(basis.domain(), [](double x, double) { return std::sin(pi * x) + 0.3 * std::sin(3 * pi * x); });
    for (double alpha : {0.25, 0.5, 0.75}) {
        const SVSides s = sv_sides(basis, u, power_sv_profile(3.0), alpha);
        EXPECT_GE(s.gap(), -1e-6 * s.scale());
        EXPECT_GT(s.lhs, 0.0);
    }
}

TEST(PowerSVGap, ConstantValues)
{
    EXPECT_DOUBLE_EQ(power_sv_constant(1, 1), 1.0);
    EXPECT_DOUBLE_EQ(power_sv_constant(1, 3), 0.75);
}

TEST(PowerSVGap, EqualExponentsGiveZero)
{
    const SineBasis basis(DomainSpec::line(1.0, 128));
    std::mt19937_64 rng(9);
    const GridField u = basis.from_spectral(random_bandlimited(basis.domain(), rng));
    const SVSides s = power_sv_sides(basis, u, 1.0, 1.0, 0.5);
    EXPECT_NEAR(s.gap(), 0.0, 1e-10 * s.scale());
    EXPECT_EQ(power_sv_gap(basis, GridField(basis.domain()), 1.0, 3.0, 0.5), 0.0);
    EXPECT_THROW(power_sv_gap(basis, u, 0.0, 1.0, 0.5), InvalidArgument);
}

TEST(PowerSVGap, RandomFieldsOneThree)
{
    const SineBasis basis(DomainSpec::line(1.0, 128));
    std::mt19937_64 rng(21);
    for (int k = 0; k < 50; ++k) {
        const GridField u = basis.from_spectral(random_bandlimited(basis.domain(), rng));
        const SVSides s = power_sv_sides(basis, u, 1.0, 3.0, 0.5);
        EXPECT_GE(s.gap(), -1e-6 * s.scale());
    }
}

TEST(PositivityForm, FirstModeAndZero)
{
    const SineBasis basis(DomainSpec::line(1.0, 64));
    const GridField phi1 = basis.from_spectral(SpectralField::unit(basis.domain(), 0));
    const double mu = truncated_semigroup_multiplier(pi * pi, 0.5, 0.1);
    EXPECT_NEAR(positivity_form(basis, phi1, 0.5, 0.1), mu, 1e-12 * mu);
    EXPECT_EQ(positivity_form(basis, GridField(basis.domain()), 0.5, 0.1), 0.0);
}

TEST(PositivityForm, RandomFieldsNonnegative)
{
    const SineBasis basis(DomainSpec::rect(1.0, 2.0, 32, 40));
    std::mt19937_64 rng(2);
    for (int k = 0; k < 20; ++k) {
        const GridField f = basis.from_spectral(random_bandlimited(basis.domain(), rng));
        EXPECT_GE(positivity_form(basis, f, 0.3, 0.05), -1e-10 * grid_inner(f, f));
    }
}

TEST(ApproxConvergence, SingleModeSlopes)
{
    const SineBasis basis(DomainSpec::line(1.0, 64));
    const GridField phi1 = basis.from_spectral(SpectralField::unit(basis.domain(), 0));
    const std::vector<double> eps{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
    for (double alpha : {0.25, 0.5, 0.75}) {
        const auto st = approx_convergence_study(basis, phi1, alpha, eps);
        EXPECT_NEAR(st.fit.slope, 1.0 - alpha, 0.05) << alpha;
        EXPECT_EQ(st.rows.size(), eps.size());
        for (std::size_t i = 1; i < st.rows.size(); ++i) {
            EXPECT_LT(st.rows[i].error, st.rows[i - 1].error);
        }
    }
}

TEST(ApproxConvergence, RejectsShortOrIncreasingLists)
{
    const SineBasis basis(DomainSpec::line(1.0, 32));
    const GridField phi1 = basis.from_spectral(SpectralField::unit(basis.domain(), 0));
    EXPECT_THROW(approx_convergence_study(basis, phi1, 0.5, {0.1, 0.01}), InvalidArgument);
    EXPECT_THROW(approx_convergence_study(basis, phi1, 0.5, {0.01, 0.1, 0.001}), InvalidArgument);
}

// Uniform-operator error ||L_eps f/|Gamma(-alpha)| - (-Lap)^alpha f|| on a
// smooth field; per mode it is at most lambda eps^{1-alpha}/((1-alpha)|Gamma|),
// so a band-limited field shows the rate 1 - alpha.
TEST(ApproxConvergence, UniformOperatorRate)
{
    const SineBasis basis(DomainSpec::line(1.0, 64));
    const GridField f = sample(basis.domain(), [](double x, double) { return std::sin(pi * x) + 0.2 * std::sin(2 * pi * x); });
    const SpectralField c = basis.to_spectral(f);
    const double alpha = 0.4;
    std::vector<double> xs;
    std::vector<double> ys;
    for (double eps : {1e-3, 3e-4, 1e-4, 3e-5, 1e-5}) {
        const SpectralField a = basis.apply(c, TruncatedSemigroup{alpha, eps, true});
        const SpectralField b = basis.apply(c, FracPower{alpha});
        const SpectralField d = a - b;
        xs.push_back(std::log(eps));
        ys.push_back(0.5 * std::log(spectral_inner(d, d)));
    }
    EXPECT_NEAR(fit_line(xs, ys).slope, 1.0 - alpha, 0.05);
}

TEST(Battery, DefaultPassesAndCsvShape)
{
    BatteryOptions opt;
    opt.cordoba_fields = 10;
    opt.sv_fields = 5;
    const auto rows = run_inequality_battery(opt);
    EXPECT_TRUE(all_pass(rows));
    std::ostringstream os;
    write_battery_csv(os, rows);
    const std::string text = os.str();
    EXPECT_EQ(text.substr(0, text.find("\r\n")), "check_id,params,gap_min,tolerance,pass");
    EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), rows.size() + 1);
}

TEST(Battery, FaultInjectionIsDetected)
{
    BatteryOptions opt;
    opt.cordoba_fields = 4;
    opt.sv_fields = 4;
    opt.fault.negate_multiplier = true;
    EXPECT_FALSE(all_pass(run_inequality_battery(opt)));
}

TEST(Battery, CustomAlphasRespected)
{
    BatteryOptions opt;
    opt.alphas = {0.3};
    opt.eps = {0.05};
    opt.cordoba_fields = 3;
    opt.sv_fields = 3;
    for (const auto& r : run_inequality_battery(opt)) {
        EXPECT_NE(r.params.find("alpha=0.3"), std::string::npos) << r.params;
    }
}
