#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fpme/estimates/report.hpp"

using namespace fpme;

namespace {

constexpr double pi = std::numbers::pi;

// Builds a trajectory from nodal states without running the solver.
Trajectory make_trajectory(const std::vector<GridField>& states, const std::vector<double>& times,
                           const ModelParams& p = {})
{
    Trajectory tr;
    tr.domain = states.front().domain;
    tr.params = p;
    tr.times = times;
    const SineBasis b(tr.domain);
    for (std::size_t k = 0; k < states.size(); ++k) {
        tr.states.push_back(b.to_spectral(states[k]));
        tr.diagnostics.push_back(diagnose(states[k], times[k]));
    }
    return tr;
}

GridField gaussian(const DomainSpec& d, double mass = 0.0, double width = 0.1)
{
    InitialData id;
    id.width = width;
    id.mass = mass;
    return id.evaluate(d);
}

GridField scaled(GridField u, double c)
{
    for (double& v : u.values) {
        v *= c;
    }
    return u;
}

} // namespace

TEST(Functionals, LpNorms)
{
    const DomainSpec d = DomainSpec::line(2.0, 99);
    GridField u(d);
    std::fill(u.values.begin(), u.values.end(), -3.0);
    const double vol = static_cast<double>(d.size()) * d.cell_volume();
    EXPECT_NEAR(lp_norm(u, 1.0), 3.0 * vol, 1e-12);
    EXPECT_NEAR(lp_norm(u, 2.0), 3.0 * std::sqrt(vol), 1e-12);
    EXPECT_EQ(lp_norm(u, infinity_norm), 3.0);
    EXPECT_THROW(lp_norm(u, 0.5), InvalidArgument);
}

TEST(Functionals, DissipationZeroAndHomogeneity)
{
    const DomainSpec d = DomainSpec::line(1.0, 128);
    const SineBasis b(d);
    EXPECT_EQ(dissipation(b, GridField(d), 2.0, 0.5, 2.0), 0.0);
    const GridField u = gaussian(d);
    for (double p : {1.5, 2.0, 3.0}) {
        const double gamma = 2.0;
        const double c = 1.7;
        const double base = dissipation(b, u, p, 0.5, gamma);
        EXPECT_NEAR(dissipation(b, scaled(u, c), p, 0.5, gamma), std::pow(c, gamma + p - 1) * base, 1e-12 * base);
    }
    EXPECT_THROW(dissipation(b, u, 1.0, 0.5, 2.0), InvalidArgument);
}

TEST(Functionals, DissipationOfFirstModeLinearPower)
{
    // gamma + p - 1 = 2: the power map is the identity and D = lambda_1^{1-s}.
    const DomainSpec d = DomainSpec::line(1.0, 64);
    InitialData id;
    id.preset = InitialPreset::single_mode;
    const SpectralField u = SineBasis(d).to_spectral(id.evaluate(d));
    EXPECT_NEAR(dissipation(u, 1.5, 0.3, 1.5), std::pow(pi * pi, 0.7), 1e-10);
}

TEST(Functionals, DissipationMatchesDenseQuadrature)
{
    // gamma + p - 1 = 4: w = |phi_1| phi_1, coefficients by direct sums.
    const std::size_t n = 64;
    const double L = 1.0;
    const DomainSpec d = DomainSpec::line(L, n);
    InitialData id;
    id.preset = InitialPreset::single_mode;
    const SpectralField u = SineBasis(d).to_spectral(id.evaluate(d));
    const double s = 0.4;
    const double h = L / (n + 1);
    double want = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        double c = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            const double phi1 = std::sqrt(2.0 / L) * std::sin(pi * i * h / L);
            c += std::abs(phi1) * phi1 * std::sqrt(2.0 / L) * std::sin(j * pi * i * h / L) * h;
        }
        want += std::pow(j * j * pi * pi / (L * L), 1.0 - s) * c * c;
    }
    EXPECT_NEAR(dissipation(u, 3.0, s, 2.0), want, 1e-10 * want);
}

TEST(Functionals, HolderLadderAndRecords)
{
    const DomainSpec d = DomainSpec::line(3.0, 128);
    std::mt19937_64 rng(5);
    const GridField u = SineBasis(d).from_spectral(random_bandlimited(d, rng));
    const Trajectory tr = make_trajectory({u, u}, {0.0, 1.0});
    FunctionalRequest req;
    req.p_values = {1.0, 1.5, 2.0, 4.0, 8.0};
    req.thetas = {0.5};
    const auto recs = record_functionals(tr, u, {}, req);
    ASSERT_EQ(recs.size(), 2u);
    const double vol = static_cast<double>(d.size()) * d.cell_volume();
    EXPECT_TRUE(holder_ladder_consistent(recs[0], vol));
    EXPECT_EQ(recs[0].lp_norms.size(), 6u);
    EXPECT_GT(recs[0].dissipation.at(2.0), 0.0);
    EXPECT_GT(recs[0].theta.at(0.5), 0.0);
    EXPECT_NEAR(recs[0].M, lp_norm(u, 1.0), 1e-14);
    FunctionalRecord bad = recs[0];
    bad.lp_norms[8.0] = 1e-3 * bad.lp_norms[1.0];
    EXPECT_FALSE(holder_ladder_consistent(bad, vol));
}

TEST(Exponents, TheoreticalSlopes)
{
    EXPECT_DOUBLE_EQ(smoothing_slope(1, 2.0, 0.5, 1.0, infinity_norm), -0.5);
    EXPECT_DOUBLE_EQ(smoothing_slope(1, 2.0, 0.5, 2.0, 2.0), 0.0);
    EXPECT_DOUBLE_EQ(smoothing_slope(2, 2.0, 0.5, 1.0, infinity_norm), -2.0 / 3.0);
    EXPECT_DOUBLE_EQ(dissipation_slope(1, 2.0, 0.5, 1.0, 2.0), -1.5);
    EXPECT_DOUBLE_EQ(dissipation_slope(1, 2.0, 0.5, 2.0, 2.0), -1.0);
    EXPECT_DOUBLE_EQ(dissipation_slope(1, 2.0, 0.5, 1.0, 3.0), -2.0);
    EXPECT_THROW(smoothing_slope(1, 0.5, 0.9, 0.1, 1.0), InvalidArgument);
    EXPECT_THROW(dissipation_slope(1, 2.0, 0.5, 1.0, 1.0), InvalidArgument);
}

TEST(Exponents, PowerLawFitAndTimeRescaling)
{
    std::vector<double> t;
    std::vector<double> y;
    for (int k = 0; k <= 100; ++k) {
        t.push_back(std::pow(10.0, -2.0 + 4.0 * k / 100.0));
        y.push_back(3.0 * std::pow(t.back(), -0.5) * (1.0 + 0.01 * std::sin(k)));
    }
    const ExponentFit f = fit_power_law(t, y, {}, -0.5);
    EXPECT_NEAR(f.slope, -0.5, 5e-3);
    EXPECT_FALSE(f.inconclusive);
    EXPECT_TRUE(f.within(0.15));
    std::vector<double> t2 = t;
    for (double& v : t2) {
        v *= 37.0;
    }
    const ExponentFit g = fit_power_law(t2, y, {}, -0.5);
    EXPECT_NEAR(g.slope, f.slope, 1e-12);
    EXPECT_EQ(g.points, f.points);

    std::vector<double> noise;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(0.5, 2.0);
    for (std::size_t k = 0; k < t.size(); ++k) {
        noise.push_back(U(rng));
    }
    EXPECT_TRUE(fit_power_law(t, noise, {}, -0.5).inconclusive);
    EXPECT_THROW(fit_power_law(t, y, {0.79, 0.8}, -0.5), InvalidArgument);
}

TEST(Exponents, SmoothingAndDissipationRates)
{
    const DomainSpec d = DomainSpec::line(64.0, 256);
    ModelParams p;
    p.delta = 3e-2;
    InitialData id;
    id.preset = InitialPreset::spike;
    id.width = 0.5;
    SolverControls c;
    c.t_first = 1e-3;
    const Trajectory tr = solve(id.evaluate(d), {}, p, 100.0, c);
    const ExponentFit f = fit_smoothing_exponent(tr, 1.0, infinity_norm, p);
    EXPECT_DOUBLE_EQ(f.theoretical_slope, -0.5);
    EXPECT_FALSE(f.inconclusive);
    EXPECT_TRUE(f.within(0.15)) << f.slope;
    const ExponentFit g = fit_dissipation_exponent(tr, 2.0, 1.0, p);
    EXPECT_DOUBLE_EQ(g.theoretical_slope, -1.5);
    EXPECT_TRUE(g.within(0.15)) << g.slope;
}

TEST(Checks, L1)
{
    const DomainSpec d = DomainSpec::line(1.0, 128);
    const Trajectory zero = solve(GridField(d), {}, ModelParams{}, 0.1);
    const CheckResult z = check_l1(zero, GridField(d), {});
    EXPECT_EQ(z.status, CheckStatus::pass);

    ModelParams p;
    p.delta = 1e-2;
    InitialData id;
    id.preset = InitialPreset::signed_dipole;
    const GridField u0 = id.evaluate(d);
    const Trajectory tr = solve(u0, {}, p, 0.5);
    EXPECT_TRUE(check_l1(tr, u0, {}).passed());

    // A fabricated trajectory that gains mass must fail.
    const Trajectory grow = make_trajectory({u0, scaled(u0, 1.01)}, {0.0, 1.0});
    EXPECT_EQ(check_l1(grow, u0, {}).status, CheckStatus::fail);
    // The same growth is allowed when a forcing of that size acts.
    const Trajectory forced = make_trajectory({gaussian(d), scaled(gaussian(d), 1.01)}, {0.0, 1.0});
    EXPECT_TRUE(check_l1(forced, gaussian(d), ForcingSpec::constant(0.1)).passed());
}

TEST(Checks, LpEnergy)
{
    const DomainSpec d = DomainSpec::line(1.0, 256);
    const Trajectory zero = solve(GridField(d), {}, ModelParams{}, 0.1);
    for (double r : lp_energy_residual(zero, 2.0, {})) {
        EXPECT_EQ(r, 0.0);
    }
    ModelParams p;
    p.delta = 1e-2;
    const GridField u0 = gaussian(d);
    const Trajectory tr = solve(u0, {}, p, 1.0);
    for (double q : {2.0, p.gamma() + 1.0}) {
        EXPECT_TRUE(check_lp_energy(tr, q, u0, {}).passed()) << q;
    }
    const ForcingSpec f = ForcingSpec::constant(0.5);
    const Trajectory trf = solve(u0, f, p, 1.0);
    EXPECT_TRUE(check_lp_energy(trf, 2.0, u0, f).passed());
    // A state that does not decay violates the balance.
    const Trajectory frozen = make_trajectory({u0, u0, u0}, {0.0, 0.5, 1.0}, p);
    EXPECT_EQ(check_lp_energy(frozen, 2.0, u0, {}).status, CheckStatus::fail);
    EXPECT_THROW(lp_energy_residual(tr, 1.0, {}), InvalidArgument);
}

TEST(Checks, LInfinity)
{
    const DomainSpec d = DomainSpec::line(1.0, 128);
    const Trajectory zero = solve(GridField(d), {}, ModelParams{}, 0.1);
    const CheckResult z = check_linfty(zero, GridField(d), {});
    EXPECT_EQ(z.status, CheckStatus::pass);
    EXPECT_EQ(z.residuals[0].second, 0.0);
    ModelParams p;
    p.delta = 1e-2;
    const GridField u0 = gaussian(d);
    EXPECT_TRUE(check_linfty(solve(u0, {}, p, 1.0), u0, {}).passed());
    const ForcingSpec f = ForcingSpec::constant(0.5);
    EXPECT_TRUE(check_linfty(solve(u0, f, p, 1.0), u0, f).passed());
    const Trajectory bad = make_trajectory({u0, scaled(u0, 1.1)}, {0.0, 1.0});
    EXPECT_EQ(check_linfty(bad, u0, {}).status, CheckStatus::fail);
}

TEST(Checks, UniversalBound)
{
    const DomainSpec d = DomainSpec::line(1.0, 64);
    ModelParams p;
    p.delta = 1e-5;
    SolverControls c;
    c.t_first = 1e-3;
    std::vector<Trajectory> runs;
    for (double m : {1.0, 10.0, 100.0}) {
        runs.push_back(solve(gaussian(d, m), {}, p, 100.0, c));
    }
    const CheckResult r = check_universal_bound(runs, p);
    EXPECT_EQ(r.status, CheckStatus::pass);
    ASSERT_TRUE(r.fit.has_value());
    EXPECT_DOUBLE_EQ(r.fit->theoretical_slope, -1.0);

    ModelParams q;
    q.m1 = 0.5;
    q.m2 = 0.5;
    EXPECT_THROW(check_universal_bound(runs, q), InvalidArgument);
    q.m1 = 2.0;
    q.m2 = 1.0;
    // gamma = 3 predicts -1/2; the gamma = 2 runs must not pass it.
    EXPECT_EQ(check_universal_bound(runs, q).status, CheckStatus::fail);
}

TEST(Checks, ScalingInvariance)
{
    const DomainSpec d = DomainSpec::line(1.0, 128);
    const ModelParams p;
    const GridField u0 = gaussian(d);
    EXPECT_EQ(scaling_discrepancy(u0, p, 1.0, 0.1).discrepancy, 0.0);
    for (double k : {0.5, 2.0}) {
        EXPECT_TRUE(check_scaling_invariance(u0, p, k, 0.1).passed()) << k;
    }
    // Refinement of the shared step cap with the grid shrinks the discrepancy.
    const double e128 = scaling_discrepancy(u0, p, 2.0, 0.1).discrepancy;
    const DomainSpec d2 = DomainSpec::line(1.0, 256);
    const double e256 = scaling_discrepancy(gaussian(d2), p, 2.0, 0.1).discrepancy;
    EXPECT_LT(e256, e128);
    EXPECT_GT(e128, 0.0);
}

TEST(Checks, ThetaFunctional)
{
    const DomainSpec d = DomainSpec::line(1.0, 64);
    const Trajectory zero = solve(GridField(d), {}, ModelParams{}, 0.1);
    EXPECT_EQ(theta_functional(zero, 0.5), 0.0);
    ModelParams p;
    p.delta = 1e-3;
    std::vector<Trajectory> runs;
    const std::vector<double> masses{1.0, 10.0, 100.0};
    for (double m : masses) {
        runs.push_back(solve(gaussian(d, m), {}, p, 10.0));
    }
    const double I = theta_functional(runs[0], 0.5);
    EXPECT_TRUE(std::isfinite(I));
    EXPECT_GT(I, 0.0);
    EXPECT_TRUE(check_theta_mass_sweep(runs, masses, 0.5).passed());
    EXPECT_THROW(theta_functional(runs[0], 0.0), InvalidArgument);
}

TEST(Checks, WeakLorentz)
{
    EXPECT_DOUBLE_EQ(lorentz_exponent(1, 0.75, 2.0), 3.0);
    EXPECT_DOUBLE_EQ(lorentz_exponent(2, 0.1, 2.0), 3.0);
    EXPECT_DOUBLE_EQ(lorentz_exponent(1, 0.5, 2.0, 4.0), 2.75);
    EXPECT_DOUBLE_EQ(lorentz_exponent(1, 0.25, 2.0), 3.5);
    EXPECT_DOUBLE_EQ(lorentz_exponent(3, 0.25, 2.0), 3.0);
    EXPECT_THROW(lorentz_exponent(1, 0.5, 2.0, 1.0), InvalidArgument);

    const DomainSpec d = DomainSpec::line(1.0, 31);
    EXPECT_EQ(weak_lorentz_quasinorm(make_trajectory({GridField(d), GridField(d)}, {0.0, 1.0}), 3.0), 0.0);
    GridField c(d);
    std::fill(c.values.begin(), c.values.end(), 2.0);
    // |{|u| > k}| is the whole space-time grid for k < 2.
    const double vol = static_cast<double>(d.size()) * d.cell_volume();
    EXPECT_NEAR(weak_lorentz_quasinorm(make_trajectory({c, c}, {0.0, 1.0}), 3.0), 2.0 * std::cbrt(vol), 1e-9);
}

TEST(Checks, NegativeOrderEnergy)
{
    const DomainSpec d = DomainSpec::line(1.0, 128);
    const Trajectory zero = solve(GridField(d), {}, ModelParams{}, 0.1);
    EXPECT_TRUE(check_hs_energy_m2eq1(zero, GridField(d), {}).passed());
    const GridField u0 = gaussian(d);
    for (double delta : {1e-2, 0.0}) {
        ModelParams p;
        p.delta = delta;
        EXPECT_TRUE(check_hs_energy_m2eq1(solve(u0, {}, p, 1.0), u0, {}).passed()) << delta;
    }
    ModelParams p;
    p.m1 = 2.0;
    p.delta = 1e-2;
    const ForcingSpec f = ForcingSpec::constant(0.5);
    EXPECT_TRUE(check_hs_energy_m2eq1(solve(u0, f, p, 1.0), u0, f).passed());
    p.m2 = 2.0;
    EXPECT_THROW(hs_energy_residual(solve(u0, {}, p, 0.01), {}), InvalidArgument);
    // A state that does not decay has no dissipation to pay for itself.
    ModelParams q;
    const Trajectory frozen = make_trajectory({u0, u0, u0}, {0.0, 0.5, 1.0}, q);
    EXPECT_EQ(check_hs_energy_m2eq1(frozen, u0, {}).status, CheckStatus::fail);
}

TEST(Report, JsonLayoutAndDeterminism)
{
    EstimateReport r;
    r.run_id = fnv1a_hex("abc");
    CheckResult c{"l1", "basic L1 estimate", CheckStatus::pass, {}, std::nullopt, {}};
    c.set("max_excess", 0.25);
    c.set("nan", std::nan(""));
    r.checks.push_back(c);
    ExponentFit f;
    f.slope = -0.5;
    CheckResult g{"smoothing", "smoothing", CheckStatus::inconclusive, {}, f, "note"};
    r.checks.push_back(g);
    const ojson j = to_json(r);
    std::vector<std::string> keys;
    for (const auto& it : j.items()) {
        keys.push_back(it.key());
    }
    EXPECT_EQ(keys, (std::vector<std::string>{"schema_version", "run_id", "params", "config", "checks", "status"}));
    EXPECT_EQ(j["checks"][0]["reference"], "basic L1 estimate");
    EXPECT_NE(j.dump().find("\"nan\":null"), std::string::npos);
    EXPECT_TRUE(j["checks"][0]["fit"].is_null());
    EXPECT_EQ(j["checks"][1]["fit"]["slope"], -0.5);
    EXPECT_EQ(j["status"], "pass");
    EXPECT_EQ(to_json(r).dump(), j.dump());
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    r.checks[0].status = CheckStatus::fail;
    EXPECT_EQ(to_json(r)["status"], "fail");
}
