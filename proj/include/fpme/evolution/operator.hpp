#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "fpme/core/special_functions.hpp"
#include "fpme/core/transforms.hpp"
#include "fpme/evolution/nonlinear.hpp"
#include "fpme/evolution/params.hpp"

namespace fpme {

/// Thrown when a state produces non-finite values in the nonlinear terms.
class NumericalOverflow : public Error {
public:
    using Error::Error;
};

/// Right-hand side pieces, all in sine coefficients.
struct RhsParts {
    SpectralField diffusion; // delta Lap u
    SpectralField flux;      // div(H grad P[G])
    SpectralField damping;   // -varpi A^{s0} J
    SpectralField forcing;   // f(t)
};

/// Spatial operator of the regularized equation on a fixed basis.
class EvolutionOperator {
public:
    EvolutionOperator(std::shared_ptr<const SineBasis> basis, ModelParams params, ForcingSpec forcing)
        : basis_(std::move(basis)), params_(params), forcing_(std::move(forcing))
    {
        params_.validate();
        forcing_.validate(basis_->domain());
        const auto& eig = basis_->eigen();
        if (params_.pressure == PressureMode::exact) {
            pressure_ = multiplier_table(eig, InverseFracPower{params_.s});
            damping_ = multiplier_table(eig, FracPower{params_.s0()});
        } else {
            pressure_ = multiplier_table(eig, TruncatedSemigroup{1.0 - params_.s, params_.eps, true});
            for (std::size_t j = 0; j < pressure_.size(); ++j) {
                pressure_[j] /= eig.lambda[j];
            }
            damping_ = multiplier_table(eig, TruncatedSemigroup{params_.s0(), params_.eps, true});
        }
        pressure_gain_ = 0.0;
        for (std::size_t j = 0; j < pressure_.size(); ++j) {
            pressure_gain_ = std::max(pressure_gain_, eig.lambda[j] * pressure_[j]);
        }
        damping_gain_ = 0.0;
        for (double v : damping_) {
            damping_gain_ = std::max(damping_gain_, v);
        }
        if (!forcing_.is_zero()) {
            // Spatial part only; the time factor is applied per call.
            forcing_hat_ = basis_->to_spectral(forcing_.at(basis_->domain(), 0.0));
        }
    }

    const SineBasis& basis() const { return *basis_; }
    std::shared_ptr<const SineBasis> basis_ptr() const { return basis_; }
    const ModelParams& params() const { return params_; }
    const ForcingSpec& forcing() const { return forcing_; }
    const std::vector<double>& pressure_multiplier() const { return pressure_; }
    const std::vector<double>& damping_multiplier() const { return damping_; }

    /// grad P with P the pressure of G(u), on the staggered axis grids.
    VectorField velocity(const GridField& G) const
    {
        SpectralField g = basis_->to_spectral(G);
        return basis_->gradient(apply_table(std::move(g), pressure_));
    }

    RhsParts parts(const SpectralField& u, double t) const
    {
        detail::require_same(u.domain, basis_->domain(), "rhs");
        const DomainSpec& d = basis_->domain();
        const GridField ug = basis_->from_spectral(u);
        const NonlinearFields nl = nonlinear_functions(ug, params_);
        if (!all_finite(nl.H.values) || !all_finite(nl.G.values) || !all_finite(nl.J.values)) {
            throw NumericalOverflow("nonlinear terms overflowed");
        }
        RhsParts r{SpectralField(d), SpectralField(d), SpectralField(d), SpectralField(d)};
        const auto& lam = basis_->eigen().lambda;
        if (params_.delta > 0.0) {
            for (std::size_t j = 0; j < u.size(); ++j) {
                r.diffusion[j] = -params_.delta * lam[j] * u[j];
            }
        }
        if (params_.transport) {
            VectorField flux = velocity(nl.G);
            for (int a = 0; a < d.dim; ++a) {
                const AxisField h = extend_to_axis(nl.H, a);
                auto& comp = flux.components[a].values;
                for (std::size_t i = 0; i < comp.size(); ++i) {
                    comp[i] *= h.values[i];
                }
            }
            r.flux = basis_->divergence_of_flux(flux, true);
        }
        if (params_.varpi > 0.0) {
            SpectralField jh = basis_->to_spectral(nl.J);
            basis_->dealias(jh);
            for (std::size_t j = 0; j < jh.size(); ++j) {
                r.damping[j] = -params_.varpi * damping_[j] * jh[j];
            }
        }
        if (!forcing_.is_zero()) {
            r.forcing = forcing_hat_;
            r.forcing *= forcing_.time_factor(t);
        }
        if (!all_finite(r.flux.coeffs) || !all_finite(r.damping.coeffs)) {
            throw NumericalOverflow("right-hand side is not finite");
        }
        return r;
    }

    /// Everything except delta Lap u (handled by the integrating factor).
    SpectralField nonlinear(const SpectralField& u, double t) const
    {
        RhsParts r = parts(u, t);
        r.flux += r.damping;
        r.flux += r.forcing;
        return std::move(r.flux);
    }

    SpectralField rhs(const SpectralField& u, double t) const
    {
        RhsParts r = parts(u, t);
        r.flux += r.damping;
        r.flux += r.forcing;
        r.flux += r.diffusion;
        return std::move(r.flux);
    }

    /// Explicit stability bound dt <= c_cfl min(h/|V|, 1/rate_flux, 1/rate_damp).
    /// Returns +inf when no term constrains the step.
    double stable_dt(const SpectralField& u, double c_cfl) const
    {
        const GridField ug = basis_->from_spectral(u);
        const double k2 = params_.effective_kappa2();
        const double k1 = params_.effective_kappa1();
        double hg = 0.0;
        double jd = 0.0;
        GridField G(ug.domain);
        for (std::size_t i = 0; i < ug.size(); ++i) {
            const double x = ug[i];
            const double h = mollified_abs_power(x, params_.m1, k2);
            hg = std::max(hg, h * mollified_odd_power_derivative(x, params_.m2, k2));
            if (params_.varpi > 0.0) {
                jd = std::max(jd, mollified_odd_power_derivative(x, params_.m0(), k1));
            }
            G[i] = mollified_odd_power(x, params_.m2, k2);
        }
        double bound = std::numeric_limits<double>::infinity();
        if (hg > 0.0 && params_.transport) {
            bound = std::min(bound, 1.0 / (hg * pressure_gain_));
            double vmax = 0.0;
            for (const auto& c : velocity(G).components) {
                vmax = std::max(vmax, max_abs(c.values));
            }
            if (vmax > 0.0) {
                bound = std::min(bound, basis_->domain().min_spacing() / vmax);
            }
        }
        if (params_.varpi > 0.0 && jd > 0.0) {
            bound = std::min(bound, 1.0 / (params_.varpi * jd * damping_gain_));
        }
        return c_cfl * bound;
    }

private:
    std::shared_ptr<const SineBasis> basis_;
    ModelParams params_;
    ForcingSpec forcing_;
    std::vector<double> pressure_;
    std::vector<double> damping_;
    double pressure_gain_ = 0.0;
    double damping_gain_ = 0.0;
    SpectralField forcing_hat_{};
};

} // namespace fpme
