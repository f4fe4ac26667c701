#pragma once

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "fpme/core/eigen.hpp"
#include "fpme/core/fields.hpp"
#include "fpme/core/multipliers.hpp"

namespace fpme {

namespace detail {

// FFTW's planner is not thread-safe; execution with the new-array API is.
inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(p);
    }
};

using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

inline PlanHandle make_r2r_plan(std::array<std::size_t, 2> shape, int rank, std::array<fftw_r2r_kind, 2> kinds)
{
    std::array<int, 2> dims{static_cast<int>(shape[0]), static_cast<int>(shape[1])};
    std::vector<double> scratch(shape[0] * shape[1]);
    std::lock_guard lock(fftw_planner_mutex());
    fftw_plan p = fftw_plan_r2r(rank, dims.data(), scratch.data(), scratch.data(), kinds.data(),
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (p == nullptr) {
        throw Error("FFTW failed to create a plan");
    }
    return PlanHandle(p);
}

} // namespace detail

/// Dirichlet sine basis on a box with the transforms and differential
/// operators of the pseudo-spectral discretization.
///
/// Conventions (per axis, L the length, n interior nodes, h = L/(n+1)):
///   phi_j(x)        = sqrt(2/L) sin(j pi x / L),   j = 1..n
///   to_spectral:    f_j = h * sum_i u_i phi_j(x_i)          (DST-I, scale sqrt(L/2)/(n+1))
///   from_spectral:  u_i = sum_j f_j phi_j(x_i)              (DST-I, scale 1/sqrt(2L))
/// so that from_spectral(to_spectral(u)) = u and sum_j f_j^2 = h sum_i u_i^2.
///
/// Derivatives of a sine series are cosine series and are evaluated on the
/// interior plus both boundary nodes of the differentiated axis (DCT-I on
/// n+2 points).  The divergence of such a field is projected back onto the
/// sine modes in weak form,
///   <div F, phi_k> = -(k pi/L) sqrt(2/L) int F cos(k pi x/L) dx,
/// with the integral taken by the trapezoid rule on the n+2 nodes.  For
/// F = grad f this reproduces -lambda_k f_k exactly.
///
/// Instances are immutable after construction and may be shared across
/// threads.
class SineBasis {
public:
    explicit SineBasis(const DomainSpec& domain) : domain_(domain), eigen_(build_eigen(domain))
    {
        const int rank = domain.dim;
        sine_plan_ = detail::make_r2r_plan({domain.points(0), domain.points(1)}, rank,
                                           {FFTW_RODFT00, FFTW_RODFT00});
        for (int a = 0; a < domain.dim; ++a) {
            std::array<std::size_t, 2> shape{domain.points(0), domain.points(1)};
            shape[a] += 2;
            std::array<fftw_r2r_kind, 2> kinds{FFTW_RODFT00, FFTW_RODFT00};
            kinds[a] = FFTW_REDFT00;
            mixed_plans_[a] = detail::make_r2r_plan(shape, rank, kinds);
        }
    }

    const DomainSpec& domain() const { return domain_; }
    const EigenTable& eigen() const { return eigen_; }

    SpectralField to_spectral(const GridField& u) const
    {
        detail::require_same(u.domain, domain_, "to_spectral");
        SpectralField f(domain_, u.values);
        fftw_execute_r2r(sine_plan_.get(), f.coeffs.data(), f.coeffs.data());
        double scale = 1.0;
        for (int a = 0; a < domain_.dim; ++a) {
            scale *= std::sqrt(domain_.lengths[a] / 2.0) / static_cast<double>(domain_.n[a] + 1);
        }
        for (double& c : f.coeffs) {
            c *= scale;
        }
        return f;
    }

    GridField from_spectral(const SpectralField& f) const
    {
        detail::require_same(f.domain, domain_, "from_spectral");
        GridField u(domain_, f.coeffs);
        fftw_execute_r2r(sine_plan_.get(), u.values.data(), u.values.data());
        double scale = 1.0;
        for (int a = 0; a < domain_.dim; ++a) {
            scale /= std::sqrt(2.0 * domain_.lengths[a]);
        }
        for (double& v : u.values) {
            v *= scale;
        }
        return u;
    }

    SpectralField apply(const SpectralField& f, const MultiplierSpec& m) const
    {
        return apply_multiplier(f, eigen_, m);
    }

    /// Gradient of the sine series `f`, one AxisField per axis.
    VectorField gradient(const SpectralField& f) const
    {
        detail::require_same(f.domain, domain_, "gradient");
        VectorField g = VectorField::zeros(domain_);
        const std::size_t n0 = domain_.points(0);
        const std::size_t n1 = domain_.points(1);
        for (int a = 0; a < domain_.dim; ++a) {
            AxisField& comp = g.components[a];
            const auto& kw = eigen_.wavenumber[a];
            for (std::size_t j = 0; j < n0; ++j) {
                for (std::size_t k = 0; k < n1; ++k) {
                    const double c = f[j * n1 + k];
                    if (a == 0) {
                        comp.at(j + 1, k) = c * kw[j];
                    } else {
                        comp.at(j, k + 1) = c * kw[k];
                    }
                }
            }
            fftw_execute_r2r(mixed_plans_[a].get(), comp.values.data(), comp.values.data());
            double scale = 1.0;
            for (int b = 0; b < domain_.dim; ++b) {
                scale /= std::sqrt(2.0 * domain_.lengths[b]);
            }
            for (double& v : comp.values) {
                v *= scale;
            }
        }
        return g;
    }

    /// Weak-form projection of div(flux) onto the sine modes.  With
    /// `dealias`, cosine modes beyond the two-thirds cutoff are dropped
    /// before differentiation.
    SpectralField divergence_of_flux(const VectorField& flux, bool dealias = false) const
    {
        detail::require_same(flux.domain, domain_, "divergence_of_flux");
        if (static_cast<int>(flux.components.size()) != domain_.dim) {
            throw ShapeMismatch("flux must have one component per axis");
        }
        SpectralField out(domain_);
        const std::size_t n0 = domain_.points(0);
        const std::size_t n1 = domain_.points(1);
        const std::array<std::size_t, 2> cut{dealias_cutoff(0), dealias_cutoff(1)};
        for (int a = 0; a < domain_.dim; ++a) {
            const AxisField& comp = flux.components[a];
            std::array<std::size_t, 2> expect{n0, n1};
            expect[a] += 2;
            if (comp.axis != a || comp.shape != expect || comp.values.size() != expect[0] * expect[1]) {
                throw ShapeMismatch("flux component has the wrong shape");
            }
            std::vector<double> y = comp.values;
            fftw_execute_r2r(mixed_plans_[a].get(), y.data(), y.data());
            // Along `a`: -(k pi/L) sqrt(2/L) (h/2) Y_k.  Across: sine projection.
            double scale = std::sqrt(2.0 / domain_.lengths[a]) * domain_.spacing(a) / 2.0;
            for (int b = 0; b < domain_.dim; ++b) {
                if (b != a) {
                    scale *= std::sqrt(domain_.lengths[b] / 2.0) / static_cast<double>(domain_.n[b] + 1);
                }
            }
            const auto& kw = eigen_.wavenumber[a];
            const std::size_t w = expect[1];
            for (std::size_t j = 0; j < n0; ++j) {
                for (std::size_t k = 0; k < n1; ++k) {
                    if (dealias && (j + 1 > cut[0] || (domain_.dim == 2 && k + 1 > cut[1]))) {
                        continue;
                    }
                    const std::size_t src = a == 0 ? (j + 1) * w + k : j * w + (k + 1);
                    const double kk = a == 0 ? kw[j] : kw[k];
                    out[j * n1 + k] -= kk * scale * y[src];
                }
            }
        }
        return out;
    }

    /// Highest retained mode index under the two-thirds rule.
    std::size_t dealias_cutoff(int axis) const
    {
        if (axis >= domain_.dim) {
            return 1;
        }
        return (2 * domain_.n[axis]) / 3;
    }

    /// Zeroes modes above the two-thirds cutoff on any axis.
    void dealias(SpectralField& f) const
    {
        const std::size_t n0 = domain_.points(0);
        const std::size_t n1 = domain_.points(1);
        const std::size_t c0 = dealias_cutoff(0);
        const std::size_t c1 = dealias_cutoff(1);
        for (std::size_t j = 0; j < n0; ++j) {
            for (std::size_t k = 0; k < n1; ++k) {
                if (j + 1 > c0 || (domain_.dim == 2 && k + 1 > c1)) {
                    f[j * n1 + k] = 0.0;
                }
            }
        }
    }

private:
    DomainSpec domain_;
    EigenTable eigen_;
    detail::PlanHandle sine_plan_;
    std::array<detail::PlanHandle, 2> mixed_plans_;
};

} // namespace fpme
