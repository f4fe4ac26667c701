#pragma once

#include <cmath>
#include <vector>

#include "fpme/evolution/operator.hpp"

namespace fpme {

/// The fixed-point iteration did not contract.
class NoContraction : public Error {
public:
    using Error::Error;
};

struct PicardOptions {
    std::size_t mesh = 64; // uniform sub-intervals of [0, T0]
    std::size_t max_iters = 60;
    double tol = 1e-12; // on the sup-norm increment, relative to the iterate
};

struct PicardResult {
    std::vector<double> times;
    std::vector<SpectralField> states;
    std::vector<double> increments; // sup over the space-time mesh of |v^{k+1} - v^k|
    std::vector<double> ratios;     // increments[k] / increments[k-1]
    std::size_t iterations = 0;
    bool converged = false;
};

/// Iterates v -> e^{delta t Lap} u0 + int_0^t e^{delta (t-tau) Lap} Theta(v, f)(tau) dtau,
/// Theta the non-viscous part of the right-hand side, with exponential
/// Euler quadrature on a uniform mesh.  Starts from v^0(t) = u0.
inline PicardResult picard_solve(const GridField& u0, const ForcingSpec& f, const ModelParams& p, double T0,
                                 const PicardOptions& opt = {})
{
    if (!p.use_mollified || !(p.kappa1 > 0.0) || !(p.kappa2 > 0.0) || p.pressure != PressureMode::truncated) {
        throw InvalidArgument("picard_solve requires mollified nonlinearities and the truncated operators");
    }
    if (!(T0 > 0.0) || opt.mesh < 64) {
        throw InvalidArgument("picard_solve requires T0 > 0 and at least 64 mesh intervals");
    }
    const EvolutionOperator op(std::make_shared<const SineBasis>(u0.domain), p, f);
    const SineBasis& basis = op.basis();
    const auto& lam = basis.eigen().lambda;
    const std::size_t M = opt.mesh;
    const double tau = T0 / static_cast<double>(M);
    const std::size_t n = lam.size();

    std::vector<double> decay(n);
    std::vector<double> weight(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double z = p.delta * lam[j] * tau;
        decay[j] = std::exp(-z);
        weight[j] = z > 0.0 ? -std::expm1(-z) / (p.delta * lam[j]) : tau;
    }

    PicardResult r;
    const SpectralField a0 = basis.to_spectral(u0);
    std::vector<SpectralField> heat(M + 1, a0);
    for (std::size_t k = 1; k <= M; ++k) {
        heat[k] = heat[k - 1];
        for (std::size_t j = 0; j < n; ++j) {
            heat[k][j] *= decay[j];
        }
    }
    for (std::size_t k = 0; k <= M; ++k) {
        r.times.push_back(tau * static_cast<double>(k));
    }
    std::vector<SpectralField> v(M + 1, a0);

    for (std::size_t it = 0; it < opt.max_iters; ++it) {
        std::vector<SpectralField> next(M + 1, SpectralField(u0.domain));
        SpectralField w(u0.domain);
        double inc = 0.0;
        double size = 0.0;
        for (std::size_t k = 0; k <= M; ++k) {
            next[k] = heat[k];
            next[k] += w;
            inc = std::max(inc, max_abs(basis.from_spectral(next[k] - v[k]).values));
            size = std::max(size, max_abs(basis.from_spectral(next[k]).values));
            if (k < M) {
                const SpectralField theta = op.nonlinear(v[k], r.times[k]);
                for (std::size_t j = 0; j < n; ++j) {
                    w[j] = decay[j] * w[j] + weight[j] * theta[j];
                }
            }
        }
        v = std::move(next);
        r.iterations = it + 1;
        if (!r.increments.empty() && r.increments.back() > 0.0) {
            r.ratios.push_back(inc / r.increments.back());
        }
        r.increments.push_back(inc);
        if (inc <= opt.tol * size) {
            r.converged = true;
            break;
        }
        if (r.ratios.size() >= 3 && r.ratios.back() >= 1.0 && r.ratios[r.ratios.size() - 2] >= 1.0) {
            throw NoContraction("Picard increments stopped decreasing; reduce T0");
        }
    }
    if (!r.converged) {
        throw NoContraction("Picard iteration did not converge within max_iters");
    }
    r.states = std::move(v);
    return r;
}

} // namespace fpme
