#pragma once

#include <array>
#include <numbers>
#include <vector>

#include "fpme/core/domain.hpp"

namespace fpme {

/// Dirichlet eigenvalues of -Laplacian on the box, laid out like the
/// spectral coefficients.  wavenumber[a][j-1] = j pi / L_a.
struct EigenTable {
    DomainSpec domain;
    std::vector<double> lambda;
    std::array<std::vector<double>, 2> wavenumber;

    double max() const { return lambda.empty() ? 0.0 : lambda.back(); }
    double min() const { return lambda.empty() ? 0.0 : lambda.front(); }
};

inline EigenTable build_eigen(const DomainSpec& domain)
{
    domain.validate();
    EigenTable t;
    t.domain = domain;
    for (int a = 0; a < domain.dim; ++a) {
        auto& k = t.wavenumber[a];
        k.resize(domain.n[a]);
        for (std::size_t j = 0; j < domain.n[a]; ++j) {
            k[j] = static_cast<double>(j + 1) * std::numbers::pi / domain.lengths[a];
        }
    }
    t.lambda.resize(domain.size());
    if (domain.dim == 1) {
        for (std::size_t j = 0; j < domain.n[0]; ++j) {
            t.lambda[j] = t.wavenumber[0][j] * t.wavenumber[0][j];
        }
    } else {
        const std::size_t n1 = domain.n[1];
        for (std::size_t j = 0; j < domain.n[0]; ++j) {
            for (std::size_t k = 0; k < n1; ++k) {
                const double kx = t.wavenumber[0][j];
                const double ky = t.wavenumber[1][k];
                t.lambda[j * n1 + k] = kx * kx + ky * ky;
            }
        }
    }
    return t;
}

} // namespace fpme
