#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "fpme/core/fields.hpp"

namespace fpme {

/// Band-limited random sine series: coefficient (j,k) ~ N(0, 1/(j^2+k^2))
/// for modes up to `max_mode` per axis (default n/3), zero above.
inline SpectralField random_bandlimited(const DomainSpec& d, std::mt19937_64& rng, std::size_t max_mode = 0)
{
    SpectralField f(d);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t n0 = d.points(0);
    const std::size_t n1 = d.points(1);
    const std::size_t c0 = max_mode ? max_mode : n0 / 3;
    const std::size_t c1 = d.dim == 1 ? 1 : (max_mode ? max_mode : n1 / 3);
    for (std::size_t j = 0; j < n0; ++j) {
        for (std::size_t k = 0; k < n1; ++k) {
            if (j + 1 > c0 || k + 1 > c1) {
                continue;
            }
            const double jj = static_cast<double>(j + 1);
            const double kk = d.dim == 1 ? 0.0 : static_cast<double>(k + 1);
            f[j * n1 + k] = normal(rng) / std::sqrt(jj * jj + kk * kk);
        }
    }
    return f;
}

} // namespace fpme
