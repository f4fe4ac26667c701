#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "fpme/core/domain.hpp"

namespace fpme {

namespace detail {

inline void require_same(const DomainSpec& a, const DomainSpec& b, const char* what)
{
    if (!(a == b)) {
        throw ShapeMismatch(std::string(what) + ": fields live on different grids");
    }
}

} // namespace detail

/// Nodal values on the interior nodes, row-major with axis 0 slowest.
struct GridField {
    DomainSpec domain;
    std::vector<double> values;

    GridField() = default;
    explicit GridField(const DomainSpec& d) : domain(d), values(d.size(), 0.0) {}
    GridField(const DomainSpec& d, std::vector<double> v) : domain(d), values(std::move(v))
    {
        if (values.size() != domain.size()) {
            throw ShapeMismatch("grid values do not match the domain shape");
        }
    }

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    double& at(std::size_t i, std::size_t j) { return values[i * domain.points(1) + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * domain.points(1) + j]; }
};

/// Coefficients f_j against the L2-normalized Dirichlet eigenfunctions,
/// mode (j,k) stored at (j-1)*n1 + (k-1).
struct SpectralField {
    DomainSpec domain;
    std::vector<double> coeffs;

    SpectralField() = default;
    explicit SpectralField(const DomainSpec& d) : domain(d), coeffs(d.size(), 0.0) {}
    SpectralField(const DomainSpec& d, std::vector<double> c) : domain(d), coeffs(std::move(c))
    {
        if (coeffs.size() != domain.size()) {
            throw ShapeMismatch("coefficient count does not match the domain shape");
        }
    }

    static SpectralField unit(const DomainSpec& d, std::size_t index)
    {
        SpectralField f(d);
        f.coeffs.at(index) = 1.0;
        return f;
    }

    std::size_t size() const { return coeffs.size(); }
    double& operator[](std::size_t i) { return coeffs[i]; }
    double operator[](std::size_t i) const { return coeffs[i]; }

    SpectralField& operator+=(const SpectralField& o)
    {
        detail::require_same(domain, o.domain, "spectral +=");
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            coeffs[i] += o.coeffs[i];
        }
        return *this;
    }

    SpectralField& operator-=(const SpectralField& o)
    {
        detail::require_same(domain, o.domain, "spectral -=");
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            coeffs[i] -= o.coeffs[i];
        }
        return *this;
    }

    SpectralField& operator*=(double a)
    {
        for (double& c : coeffs) {
            c *= a;
        }
        return *this;
    }

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
};

/// One component of a vector field.  Along its own axis the component
/// includes both boundary nodes (n+2 points); across the other axis it
/// lives on the interior nodes.  This is the natural home of a derivative
/// of a sine series, which is a cosine series that does not vanish on the
/// boundary.
struct AxisField {
    int axis = 0;
    std::array<std::size_t, 2> shape{0, 1};
    std::vector<double> values;

    static AxisField zeros(const DomainSpec& d, int axis)
    {
        AxisField f;
        f.axis = axis;
        f.shape = {d.points(0), d.points(1)};
        f.shape[axis] += 2;
        f.values.assign(f.shape[0] * f.shape[1], 0.0);
        return f;
    }

    double& at(std::size_t i, std::size_t j) { return values[i * shape[1] + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * shape[1] + j]; }
};

struct VectorField {
    DomainSpec domain;
    std::vector<AxisField> components;

    static VectorField zeros(const DomainSpec& d)
    {
        VectorField v;
        v.domain = d;
        for (int a = 0; a < d.dim; ++a) {
            v.components.push_back(AxisField::zeros(d, a));
        }
        return v;
    }
};

/// Pads interior values with the Dirichlet zeros along `axis`.
inline AxisField extend_to_axis(const GridField& u, int axis)
{
    AxisField out = AxisField::zeros(u.domain, axis);
    const std::size_t n0 = u.domain.points(0);
    const std::size_t n1 = u.domain.points(1);
    for (std::size_t i = 0; i < n0; ++i) {
        for (std::size_t j = 0; j < n1; ++j) {
            const std::size_t ei = axis == 0 ? i + 1 : i;
            const std::size_t ej = axis == 1 ? j + 1 : j;
            out.at(ei, ej) = u.at(i, j);
        }
    }
    return out;
}

inline double max_abs(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

inline bool all_finite(std::span<const double> v)
{
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

/// Sign-preserving power |u|^{q-1} u, with 0 mapped to 0 for every q > 0.
inline double signed_power(double u, double q)
{
    if (u == 0.0) {
        return 0.0;
    }
    return std::copysign(std::pow(std::abs(u), q), u);
}

inline GridField map_grid(const GridField& u, auto&& fn)
{
    GridField out(u.domain);
    for (std::size_t i = 0; i < u.size(); ++i) {
        out[i] = fn(u[i]);
    }
    return out;
}

/// Discrete L2 inner product with the interior-node quadrature weight.
inline double grid_inner(const GridField& a, const GridField& b)
{
    detail::require_same(a.domain, b.domain, "grid inner product");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s * a.domain.cell_volume();
}

inline double spectral_inner(const SpectralField& a, const SpectralField& b)
{
    detail::require_same(a.domain, b.domain, "spectral inner product");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

} // namespace fpme
