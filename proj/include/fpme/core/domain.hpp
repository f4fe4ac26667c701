#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace fpme {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

/// Box (0,L1) or (0,L1)x(0,L2) discretized by interior nodes x_i = (i+1) h,
/// h = L/(n+1), i = 0..n-1.  Boundary nodes carry the homogeneous Dirichlet
/// value and are never stored.
struct DomainSpec {
    int dim = 1;
    std::array<double, 2> lengths{1.0, 1.0};
    std::array<std::size_t, 2> n{64, 1};

    static DomainSpec line(double length, std::size_t points)
    {
        DomainSpec d;
        d.dim = 1;
        d.lengths = {length, 1.0};
        d.n = {points, 1};
        d.validate();
        return d;
    }

    static DomainSpec rect(double lx, double ly, std::size_t nx, std::size_t ny)
    {
        DomainSpec d;
        d.dim = 2;
        d.lengths = {lx, ly};
        d.n = {nx, ny};
        d.validate();
        return d;
    }

    void validate() const
    {
        if (dim != 1 && dim != 2) {
            throw InvalidArgument("domain dimension must be 1 or 2, got " + std::to_string(dim));
        }
        for (int a = 0; a < dim; ++a) {
            if (!(lengths[a] > 0.0)) {
                throw InvalidArgument("domain lengths must be positive");
            }
            if (n[a] < 8) {
                throw InvalidArgument("at least 8 interior nodes per axis are required");
            }
        }
    }

    std::size_t points(int axis) const { return axis < dim ? n[axis] : 1; }
    std::size_t size() const { return points(0) * points(1); }
    double spacing(int axis) const { return lengths[axis] / static_cast<double>(n[axis] + 1); }

    double min_spacing() const
    {
        return dim == 1 ? spacing(0) : std::min(spacing(0), spacing(1));
    }

    /// Quadrature weight of one interior node.
    double cell_volume() const { return dim == 1 ? spacing(0) : spacing(0) * spacing(1); }
    double volume() const { return dim == 1 ? lengths[0] : lengths[0] * lengths[1]; }
    double node(int axis, std::size_t i) const { return static_cast<double>(i + 1) * spacing(axis); }

    friend bool operator==(const DomainSpec& a, const DomainSpec& b)
    {
        if (a.dim != b.dim) {
            return false;
        }
        for (int k = 0; k < a.dim; ++k) {
            if (a.lengths[k] != b.lengths[k] || a.n[k] != b.n[k]) {
                return false;
            }
        }
        return true;
    }
};

} // namespace fpme
