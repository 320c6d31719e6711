#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "slbec/vec3.hpp"

namespace slbec {

using cd = std::complex<double>;

// Uniform periodic grid. Storage is row-major with z varying fastest, so a
// one-dimensional line along z is the grid {1, 1, nz}.
struct Grid {
    std::array<std::size_t, 3> dims{1, 1, 1};
    std::array<double, 3> spacing{1.0, 1.0, 1.0};

    std::size_t size() const { return dims[0] * dims[1] * dims[2]; }
    double length(int axis) const { return static_cast<double>(dims[axis]) * spacing[axis]; }
    double cell_volume() const { return spacing[0] * spacing[1] * spacing[2]; }
    double volume() const { return cell_volume() * static_cast<double>(size()); }

    std::size_t index(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return (ix * dims[1] + iy) * dims[2] + iz;
    }

    // Position of sample i along an axis, origin at the first sample.
    double coordinate(int axis, std::size_t i) const { return static_cast<double>(i) * spacing[axis]; }

    // Minimum-image displacement of sample i from the origin; index n/2 maps to -L/2.
    double displacement(int axis, std::size_t i) const;

    // Angular wavenumber of FFT bin i (standard ordering; the Nyquist bin is negative).
    double wavenumber(int axis, std::size_t i) const;

    Vec3 position(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return {coordinate(0, ix), coordinate(1, iy), coordinate(2, iz)};
    }
    Vec3 wavevector(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return {wavenumber(0, ix), wavenumber(1, iy), wavenumber(2, iz)};
    }

    friend bool operator==(const Grid&, const Grid&) = default;
};

Grid line_grid(std::size_t nz, double dz);

// Throws GridError unless every axis has an even count >= 8 and positive spacing.
void validate_solver_grid(const Grid& grid);

// Throws GridError on non-positive spacing or empty axes.
void validate_grid(const Grid& grid);

struct ComplexField {
    Grid grid;
    std::vector<cd> values;

    ComplexField() = default;
    explicit ComplexField(const Grid& g) : grid(g), values(g.size()) {}
    ComplexField(const Grid& g, std::vector<cd> v);

    std::size_t size() const { return values.size(); }
    cd& operator[](std::size_t i) { return values[i]; }
    const cd& operator[](std::size_t i) const { return values[i]; }
};

void require_same_grid(const ComplexField& a, const ComplexField& b, const char* what);

// Sum of |f|^2 over samples times the cell volume.
double field_norm(const ComplexField& f);

}  // namespace slbec
