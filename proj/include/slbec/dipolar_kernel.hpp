#pragma once

#include <optional>
#include <span>
#include <vector>

#include "slbec/grid.hpp"
#include "slbec/vec3.hpp"

namespace slbec {

// eps(r) = strength (1 - 3 cos^2 phi) / |r|^3, phi measured from `orientation`.
// `strength` is U times the squared Rydberg dipole moment, in frequency x volume.
struct KernelSpec {
    Vec3 orientation{0.0, 0.0, 1.0};
    double strength = 0.0;
    // Hard short-distance cutoff. Unset means 0 for point evaluation and one
    // (smallest) grid spacing for grid tables.
    std::optional<double> cutoff_radius;
    // Long-range truncation for grid tables; unset means half the shortest box edge.
    std::optional<double> sphere_radius;
};

void validate(const KernelSpec& spec);

// 3 cos^2(angle between axis and v) - 1, exact zero for lattice vectors on the magic cone.
double angular_factor(Vec3 axis, Vec3 v);

double kernel_value(Vec3 r, const KernelSpec& spec);

// Infinite-space transform (4 pi / 3) strength (3 cos^2 beta - 1); zero at q = 0.
double kernel_fourier_analytic(Vec3 q, const KernelSpec& spec);

// Transform of the kernel restricted to the shell inner <= |r| <= outer:
// 4 pi strength (3 cos^2 beta - 1) [j1(q inner)/(q inner) - j1(q outer)/(q outer)].
double kernel_fourier_truncated(Vec3 q, const KernelSpec& spec, double inner, double outer);

enum class TableMethod {
    analytic,  // truncated continuum transform sampled on the reciprocal lattice
    lattice,   // DFT of the kernel sampled at minimum-image grid displacements
};

// Kernel coefficients on a grid's reciprocal lattice, in FFT order. The q = 0
// coefficient is always zero.
struct FourierTable {
    Grid grid;
    KernelSpec spec;
    TableMethod method = TableMethod::analytic;
    double inner_radius = 0.0;
    double outer_radius = 0.0;
    std::vector<double> coefficients;

    double at(std::size_t ix, std::size_t iy, std::size_t iz) const { return coefficients[grid.index(ix, iy, iz)]; }
};

FourierTable kernel_table_fourier(const Grid& grid, const KernelSpec& spec,
                                  TableMethod method = TableMethod::analytic);

// Periodic convolution (eps * density)(r_j) through the table.
std::vector<double> convolve(const FourierTable& table, std::span<const double> density);

// Table coefficient for an arbitrary reciprocal-lattice vector of the table's grid.
double table_coefficient(const FourierTable& table, Vec3 q);

}  // namespace slbec
