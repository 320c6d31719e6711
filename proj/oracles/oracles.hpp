#pragma once

// Independent reference computations used by the tests and the selftest
// command. Nothing here calls the library's physics code; only the grid
// bookkeeping and FFT wrapper are shared.

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "slbec/grid.hpp"

namespace slbec::oracle {

// O(N^2) periodic sum  out_i = sum_{j != i} eps(d_ij) n_j dV  with minimum-image
// displacements and eps(r) = strength (1 - 3 (axis.r)^2/r^2) / r^3 restricted
// to inner <= |r| <= outer.
std::vector<double> direct_dipolar_sum(const Grid& grid, const std::vector<double>& density, Vec3 axis,
                                       double strength, double inner, double outer);

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};
Quadrature gauss_legendre(int n);

// Fourier transform  int eps(r) exp(-i q.r) d^3r  over the shell inner <= |r| <= outer,
// by tensor-product quadrature in (log r, cos, azimuth) about the q direction.
double kernel_fourier_quadrature(Vec3 q, Vec3 axis, double strength, double inner, double outer,
                                 int radial_panels = 400, int n_cos = 48, int n_azimuth = 64);

// Density variance of a free Gaussian along one axis: s0 (1 + (hbar t / (2 m s0))^2), s0 = sigma0^2.
double free_gaussian_variance(double sigma0_sq, double hbar, double mass, double t);

// Diffusive spreading sigma^2(t) = sigma0^2 + 2 D t.
double diffusion_variance(double sigma0_sq, double D, double t);

// Reference integrator for  i hbar psi_t = K psi + V[|psi|^2] psi  with real
// masses: integrating-factor RK4 in Fourier space. `potential` maps a density
// to the potential energy divided by hbar (a frequency).
using PotentialFn = std::function<std::vector<double>(const std::vector<double>&)>;
std::vector<std::complex<double>> integrating_factor_rk4(const Grid& grid, std::vector<std::complex<double>> psi,
                                                         double hbar, double m_perp, double m_par,
                                                         const PotentialFn& potential, double t, int substeps);

// Bogoliubov frequency from a kernel coefficient:
//   nu^2 = (E/hbar) (E/hbar + 2 n0 sin2 V(q)),  E = hbar^2 (qz^2/m_par + qp^2/m_perp) / 2.
// Returns nu (real, >= 0) when stable, i*rate when unstable.
std::complex<double> bogoliubov_frequency(Vec3 q, double hbar, double m_perp, double m_par, double n0,
                                          double sin2_theta, double kernel_coefficient);

}  // namespace slbec::oracle
