#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "slbec/eit_parameters.hpp"
#include "slbec/grid.hpp"

namespace slbec {

// Normalized counter-propagating probe amplitudes E+ and E-.
struct FieldPair {
    ComplexField E_plus;
    ComplexField E_minus;
};

// Sum and difference modes, sqrt2 E_S = E+ + E-, sqrt2 E_D = E+ - E-.
struct ModePair {
    ComplexField E_S;
    ComplexField E_D;
};

// Sum/difference polarizations and the ground-Rydberg coherence.
struct CoherenceSet {
    ComplexField S;
    ComplexField D;
    ComplexField sigma_gr;
};

ModePair to_sum_difference(const FieldPair& pair);
FieldPair from_sum_difference(const ModePair& modes);

struct DifferenceElimination {
    ComplexField E_D;
    // Share of the spectral energy of E_S sitting on the z Nyquist plane.
    double nyquist_fraction = 0.0;
    bool under_resolved = false;
};

// Adiabatic difference mode E_D = -L_abs (1 + i Delta/gamma) dE_S/dz, spectral in z.
// under_resolved is raised when nyquist_fraction exceeds 1e-6.
DifferenceElimination eliminate_difference(const ComplexField& E_S, const MediumParams& params,
                                           const DerivedQuantities& derived);

// Sum polarization S = -(i/gN) (d/dt - c L_abs (1 + i Delta/gamma) d2/dz2 - i (c/2k) lap_perp) E_S
// at slice `at` of a uniformly sampled trajectory. Space derivatives are
// spectral, the time derivative a centered difference, so 1 <= at <= size-2.
ComplexField sum_polarization(std::span<const ComplexField> slices, double dt, std::size_t at,
                              const MediumParams& params, const DerivedQuantities& derived);

// Adiabatic ground-Rydberg coherence sigma_gr = -g E_S exp(-i kc.r) / (sqrt2 Omega).
ComplexField spin_coherence_adiabatic(const ComplexField& E_S, double g, double Omega, Vec2 k_c_perp);

// Dark-state polariton Psi = cos(theta) E_S - sin(theta) sqrt(N) sigma_gr exp(+i kc.r).
ComplexField compose_polariton(const ComplexField& E_S, const ComplexField& sigma_gr, double theta,
                               Vec2 k_c_perp, double N_atoms);

// All three coherences at slice `at`: S as in sum_polarization, D = i g E_D / Gamma
// from the adiabatically eliminated difference mode, sigma_gr adiabatic.
CoherenceSet adiabatic_coherences(std::span<const ComplexField> slices, double dt, std::size_t at,
                                  const MediumParams& params, const DerivedQuantities& derived);

enum class LinearIntegrator {
    exponential,  // exact in Fourier space, unconditionally stable
    explicit_euler,  // forward-time centered-space, for cross-checks only
};

struct LinearSimConfig {
    MediumParams medium;
    ComplexField initial;  // E_S(z, 0) on a line grid
    double dt = 0.0;
    std::size_t steps = 0;
    std::size_t snapshot_stride = 1;
    LinearIntegrator integrator = LinearIntegrator::exponential;
};

struct LinearTrajectory {
    std::complex<double> diffusion;  // c L_abs (1 + i Delta/gamma) cos^2 theta
    std::vector<double> times;
    std::vector<ComplexField> snapshots;
    std::vector<double> variances;  // |E_S|-weighted profile variance
    std::vector<double> norms;      // sum |E_S|^2 dz
    double variance_growth_rate = 0.0;  // least-squares slope of variance vs time
};

// Integrates dE_S/dt = c L_abs (1 + i Delta/gamma) cos^2 theta d2E_S/dz2 on a
// periodic line (no dipolar shift).
LinearTrajectory simulate_linear_1d(const LinearSimConfig& config);

// Variance of a profile along z weighted by |E|, about its |E|-weighted centroid.
double profile_variance(const ComplexField& field);

// Largest dt the explicit integrator accepts for diffusion coefficient D.
double explicit_step_bound(std::complex<double> diffusion, double dz);

}  // namespace slbec
