#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "slbec/constants.hpp"
#include "slbec/vec3.hpp"

namespace slbec {

enum class MassMode {
    real,     // Im(m_par) dropped
    complex,  // full complex longitudinal mass
};

// Homogeneous dipolar polariton condensate. C_dd is the operative coupling
// (energy); n_dsp is carried for bookkeeping only.
struct CondensateParams {
    double m_perp = 1.0;
    std::complex<double> m_par{1.0, 0.0};
    double C_dd = 0.0;
    Vec3 orientation{0.0, 0.0, 1.0};
    double n_dsp = 0.0;
    double hbar = constants::hbar;
    MassMode mass_mode = MassMode::real;
};

struct DispersionResult {
    Vec3 q;
    std::complex<double> nu;   // angular frequency, branch with Im >= 0
    bool stable = true;
    double growth_rate = 0.0;  // max(0, Im nu)
};

void validate(const CondensateParams& p);

// hbar^2 q_perp^2 / 2 m_perp + hbar^2 q_z^2 / 2 m_par (real part of m_par in real mode).
std::complex<double> free_energy(Vec3 q, const CondensateParams& p);

// Bogoliubov frequency hbar nu = sqrt(E (E + C_dd (3 cos^2 beta - 1))), where
// E = free_energy(q) and beta is the angle between q and the dipoles. In
// complex mode the linearization gives
// hbar nu = i Im E + sqrt(Re E (Re E + C_dd (3 cos^2 beta - 1))).
DispersionResult dispersion(Vec3 q, const CondensateParams& p);

enum class DipoleCase { longitudinal, transversal };

// Rescaled forms with q~ = (q_x, q_y, alpha q_z), alpha = m_par/m_perp, written
// term for term as published (including the q~_z^2 alpha^2 factors in the
// angular fractions). For comparison only; dispersion() is the reference.
std::complex<double> dispersion_rescaled(Vec3 q, const CondensateParams& p, DipoleCase dipole_case);

struct StabilityMap {
    std::vector<Vec3> directions;
    std::vector<double> magnitudes;
    std::vector<DispersionResult> entries;  // direction-major
    double max_growth_rate = 0.0;
    Vec3 argmax_direction{};
    double argmax_magnitude = 0.0;

    const DispersionResult& at(std::size_t direction, std::size_t magnitude) const {
        return entries[direction * magnitudes.size() + magnitude];
    }
};

StabilityMap stability_map(const CondensateParams& p, std::span<const Vec3> directions,
                           std::span<const double> magnitudes);

// Unit vectors on a polar/azimuthal product grid. Polar angles are cell
// centres in (0, pi); azimuths are uniform in [0, 2 pi).
std::vector<Vec3> spherical_directions(std::size_t n_theta, std::size_t n_phi);

// Wavenumber along the ray where the radicand changes sign, or nullopt when
// the ray is stable for every q.
std::optional<double> critical_wavenumber(Vec3 direction, const CondensateParams& p);

}  // namespace slbec
