#pragma once

#include <array>
#include <complex>
#include <string>

#include "slbec/vec3.hpp"

namespace slbec {

// Raw atomic and optical inputs, SI units (angular frequencies in rad/s).
struct MediumParams {
    double g = 0.0;             // atom-field coupling
    double N_atoms = 0.0;       // number of atoms in the interaction volume
    double V_t = 0.0;           // interaction volume [m^3]
    double gamma = 0.0;         // transversal decay rate of the g-e coherences
    double Delta = 0.0;         // one-photon detuning, either sign
    double Omega = 0.0;         // control Rabi frequency (real, equal in both legs)
    double k = 0.0;             // probe wavenumber [1/m]
    Vec2 k_c_perp{};            // transverse control wavevector [1/m]
    double U_strength = 0.0;    // signed dipolar strength U
    double dip_moment_r = 0.0;  // Rydberg dipole moment

    // U times the squared Rydberg dipole moment, the kernel prefactor.
    double dipolar_strength() const { return U_strength * dip_moment_r * dip_moment_r; }
};

struct DerivedQuantities {
    double L_abs = 0.0;        // absorption length gamma c / (g^2 N)
    double theta = 0.0;        // mixing angle, tan^2 = g^2 N / (2 Omega^2)
    double cos2_theta = 1.0;
    double sin2_theta = 0.0;
    double v_gr = 0.0;         // c cos^2 theta
    double m_perp = 0.0;       // hbar k / v_gr
    std::complex<double> alpha;   // (2 k L_abs (Delta/gamma - i))^-1
    std::complex<double> m_par;   // m_perp alpha
    std::complex<double> Gamma;   // gamma + i Delta
};

struct PulseSpec {
    double T = 0.0;             // characteristic pulse / control time [s]
    double L_pulse = 0.0;       // probe pulse length inside the medium [m]
    double delta_RR_avg = 0.0;  // expected mean dipolar detuning [rad/s]
};

struct Margin {
    std::string name;
    double ratio = 0.0;
    bool pass = false;
};

// Dimensionless ratios of the "much larger than" conditions of the adiabatic
// theory. Each passes when ratio >= threshold.
struct MarginReport {
    Margin decay_time;        // |Gamma| T
    Margin pulse_length;      // L_pulse / sqrt(|1 + i Delta/gamma| L_abs / k)
    Margin control_rate;      // (Omega^2/gamma) sqrt(L_abs/L_pulse) T
    Margin dipolar_detuning;  // (Omega^2/gamma) sqrt(L_abs/L_pulse) / <Delta_RR>
    double threshold = 10.0;

    std::array<const Margin*, 4> all() const {
        return {&decay_time, &pulse_length, &control_rate, &dipolar_detuning};
    }
    bool all_pass() const;
};

// Throws DomainError naming the violated invariant.
void validate(const MediumParams& params);
void validate(const PulseSpec& pulse);

DerivedQuantities derive_eit(const MediumParams& params);

// The imaginary part of m_par may be dropped once |Delta| >= 10 gamma.
bool real_mass_suggested(const MediumParams& params);

// m_par with its imaginary part zeroed when the real-mass approximation is on.
std::complex<double> effective_m_par(const DerivedQuantities& derived, bool real_mass_approximation);

// Four-wave-mixing mismatch k+ + kc- - (k- + kc+).
Vec3 phase_mismatch(Vec3 k_plus, Vec3 k_minus, Vec3 k_c_plus, Vec3 k_c_minus);

struct WaveVectors {
    Vec3 k_plus, k_minus, k_c_plus, k_c_minus;
};

// Counter-propagating probes along z with control fields whose longitudinal
// parts cancel the probes' (kc+ = +k ez, kc- = -k ez) and share k_c_perp.
WaveVectors phase_matched_wavevectors(double k, Vec2 k_c_perp);

MarginReport adiabaticity_margins(const MediumParams& params, const DerivedQuantities& derived,
                                  const PulseSpec& pulse, double threshold = 10.0);

// Polariton units: length 1/k, time m_perp/(hbar k^2). In these units hbar = 1
// and m_perp = 1, so the solvers run on O(1) numbers.
struct Units {
    double length = 1.0;
    double time = 1.0;
    double hbar = 1.0;

    static Units polariton(const MediumParams& params, const DerivedQuantities& derived);

    double energy() const { return hbar / time; }
    double mass() const { return hbar * time / (length * length); }
    double wavenumber() const { return 1.0 / length; }
    double frequency() const { return 1.0 / time; }
    double density() const { return 1.0 / (length * length * length); }
    // Kernel strength carries frequency x volume.
    double kernel_strength() const { return length * length * length / time; }
};

}  // namespace slbec
