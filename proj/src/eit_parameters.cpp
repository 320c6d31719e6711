#include "slbec/eit_parameters.hpp"

#include <cmath>
#include <limits>

#include "slbec/constants.hpp"
#include "slbec/errors.hpp"

namespace slbec {
namespace {

void require_positive(double value, const char* invariant) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw DomainError(std::string("MediumParams invariant violated: ") + invariant);
}

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) throw DomainError(std::string("MediumParams: ") + name + " must be finite");
}

}  // namespace

void validate(const MediumParams& p) {
    require_positive(p.g, "g > 0");
    require_positive(p.gamma, "gamma > 0");
    require_positive(p.Omega, "Omega > 0");
    require_positive(p.k, "k > 0");
    require_positive(p.V_t, "V_t > 0");
    if (!(p.N_atoms >= 1.0) || !std::isfinite(p.N_atoms))
        throw DomainError("MediumParams invariant violated: N_atoms >= 1");
    require_finite(p.Delta, "Delta");
    require_finite(p.k_c_perp.x, "k_c_perp");
    require_finite(p.k_c_perp.y, "k_c_perp");
    require_finite(p.U_strength, "U_strength");
    require_finite(p.dip_moment_r, "dip_moment_r");
}

void validate(const PulseSpec& pulse) {
    if (!(pulse.T > 0.0) || !std::isfinite(pulse.T)) throw DomainError("PulseSpec invariant violated: T > 0");
    if (!(pulse.L_pulse > 0.0) || !std::isfinite(pulse.L_pulse))
        throw DomainError("PulseSpec invariant violated: L_pulse > 0");
    if (!(pulse.delta_RR_avg >= 0.0) || !std::isfinite(pulse.delta_RR_avg))
        throw DomainError("PulseSpec invariant violated: delta_RR_avg >= 0");
}

DerivedQuantities derive_eit(const MediumParams& p) {
    validate(p);
    DerivedQuantities d;
    const double g2N = p.g * p.g * p.N_atoms;
    d.L_abs = p.gamma * constants::c / g2N;

    const double tan2 = g2N / (2.0 * p.Omega * p.Omega);
    d.theta = std::atan(std::sqrt(tan2));
    d.cos2_theta = 1.0 / (1.0 + tan2);
    d.sin2_theta = tan2 / (1.0 + tan2);
    d.v_gr = constants::c * d.cos2_theta;
    d.m_perp = constants::hbar * p.k / d.v_gr;

    const std::complex<double> detuning_ratio(p.Delta / p.gamma, -1.0);
    d.alpha = 1.0 / (2.0 * p.k * d.L_abs * detuning_ratio);
    d.m_par = d.m_perp * d.alpha;
    d.Gamma = {p.gamma, p.Delta};
    return d;
}

bool real_mass_suggested(const MediumParams& p) { return std::abs(p.Delta) >= 10.0 * p.gamma; }

std::complex<double> effective_m_par(const DerivedQuantities& d, bool real_mass_approximation) {
    return real_mass_approximation ? std::complex<double>(d.m_par.real(), 0.0) : d.m_par;
}

Vec3 phase_mismatch(Vec3 k_plus, Vec3 k_minus, Vec3 k_c_plus, Vec3 k_c_minus) {
    return (k_plus + k_c_minus) - (k_minus + k_c_plus);
}

WaveVectors phase_matched_wavevectors(double k, Vec2 k_c_perp) {
    const Vec3 perp{k_c_perp.x, k_c_perp.y, 0.0};
    return {
        .k_plus = {0.0, 0.0, k},
        .k_minus = {0.0, 0.0, -k},
        .k_c_plus = perp + Vec3{0.0, 0.0, k},
        .k_c_minus = perp + Vec3{0.0, 0.0, -k},
    };
}

bool MarginReport::all_pass() const {
    for (const Margin* m : all())
        if (!m->pass) return false;
    return true;
}

MarginReport adiabaticity_margins(const MediumParams& p, const DerivedQuantities& d, const PulseSpec& pulse,
                                  double threshold) {
    validate(pulse);
    if (!(threshold > 0.0)) throw DomainError("margin threshold must be positive");

    MarginReport report;
    report.threshold = threshold;
    auto make = [threshold](const char* name, double ratio) { return Margin{name, ratio, ratio >= threshold}; };

    report.decay_time = make("decay_time", std::abs(d.Gamma) * pulse.T);

    const double detuning_factor = std::abs(std::complex<double>(1.0, p.Delta / p.gamma));
    const double length_bound = std::sqrt(detuning_factor * d.L_abs / p.k);
    report.pulse_length = make("pulse_length", pulse.L_pulse / length_bound);

    const double control_rate = (p.Omega * p.Omega / p.gamma) * std::sqrt(d.L_abs / pulse.L_pulse);
    report.control_rate = make("control_rate", control_rate * pulse.T);

    const double dipolar = pulse.delta_RR_avg > 0.0 ? control_rate / pulse.delta_RR_avg
                                                    : std::numeric_limits<double>::infinity();
    report.dipolar_detuning = make("dipolar_detuning", dipolar);
    return report;
}

Units Units::polariton(const MediumParams& p, const DerivedQuantities& d) {
    Units u;
    u.hbar = constants::hbar;
    u.length = 1.0 / p.k;
    u.time = d.m_perp * u.length * u.length / constants::hbar;
    return u;
}

}  // namespace slbec
