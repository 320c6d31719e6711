#include "slbec/bogoliubov.hpp"

#include <cmath>
#include <numbers>

#include "slbec/dipolar_kernel.hpp"
#include "slbec/errors.hpp"

namespace slbec {
namespace {

std::complex<double> longitudinal_mass(const CondensateParams& p) {
    return p.mass_mode == MassMode::real ? std::complex<double>(p.m_par.real(), 0.0) : p.m_par;
}

// Radicand of the real-mass dispersion along q, in energy^2.
double radicand(Vec3 q, const CondensateParams& p) {
    const double e = free_energy(q, p).real();
    return e * (e + p.C_dd * angular_factor(p.orientation, q));
}

}  // namespace

void validate(const CondensateParams& p) {
    if (!(p.m_perp > 0.0)) throw DomainError("CondensateParams invariant violated: m_perp > 0");
    if (std::abs(norm(p.orientation) - 1.0) > 1e-12)
        throw DomainError("CondensateParams invariant violated: |orientation| = 1");
    if (!std::isfinite(p.C_dd)) throw DomainError("CondensateParams invariant violated: C_dd finite");
    if (!(p.hbar > 0.0)) throw DomainError("CondensateParams: hbar must be positive");
    if (longitudinal_mass(p) == 0.0) throw DomainError("CondensateParams: m_par must be nonzero");
}

std::complex<double> free_energy(Vec3 q, const CondensateParams& p) {
    const double h2 = p.hbar * p.hbar;
    const double q_perp2 = q.x * q.x + q.y * q.y;
    return h2 * q_perp2 / (2.0 * p.m_perp) + h2 * q.z * q.z / (2.0 * longitudinal_mass(p));
}

DispersionResult dispersion(Vec3 q, const CondensateParams& p) {
    validate(p);
    DispersionResult result;
    result.q = q;
    if (dot(q, q) == 0.0) return result;

    const std::complex<double> e = free_energy(q, p);
    const double interaction = p.C_dd * angular_factor(p.orientation, q);
    std::complex<double> hbar_nu;
    if (p.mass_mode == MassMode::real) {
        // +0 imaginary part selects the upper branch for negative radicands.
        hbar_nu = std::sqrt(std::complex<double>(e.real() * (e.real() + interaction), 0.0));
    } else {
        hbar_nu = std::complex<double>(0.0, e.imag()) +
                  std::sqrt(std::complex<double>(e.real() * (e.real() + interaction), 0.0));
    }
    result.nu = hbar_nu / p.hbar;
    result.growth_rate = std::max(0.0, result.nu.imag());
    result.stable = result.growth_rate == 0.0;
    return result;
}

std::complex<double> dispersion_rescaled(Vec3 q, const CondensateParams& p, DipoleCase dipole_case) {
    validate(p);
    const Vec3 axis = dipole_case == DipoleCase::longitudinal ? Vec3{0, 0, 1} : Vec3{0, 1, 0};
    const double deviation = std::min(norm(p.orientation - axis), norm(p.orientation + axis));
    if (deviation > 1e-9)
        throw DomainError(dipole_case == DipoleCase::longitudinal
                              ? "dispersion_rescaled: longitudinal case needs dipoles along z"
                              : "dispersion_rescaled: transversal case needs dipoles along y");

    const std::complex<double> alpha = longitudinal_mass(p) / p.m_perp;
    const std::complex<double> qz = q.z * alpha;  // q~_z
    const std::complex<double> qz_term = qz * qz * alpha * alpha;  // q~_z^2 alpha^2
    const double qx2 = q.x * q.x;
    const double qy2 = q.y * q.y;
    const std::complex<double> q_tilde2 = qx2 + qy2 + qz * qz;
    if (q_tilde2 == 0.0) return 0.0;

    const std::complex<double> denominator = qz_term + qx2 + qy2;
    const std::complex<double> fraction = dipole_case == DipoleCase::longitudinal
                                              ? (2.0 * qz_term - qx2 - qy2) / denominator
                                              : (2.0 * qy2 - qx2 - qz_term) / denominator;
    const double h2 = p.hbar * p.hbar;
    const std::complex<double> e = h2 * q_tilde2 / (2.0 * p.m_perp);
    std::complex<double> hbar_nu = std::sqrt(e * (e + p.C_dd * fraction));
    if (hbar_nu.imag() < 0.0) hbar_nu = -hbar_nu;
    return hbar_nu / p.hbar;
}

StabilityMap stability_map(const CondensateParams& p, std::span<const Vec3> directions,
                           std::span<const double> magnitudes) {
    if (directions.empty() || magnitudes.empty())
        throw DomainError("stability_map needs at least one direction and one magnitude");
    validate(p);
    StabilityMap map;
    map.directions.assign(directions.begin(), directions.end());
    map.magnitudes.assign(magnitudes.begin(), magnitudes.end());
    map.entries.reserve(directions.size() * magnitudes.size());
    bool first = true;
    for (const Vec3& d : directions) {
        for (const double m : magnitudes) {
            map.entries.push_back(dispersion(m * d, p));
            const double growth = map.entries.back().growth_rate;
            if (first || growth > map.max_growth_rate) {
                map.max_growth_rate = growth;
                map.argmax_direction = d;
                map.argmax_magnitude = m;
                first = false;
            }
        }
    }
    return map;
}

std::vector<Vec3> spherical_directions(std::size_t n_theta, std::size_t n_phi) {
    if (n_theta == 0 || n_phi == 0) throw DomainError("spherical_directions needs a non-empty grid");
    std::vector<Vec3> dirs;
    dirs.reserve(n_theta * n_phi);
    for (std::size_t i = 0; i < n_theta; ++i) {
        const double theta = std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n_theta);
        for (std::size_t j = 0; j < n_phi; ++j) {
            const double phi = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_phi);
            dirs.push_back({std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)});
        }
    }
    return dirs;
}

std::optional<double> critical_wavenumber(Vec3 direction, const CondensateParams& p) {
    validate(p);
    if (std::abs(norm(direction) - 1.0) > 1e-9) throw DomainError("critical_wavenumber: direction must be a unit vector");

    // E(q) = q^2 e along the ray, so the radicand is negative exactly below
    // q_c^2 = -C_dd f / e when that ratio is positive.
    const double e = free_energy(direction, p).real();
    const double interaction = p.C_dd * angular_factor(p.orientation, direction);
    if (e == 0.0 || interaction == 0.0 || -interaction / e <= 0.0) return std::nullopt;

    double hi = std::sqrt(std::abs(interaction / e));
    while (radicand(hi * direction, p) < 0.0) hi *= 2.0;
    double lo = hi;
    while (radicand(lo * direction, p) >= 0.0) {
        lo *= 0.5;
        if (lo < 1e-300) return std::nullopt;
    }
    while ((hi - lo) > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        (radicand(mid * direction, p) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace slbec
