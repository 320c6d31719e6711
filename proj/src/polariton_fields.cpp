#include "slbec/polariton_fields.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "slbec/constants.hpp"
#include "slbec/errors.hpp"
#include "slbec/fft.hpp"

namespace slbec {
namespace {

constexpr double sqrt2 = std::numbers::sqrt2;
constexpr cd I{0.0, 1.0};

cd longitudinal_coefficient(const MediumParams& p, const DerivedQuantities& d) {
    return constants::c * d.L_abs * cd(1.0, p.Delta / p.gamma);
}

// exp(i kc.r) with kc in the x-y plane.
cd transverse_phase(const Grid& g, Vec2 k_c_perp, std::size_t ix, std::size_t iy) {
    const double phase = k_c_perp.x * g.coordinate(0, ix) + k_c_perp.y * g.coordinate(1, iy);
    return std::polar(1.0, phase);
}

template <typename F>
void for_each_index(const Grid& g, F&& f) {
    for (std::size_t ix = 0; ix < g.dims[0]; ++ix)
        for (std::size_t iy = 0; iy < g.dims[1]; ++iy)
            for (std::size_t iz = 0; iz < g.dims[2]; ++iz) f(ix, iy, iz, g.index(ix, iy, iz));
}

}  // namespace

ModePair to_sum_difference(const FieldPair& pair) {
    require_same_grid(pair.E_plus, pair.E_minus, "E_plus vs E_minus");
    ModePair modes{ComplexField(pair.E_plus.grid), ComplexField(pair.E_plus.grid)};
    for (std::size_t i = 0; i < pair.E_plus.size(); ++i) {
        modes.E_S[i] = (pair.E_plus[i] + pair.E_minus[i]) / sqrt2;
        modes.E_D[i] = (pair.E_plus[i] - pair.E_minus[i]) / sqrt2;
    }
    return modes;
}

FieldPair from_sum_difference(const ModePair& modes) {
    require_same_grid(modes.E_S, modes.E_D, "E_S vs E_D");
    FieldPair pair{ComplexField(modes.E_S.grid), ComplexField(modes.E_S.grid)};
    for (std::size_t i = 0; i < modes.E_S.size(); ++i) {
        pair.E_plus[i] = (modes.E_S[i] + modes.E_D[i]) / sqrt2;
        pair.E_minus[i] = (modes.E_S[i] - modes.E_D[i]) / sqrt2;
    }
    return pair;
}

DifferenceElimination eliminate_difference(const ComplexField& E_S, const MediumParams& params,
                                           const DerivedQuantities& derived) {
    const Grid& g = E_S.grid;
    validate_grid(g);
    std::vector<cd> spectrum = E_S.values;
    const FftPlan plan(g);
    plan.forward(spectrum);

    const std::size_t nz = g.dims[2];
    double total = 0.0;
    double nyquist = 0.0;
    for_each_index(g, [&](std::size_t, std::size_t, std::size_t iz, std::size_t i) {
        const double e = std::norm(spectrum[i]);
        total += e;
        // The Nyquist bin of an odd derivative has no well-defined sign; drop it.
        if (nz % 2 == 0 && iz == nz / 2) {
            nyquist += e;
            spectrum[i] = 0.0;
        } else {
            spectrum[i] *= I * g.wavenumber(2, iz);
        }
    });
    plan.inverse(spectrum);

    DifferenceElimination result;
    const cd coefficient = -derived.L_abs * cd(1.0, params.Delta / params.gamma);
    for (auto& v : spectrum) v *= coefficient;
    result.E_D = ComplexField(g, std::move(spectrum));
    result.nyquist_fraction = total > 0.0 ? nyquist / total : 0.0;
    result.under_resolved = result.nyquist_fraction > 1e-6;
    return result;
}

ComplexField sum_polarization(std::span<const ComplexField> slices, double dt, std::size_t at,
                              const MediumParams& params, const DerivedQuantities& derived) {
    if (slices.size() < 3) throw DomainError("sum_polarization needs at least 3 time slices");
    if (at < 1 || at + 1 >= slices.size())
        throw DomainError("sum_polarization: slice index must be interior (1 <= at <= size-2)");
    if (!(dt > 0.0)) throw DomainError("sum_polarization: dt must be positive");
    const Grid& g = slices[at].grid;
    for (const auto& s : slices) require_same_grid(s, slices[at], "trajectory slices");

    // Spatial operator -c L_abs (1 + i Delta/gamma) d2/dz2 - i (c/2k) lap_perp in Fourier space.
    std::vector<cd> spatial = slices[at].values;
    const FftPlan plan(g);
    plan.forward(spatial);
    const cd longitudinal = longitudinal_coefficient(params, derived);
    const double transverse = constants::c / (2.0 * params.k);
    for_each_index(g, [&](std::size_t ix, std::size_t iy, std::size_t iz, std::size_t i) {
        const double kz = g.wavenumber(2, iz);
        const double kx = g.wavenumber(0, ix);
        const double ky = g.wavenumber(1, iy);
        spatial[i] *= longitudinal * (kz * kz) + I * transverse * (kx * kx + ky * ky);
    });
    plan.inverse(spatial);

    const double gN = params.g * params.N_atoms;
    ComplexField S(g);
    for (std::size_t i = 0; i < S.size(); ++i) {
        const cd time_derivative = (slices[at + 1][i] - slices[at - 1][i]) / (2.0 * dt);
        S[i] = -I / gN * (time_derivative + spatial[i]);
    }
    return S;
}

ComplexField spin_coherence_adiabatic(const ComplexField& E_S, double g, double Omega, Vec2 k_c_perp) {
    if (!(Omega > 0.0) || !std::isfinite(Omega))
        throw DomainError("spin_coherence_adiabatic: Omega must be positive");
    const Grid& grid = E_S.grid;
    ComplexField sigma(grid);
    const double scale = -g / (sqrt2 * Omega);
    for_each_index(grid, [&](std::size_t ix, std::size_t iy, std::size_t, std::size_t i) {
        sigma[i] = scale * E_S[i] * std::conj(transverse_phase(grid, k_c_perp, ix, iy));
    });
    return sigma;
}

ComplexField compose_polariton(const ComplexField& E_S, const ComplexField& sigma_gr, double theta,
                               Vec2 k_c_perp, double N_atoms) {
    require_same_grid(E_S, sigma_gr, "E_S vs sigma_gr");
    const Grid& grid = E_S.grid;
    const double c = std::cos(theta);
    const double s = std::sin(theta) * std::sqrt(N_atoms);
    ComplexField psi(grid);
    for_each_index(grid, [&](std::size_t ix, std::size_t iy, std::size_t, std::size_t i) {
        psi[i] = c * E_S[i] - s * sigma_gr[i] * transverse_phase(grid, k_c_perp, ix, iy);
    });
    return psi;
}

CoherenceSet adiabatic_coherences(std::span<const ComplexField> slices, double dt, std::size_t at,
                                  const MediumParams& params, const DerivedQuantities& derived) {
    CoherenceSet set;
    set.S = sum_polarization(slices, dt, at, params, derived);
    auto eliminated = eliminate_difference(slices[at], params, derived);
    set.D = std::move(eliminated.E_D);
    const cd factor = I * params.g / derived.Gamma;
    for (auto& v : set.D.values) v *= factor;
    set.sigma_gr = spin_coherence_adiabatic(slices[at], params.g, params.Omega, params.k_c_perp);
    return set;
}

double profile_variance(const ComplexField& field) {
    const Grid& g = field.grid;
    double weight = 0.0;
    double first = 0.0;
    double second = 0.0;
    for_each_index(g, [&](std::size_t, std::size_t, std::size_t iz, std::size_t i) {
        const double w = std::abs(field[i]);
        const double z = g.coordinate(2, iz);
        weight += w;
        first += w * z;
        second += w * z * z;
    });
    if (!(weight > 0.0)) throw NumericError("profile_variance: field vanishes identically");
    const double mean = first / weight;
    return second / weight - mean * mean;
}

double explicit_step_bound(std::complex<double> diffusion, double dz) {
    // FTCS amplification 1 - 4 r sin^2 stays in the unit disc iff |r|^2 <= Re(r)/2.
    const double mag2 = std::norm(diffusion);
    if (mag2 == 0.0) return std::numeric_limits<double>::infinity();
    if (diffusion.real() <= 0.0) return 0.0;
    return diffusion.real() * dz * dz / (2.0 * mag2);
}

LinearTrajectory simulate_linear_1d(const LinearSimConfig& config) {
    const DerivedQuantities derived = derive_eit(config.medium);
    const ComplexField& initial = config.initial;
    const Grid& g = initial.grid;
    validate_grid(g);
    if (g.dims[0] != 1 || g.dims[1] != 1) throw GridError("simulate_linear_1d expects a line grid along z");
    if (!(config.dt > 0.0)) throw DomainError("simulate_linear_1d: dt must be positive");
    if (config.snapshot_stride == 0) throw DomainError("simulate_linear_1d: snapshot_stride must be >= 1");

    LinearTrajectory traj;
    traj.diffusion = longitudinal_coefficient(config.medium, derived) * derived.cos2_theta;
    const double dz = g.spacing[2];
    const std::size_t nz = g.dims[2];

    if (config.integrator == LinearIntegrator::explicit_euler) {
        const double bound = explicit_step_bound(traj.diffusion, dz);
        if (config.dt > bound)
            throw DomainError("simulate_linear_1d: dt = " + std::to_string(config.dt) +
                              " exceeds the explicit stability bound " + std::to_string(bound));
    }

    std::vector<cd> propagator(nz);
    for (std::size_t iz = 0; iz < nz; ++iz) {
        const double kz = g.wavenumber(2, iz);
        propagator[iz] = std::exp(-traj.diffusion * kz * kz * config.dt);
    }

    auto record = [&](const std::vector<cd>& state, double t) {
        ComplexField snap(g, state);
        traj.times.push_back(t);
        traj.variances.push_back(profile_variance(snap));
        traj.norms.push_back(field_norm(snap) / (g.spacing[0] * g.spacing[1]));
        traj.snapshots.push_back(std::move(snap));
    };

    std::vector<cd> state = initial.values;
    std::vector<cd> scratch(nz);
    const FftPlan plan(g);
    const cd r = traj.diffusion * config.dt / (dz * dz);
    record(state, 0.0);
    for (std::size_t step = 1; step <= config.steps; ++step) {
        if (config.integrator == LinearIntegrator::exponential) {
            plan.forward(state);
            for (std::size_t iz = 0; iz < nz; ++iz) state[iz] *= propagator[iz];
            plan.inverse(state);
        } else {
            for (std::size_t iz = 0; iz < nz; ++iz) {
                const cd left = state[(iz + nz - 1) % nz];
                const cd right = state[(iz + 1) % nz];
                scratch[iz] = state[iz] + r * (left - 2.0 * state[iz] + right);
            }
            state.swap(scratch);
        }
        if (step % config.snapshot_stride == 0 || step == config.steps)
            record(state, static_cast<double>(step) * config.dt);
    }

    // Least-squares slope of variance against time.
    const double n = static_cast<double>(traj.times.size());
    double st = 0.0, sv = 0.0, stt = 0.0, stv = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        st += traj.times[i];
        sv += traj.variances[i];
        stt += traj.times[i] * traj.times[i];
        stv += traj.times[i] * traj.variances[i];
    }
    const double denom = n * stt - st * st;
    traj.variance_growth_rate = denom > 0.0 ? (n * stv - st * sv) / denom : 0.0;
    return traj;
}

}  // namespace slbec
