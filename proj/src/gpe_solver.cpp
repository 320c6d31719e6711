#include "slbec/gpe_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace slbec {
namespace {

constexpr double pi = std::numbers::pi;

template <typename F>
void for_each_index(const Grid& g, F&& f) {
    for (std::size_t ix = 0; ix < g.dims[0]; ++ix)
        for (std::size_t iy = 0; iy < g.dims[1]; ++iy)
            for (std::size_t iz = 0; iz < g.dims[2]; ++iz) f(ix, iy, iz, g.index(ix, iy, iz));
}

void check_on_lattice(const Grid& g, Vec3 q) {
    for (int a = 0; a < 3; ++a) {
        const double m = q[a] * g.length(a) / (2.0 * pi);
        if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, std::abs(m)))
            throw GridError("perturbation wavevector is off the reciprocal lattice (axis " + std::to_string(a) + ")");
    }
}

std::vector<double> density_of(const std::vector<cd>& phi) {
    std::vector<double> n(phi.size());
    std::transform(phi.begin(), phi.end(), n.begin(), [](cd v) { return std::norm(v); });
    return n;
}

}  // namespace

CondensateState init_state(const Grid& grid, const InitSpec& spec) {
    validate_solver_grid(grid);
    CondensateState state{ComplexField(grid), 0.0};
    auto& phi = state.phi;

    switch (spec.kind) {
    case InitKind::uniform: {
        if (!(spec.n0 > 0.0)) throw DomainError("init_state: n0 must be positive");
        std::fill(phi.values.begin(), phi.values.end(), cd(std::sqrt(spec.n0), 0.0));
        break;
    }
    case InitKind::gaussian: {
        if (!(spec.widths.x > 0.0 && spec.widths.y > 0.0 && spec.widths.z > 0.0))
            throw DomainError("init_state: gaussian widths must be positive");
        const Vec3 c = spec.center.value_or(Vec3{0.5 * grid.length(0), 0.5 * grid.length(1), 0.5 * grid.length(2)});
        for_each_index(grid, [&](std::size_t ix, std::size_t iy, std::size_t iz, std::size_t i) {
            const Vec3 r = grid.position(ix, iy, iz);
            const Vec3 d = r - c;
            const double arg = d.x * d.x / (4.0 * spec.widths.x * spec.widths.x) +
                               d.y * d.y / (4.0 * spec.widths.y * spec.widths.y) +
                               d.z * d.z / (4.0 * spec.widths.z * spec.widths.z);
            phi[i] = std::polar(std::exp(-arg), dot(spec.kick, r));
        });
        const double scale = 1.0 / std::sqrt(field_norm(phi));
        for (auto& v : phi.values) v *= scale;
        break;
    }
    case InitKind::perturbed_plane_wave: {
        if (!(spec.n0 > 0.0)) throw DomainError("init_state: n0 must be positive");
        if (!(std::abs(spec.delta) <= 1e-3)) throw DomainError("init_state: perturbation amplitude must be <= 1e-3");
        check_on_lattice(grid, spec.q);
        const double amp = std::sqrt(spec.n0);
        for_each_index(grid, [&](std::size_t ix, std::size_t iy, std::size_t iz, std::size_t i) {
            phi[i] = amp * (1.0 + spec.delta * std::cos(dot(spec.q, grid.position(ix, iy, iz))));
        });
        break;
    }
    }
    return state;
}

GpeSolver::GpeSolver(const Grid& grid, SolverParams params)
    : grid_(grid), params_(std::move(params)), plan_((validate_solver_grid(grid), grid)) {
    if (!(params_.hbar > 0.0)) throw DomainError("GpeSolver: hbar must be positive");
    if (!(params_.m_perp > 0.0)) throw DomainError("GpeSolver: m_perp must be positive");
    if (params_.mass_mode == MassMode::real) params_.m_par = {params_.m_par.real(), 0.0};
    if (params_.m_par == 0.0) throw DomainError("GpeSolver: m_par must be nonzero");
    if (!(params_.max_potential_phase > 0.0)) throw DomainError("GpeSolver: accuracy guard must be positive");
    if (params_.kernel && !(params_.kernel->grid == grid))
        throw GridError("GpeSolver: kernel table grid does not match the solver grid");

    const double h2 = params_.hbar * params_.hbar;
    kinetic_energy_.resize(grid.size());
    kinetic_perp_.resize(grid.size());
    kinetic_z_.resize(grid.size());
    for_each_index(grid, [&](std::size_t ix, std::size_t iy, std::size_t iz, std::size_t i) {
        const Vec3 q = grid.wavevector(ix, iy, iz);
        const double perp = h2 * (q.x * q.x + q.y * q.y) / (2.0 * params_.m_perp);
        const std::complex<double> along = h2 * q.z * q.z / (2.0 * params_.m_par);
        kinetic_perp_[i] = perp;
        kinetic_z_[i] = along.real();
        kinetic_energy_[i] = perp + along;
    });
}

std::vector<double> GpeSolver::potential(const ComplexField& phi) const {
    if (!(phi.grid == grid_)) throw GridError("potential: field grid does not match the solver grid");
    if (!params_.kernel) return std::vector<double>(grid_.size(), 0.0);
    std::vector<double> v = convolve(*params_.kernel, density_of(phi.values));
    const double scale = params_.hbar * params_.sin2_theta;
    for (auto& x : v) x *= scale;
    return v;
}

double GpeSolver::potential_phase(const std::vector<double>& v, double dt) const {
    double vmax = 0.0;
    for (double x : v) vmax = std::max(vmax, std::abs(x));
    return vmax * std::abs(dt) / (2.0 * params_.hbar);
}

void GpeSolver::apply_potential(std::vector<cd>& phi, const std::vector<double>& v, double dt) const {
    const double scale = -0.5 * dt / params_.hbar;
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] *= std::polar(1.0, scale * v[i]);
}

const std::vector<cd>& GpeSolver::kinetic_propagator(double dt) {
    if (propagator_.empty() || propagator_dt_ != dt) {
        propagator_.resize(grid_.size());
        const cd factor(0.0, -dt / params_.hbar);
        for (std::size_t i = 0; i < propagator_.size(); ++i) propagator_[i] = std::exp(factor * kinetic_energy_[i]);
        propagator_dt_ = dt;
    }
    return propagator_;
}

void GpeSolver::step(CondensateState& state, double dt) {
    if (!(state.phi.grid == grid_)) throw GridError("step: state grid does not match the solver grid");
    if (dt == 0.0 || !std::isfinite(dt)) throw DomainError("step: dt must be finite and nonzero");

    std::vector<cd> phi = state.phi.values;
    const bool interacting = static_cast<bool>(params_.kernel);
    if (interacting) {
        const auto v = potential(state.phi);
        if (potential_phase(v, dt) > params_.max_potential_phase)
            throw DomainError("step: dt exceeds the accuracy guard (potential phase per half-step > " +
                              std::to_string(params_.max_potential_phase) + ")");
        apply_potential(phi, v, dt);
    }

    const auto& propagator = kinetic_propagator(dt);
    plan_.forward(phi);
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] *= propagator[i];
    plan_.inverse(phi);

    if (interacting) {
        ComplexField mid(grid_, phi);
        const auto v = potential(mid);
        if (potential_phase(v, dt) > params_.max_potential_phase)
            throw DomainError("step: dt exceeds the accuracy guard (potential phase per half-step > " +
                              std::to_string(params_.max_potential_phase) + ")");
        phi = std::move(mid.values);
        apply_potential(phi, v, dt);
    }

    state.phi.values = std::move(phi);
    state.t += dt;
}

Observables GpeSolver::observe(const CondensateState& state) const {
    if (!(state.phi.grid == grid_)) throw GridError("observe: state grid does not match the solver grid");
    Observables obs;
    obs.t = state.t;
    const double dv = grid_.cell_volume();
    const auto n = density_of(state.phi.values);

    Vec3 first{}, second{};
    for_each_index(grid_, [&](std::size_t ix, std::size_t iy, std::size_t iz, std::size_t i) {
        const Vec3 r = grid_.position(ix, iy, iz);
        obs.norm += n[i];
        obs.peak_density = std::max(obs.peak_density, n[i]);
        first = first + n[i] * r;
        second = second + n[i] * Vec3{r.x * r.x, r.y * r.y, r.z * r.z};
    });
    const double weight = obs.norm;
    obs.norm *= dv;
    if (weight > 0.0) {
        obs.center_of_mass = first / weight;
        const Vec3 m2 = second / weight;
        const Vec3 c = obs.center_of_mass;
        obs.variance = {m2.x - c.x * c.x, m2.y - c.y * c.y, m2.z - c.z * c.z};
    }

    std::vector<cd> spectrum = state.phi.values;
    plan_.forward(spectrum);
    const double parseval = dv / static_cast<double>(grid_.size());
    for_each_index(grid_, [&](std::size_t ix, std::size_t iy, std::size_t iz, std::size_t i) {
        const double p = std::norm(spectrum[i]) * parseval;
        obs.kinetic_perp += kinetic_perp_[i] * p;
        obs.kinetic_z += kinetic_z_[i] * p;
        obs.momentum = obs.momentum + params_.hbar * p * grid_.wavevector(ix, iy, iz);
    });

    if (params_.kernel) {
        const auto v = potential(state.phi);
        for (std::size_t i = 0; i < n.size(); ++i) obs.dipolar += 0.5 * v[i] * n[i];
        obs.dipolar *= dv;
    }
    obs.energy = obs.kinetic_perp + obs.kinetic_z + obs.dipolar;
    return obs;
}

Trajectory GpeSolver::evolve(CondensateState state, double t_final, double dt, std::size_t stride,
                             bool keep_snapshots) {
    if (!(t_final >= 0.0) || !(dt > 0.0)) throw DomainError("evolve: need t_final >= 0 and dt > 0");
    if (stride == 0) throw DomainError("evolve: observer stride must be >= 1");
    const auto steps = static_cast<std::size_t>(std::llround(t_final / dt));
    const double h = steps > 0 ? t_final / static_cast<double>(steps) : dt;

    Trajectory traj;
    traj.observables.push_back(observe(state));
    if (keep_snapshots) traj.snapshots.push_back(state);
    for (std::size_t s = 1; s <= steps; ++s) {
        CondensateState previous = state;
        step(state, h);
        const bool finite = std::all_of(state.phi.values.begin(), state.phi.values.end(),
                                        [](const cd& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
        if (!finite)
            throw EvolutionAborted("evolve: non-finite values at step " + std::to_string(s) + " (t = " +
                                       std::to_string(state.t) + ")",
                                   std::move(previous), traj.observables.back());
        if (s % stride == 0 || s == steps) {
            traj.observables.push_back(observe(state));
            if (keep_snapshots) traj.snapshots.push_back(state);
        }
    }
    traj.final_state = std::move(state);
    return traj;
}

double nominal_C_dd(const SolverParams& params, double n0) {
    if (!params.kernel) return 0.0;
    return (8.0 * pi / 3.0) * n0 * params.hbar * params.sin2_theta * params.kernel->spec.strength;
}

CondensateParams calibrated_condensate(const SolverParams& params, double n0, Vec3 q) {
    CondensateParams p;
    p.m_perp = params.m_perp;
    p.m_par = params.m_par;
    p.mass_mode = params.mass_mode;
    p.hbar = params.hbar;
    p.n_dsp = n0;
    if (!params.kernel) return p;
    p.orientation = params.kernel->spec.orientation;
    const double f = angular_factor(p.orientation, q);
    const double coefficient = table_coefficient(*params.kernel, q);
    p.C_dd = std::abs(f) > 1e-12 ? 2.0 * n0 * params.hbar * params.sin2_theta * coefficient / f
                                 : nominal_C_dd(params, n0);
    return p;
}

namespace {

struct FitOutcome {
    double rate = 0.0;
    double residual = std::numeric_limits<double>::infinity();
};

// Least-squares fit of s(t) by A b1(rate t) + B b2(rate t); returns the relative residual.
template <typename Basis>
double fit_residual(const std::vector<double>& t, const std::vector<double>& s, double rate, Basis basis) {
    double a11 = 0, a12 = 0, a22 = 0, r1 = 0, r2 = 0, ss = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const auto [b1, b2] = basis(rate * t[k]);
        a11 += b1 * b1;
        a12 += b1 * b2;
        a22 += b2 * b2;
        r1 += b1 * s[k];
        r2 += b2 * s[k];
        ss += s[k] * s[k];
    }
    const double det = a11 * a22 - a12 * a12;
    if (!(std::abs(det) > 1e-300) || ss == 0.0) return std::numeric_limits<double>::infinity();
    const double A = (r1 * a22 - r2 * a12) / det;
    const double B = (r2 * a11 - r1 * a12) / det;
    double misfit = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const auto [b1, b2] = basis(rate * t[k]);
        const double e = s[k] - A * b1 - B * b2;
        misfit += e * e;
    }
    return std::sqrt(misfit / ss);
}

template <typename Basis>
FitOutcome scan_fit(const std::vector<double>& t, const std::vector<double>& s, double rate_max, Basis basis) {
    constexpr int samples = 3000;
    FitOutcome best;
    int best_k = 0;
    for (int k = 1; k <= samples; ++k) {
        const double rate = rate_max * k / samples;
        const double r = fit_residual(t, s, rate, basis);
        if (r < best.residual) {
            best = {rate, r};
            best_k = k;
        }
    }
    // Golden-section refinement inside the neighbouring samples.
    double lo = rate_max * std::max(best_k - 1, 0) / samples;
    double hi = rate_max * std::min(best_k + 1, samples) / samples;
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - golden * (hi - lo);
    double x2 = lo + golden * (hi - lo);
    double f1 = fit_residual(t, s, x1, basis);
    double f2 = fit_residual(t, s, x2, basis);
    while (hi - lo > 1e-13 * hi) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = fit_residual(t, s, x1, basis);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = fit_residual(t, s, x2, basis);
        }
    }
    const double rate = 0.5 * (lo + hi);
    const double r = fit_residual(t, s, rate, basis);
    if (r < best.residual) best = {rate, r};
    return best;
}

}  // namespace

double suggested_response_duration(const DispersionResult& predicted, double delta) {
    if (predicted.stable) {
        const double omega = std::abs(predicted.nu.real());
        if (omega == 0.0) throw DomainError("suggested_response_duration: zero-frequency mode");
        return 4.0 * 2.0 * pi / omega;
    }
    return std::log(5e-3 / std::abs(delta)) / predicted.growth_rate;
}

ResponseResult linear_response_experiment(const Grid& grid, const SolverParams& params,
                                          const ResponseConfig& config) {
    if (params.mass_mode != MassMode::real)
        throw DomainError("linear_response_experiment: only real masses are supported");
    if (!(std::abs(config.delta) <= 1e-3) || config.delta == 0.0)
        throw DomainError("linear_response_experiment: need 0 < |delta| <= 1e-3");
    if (!(config.duration > 0.0) || !(config.dt > 0.0))
        throw DomainError("linear_response_experiment: duration and dt must be positive");
    const double q_norm = norm(config.q);
    if (q_norm == 0.0) throw DomainError("linear_response_experiment: q must be nonzero");
    const double shortest_edge = std::min({grid.length(0), grid.length(1), grid.length(2)});
    if (2.0 * pi / q_norm > shortest_edge / 4.0)
        throw DomainError("linear_response_experiment: box must exceed 4 perturbation wavelengths");

    InitSpec init;
    init.kind = InitKind::perturbed_plane_wave;
    init.n0 = config.n0;
    init.delta = config.delta;
    init.q = config.q;
    CondensateState state = init_state(grid, init);
    GpeSolver solver(grid, params);

    ResponseResult result;
    result.calibrated = calibrated_condensate(params, config.n0, config.q);
    result.predicted = dispersion(config.q, result.calibrated);
    if (params.kernel) result.kernel_coefficient = table_coefficient(*params.kernel, config.q);

    std::vector<double> cosines(grid.size());
    for_each_index(grid, [&](std::size_t ix, std::size_t iy, std::size_t iz, std::size_t i) {
        cosines[i] = std::cos(dot(config.q, grid.position(ix, iy, iz)));
    });
    auto amplitude = [&](const CondensateState& s) {
        double sum = 0.0;
        for (std::size_t i = 0; i < cosines.size(); ++i) sum += std::norm(s.phi[i]) * cosines[i];
        return 2.0 * sum / static_cast<double>(grid.size());
    };

    const auto steps = static_cast<std::size_t>(std::llround(config.duration / config.dt));
    if (steps < 8) throw DomainError("linear_response_experiment: fewer than 8 time steps");
    const double h = config.duration / static_cast<double>(steps);
    result.times.push_back(0.0);
    result.amplitudes.push_back(amplitude(state));
    for (std::size_t k = 1; k <= steps; ++k) {
        solver.step(state, h);
        result.times.push_back(state.t);
        result.amplitudes.push_back(amplitude(state));
    }

    double peak = 0.0;
    for (double a : result.amplitudes) peak = std::max(peak, std::abs(a));
    if (!std::isfinite(peak)) throw NumericError("linear_response_experiment: non-finite response");
    if (peak / config.n0 > 2e-2)
        throw NumericError("linear_response_experiment: perturbation left the linear regime");

    const double nyquist = pi / h;
    const FitOutcome oscillating = scan_fit(result.times, result.amplitudes, nyquist,
                                            [](double x) { return std::pair{std::cos(x), std::sin(x)}; });
    const FitOutcome growing = scan_fit(result.times, result.amplitudes, 20.0 / config.duration,
                                        [](double x) { return std::pair{std::cosh(x), std::sinh(x)}; });
    result.unstable = growing.residual < oscillating.residual;
    const FitOutcome& best = result.unstable ? growing : oscillating;
    result.residual = best.residual;
    result.nu_measured = result.unstable ? std::complex<double>(0.0, best.rate) : std::complex<double>(best.rate, 0.0);
    if (!(result.residual <= 0.1))
        throw NumericError("linear_response_experiment: fit residual " + std::to_string(result.residual) +
                           " exceeds 10% of the signal");
    return result;
}

}  // namespace slbec
