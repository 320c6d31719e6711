#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <vector>

#include "slbec/bogoliubov.hpp"
#include "slbec/dipolar_kernel.hpp"
#include "slbec/errors.hpp"
#include "slbec/fft.hpp"
#include "slbec/grid.hpp"

namespace slbec {

// Parameters of the mean-field equation
//   i hbar dphi/dt = [-hbar^2/2m_par d2/dz2 - hbar^2/2m_perp lap_perp
//                     + hbar sin^2(theta) (eps * |phi|^2)] phi.
struct SolverParams {
    double hbar = 1.0;
    double m_perp = 1.0;
    std::complex<double> m_par{1.0, 0.0};
    MassMode mass_mode = MassMode::real;
    double sin2_theta = 1.0;
    std::shared_ptr<const FourierTable> kernel;  // null switches the interaction off
    // Accuracy guard: largest potential phase |V| dt / (2 hbar) per half-step.
    double max_potential_phase = std::numbers::pi / 4.0;
};

struct CondensateState {
    ComplexField phi;  // order parameter, |phi|^2 is a density
    double t = 0.0;
};

struct Observables {
    double t = 0.0;
    double norm = 0.0;
    double kinetic_z = 0.0;
    double kinetic_perp = 0.0;
    double dipolar = 0.0;
    double energy = 0.0;
    double peak_density = 0.0;
    Vec3 center_of_mass{};
    Vec3 variance{};
    Vec3 momentum{};
};

enum class InitKind { uniform, gaussian, perturbed_plane_wave };

struct InitSpec {
    InitKind kind = InitKind::uniform;
    double n0 = 1.0;                  // uniform and perturbed kinds
    Vec3 widths{1.0, 1.0, 1.0};       // gaussian: density standard deviation per axis
    std::optional<Vec3> center;       // gaussian: defaults to the box centre
    Vec3 kick{};                      // gaussian: momentum boost exp(i kick.r)
    double delta = 1e-3;              // perturbed: relative amplitude, at most 1e-3
    Vec3 q{};                         // perturbed: reciprocal-lattice wavevector
};

CondensateState init_state(const Grid& grid, const InitSpec& spec);

struct Trajectory {
    CondensateState final_state;
    std::vector<Observables> observables;
    std::vector<CondensateState> snapshots;
};

// Thrown when the evolution produces non-finite values; carries the last
// finite state.
class EvolutionAborted : public NumericError {
public:
    EvolutionAborted(const std::string& what, CondensateState last_good, Observables last_observables)
        : NumericError(what), snapshot(std::move(last_good)), observables(last_observables) {}

    CondensateState snapshot;
    Observables observables;
};

class GpeSolver {
public:
    GpeSolver(const Grid& grid, SolverParams params);

    const Grid& grid() const { return grid_; }
    const SolverParams& params() const { return params_; }

    // One Strang step: half potential kick, exact kinetic drift, half potential
    // kick. Negative dt runs the step backwards. The state is left untouched
    // when the accuracy guard rejects dt.
    void step(CondensateState& state, double dt);

    // Runs round(t_final/dt) equal steps of size t_final/steps, sampling
    // observables every `stride` steps and at the end.
    Trajectory evolve(CondensateState state, double t_final, double dt, std::size_t stride,
                      bool keep_snapshots = false);

    Observables observe(const CondensateState& state) const;

    // Mean-field potential hbar sin^2(theta) (eps * |phi|^2) in energy units.
    std::vector<double> potential(const ComplexField& phi) const;

    // Free energy hbar^2 q_perp^2/2m_perp + hbar^2 q_z^2/2m_par of FFT bin i.
    std::complex<double> kinetic_energy(std::size_t i) const { return kinetic_energy_[i]; }

private:
    void apply_potential(std::vector<cd>& phi, const std::vector<double>& v, double dt) const;
    double potential_phase(const std::vector<double>& v, double dt) const;
    const std::vector<cd>& kinetic_propagator(double dt);

    Grid grid_;
    SolverParams params_;
    FftPlan plan_;
    std::vector<std::complex<double>> kinetic_energy_;
    std::vector<double> kinetic_perp_;
    std::vector<double> kinetic_z_;
    std::vector<cd> propagator_;
    double propagator_dt_ = 0.0;
};

// Condensate parameters whose C_dd reproduces, at wavevector q, the
// interaction the solver's kernel table actually realizes:
// C_dd (3 cos^2 beta - 1) = 2 n0 hbar sin^2(theta) table(q).
CondensateParams calibrated_condensate(const SolverParams& params, double n0, Vec3 q);

// Infinite-space coupling (8 pi / 3) n0 hbar sin^2(theta) strength.
double nominal_C_dd(const SolverParams& params, double n0);

struct ResponseConfig {
    double n0 = 1.0;
    Vec3 q{};
    double delta = 1e-4;
    double duration = 0.0;
    double dt = 0.0;
};

struct ResponseResult {
    std::complex<double> nu_measured;  // real when oscillating, i*rate when growing
    bool unstable = false;
    double residual = 0.0;              // relative L2 misfit of the fit
    CondensateParams calibrated;
    DispersionResult predicted;
    double kernel_coefficient = 0.0;
    std::vector<double> times;
    std::vector<double> amplitudes;  // cosine amplitude of the density at q
};

// Evolves sqrt(n0) (1 + delta cos q.r), records the density amplitude at +-q
// and fits either A cos(nu t) + B sin(nu t) or A cosh(g t) + B sinh(g t).
// Real masses only.
ResponseResult linear_response_experiment(const Grid& grid, const SolverParams& params,
                                          const ResponseConfig& config);

// Duration covering four periods (stable) or the e-folds that keep
// delta exp(rate t) below 5e-3 (unstable) of a predicted mode.
double suggested_response_duration(const DispersionResult& predicted, double delta);

}  // namespace slbec
