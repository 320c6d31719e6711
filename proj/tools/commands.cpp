#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "slbec/bogoliubov.hpp"
#include "slbec/dipolar_kernel.hpp"
#include "slbec/eit_parameters.hpp"
#include "slbec/errors.hpp"
#include "slbec/fft.hpp"
#include "slbec/gpe_solver.hpp"
#include "slbec/polariton_fields.hpp"

#ifndef SLBEC_VERSION
#define SLBEC_VERSION "dev"
#endif

namespace slbec::cli {
namespace {

constexpr double pi = std::numbers::pi;

using Row = std::vector<Cell>;

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

const char* kMediumKeys[] = {"medium.g", "medium.N_atoms", "medium.V_t", "medium.gamma", "medium.Omega", "medium.k"};

void require_medium(const SimConfig& c, std::string_view command) {
    require_keys(c, {kMediumKeys[0], kMediumKeys[1], kMediumKeys[2], kMediumKeys[3], kMediumKeys[4], kMediumKeys[5]},
                 command);
}

// SI <-> polariton-unit conversion for the solver-backed commands.
struct Scaled {
    DerivedQuantities derived;
    Units units;
};

Scaled scaled(const Context& ctx) {
    require_medium(ctx.config, ctx.command);
    Scaled s;
    s.derived = derive_eit(ctx.config.medium);
    s.units = Units::polariton(ctx.config.medium, s.derived);
    return s;
}

Grid to_units(const Grid& g, const Units& u) {
    Grid out = g;
    for (int a = 0; a < 3; ++a) out.spacing[a] = g.spacing[a] / u.length;
    return out;
}

KernelSpec to_units(const KernelSpec& k, const Units& u) {
    KernelSpec out = k;
    out.strength = k.strength / u.kernel_strength();
    if (k.cutoff_radius) out.cutoff_radius = *k.cutoff_radius / u.length;
    if (k.sphere_radius) out.sphere_radius = *k.sphere_radius / u.length;
    return out;
}

// Condensate in polariton units: hbar = m_perp = 1, m_par = alpha.
CondensateParams condensate(const Context& ctx, const Scaled& s) {
    const SimConfig& c = ctx.config;
    CondensateParams p;
    p.hbar = 1.0;
    p.m_perp = 1.0;
    p.m_par = s.derived.alpha;
    p.mass_mode = ctx.real_mass() ? MassMode::real : MassMode::complex;
    p.orientation = c.kernel.orientation;
    p.n_dsp = c.n_dsp * std::pow(s.units.length, 3);
    if (c.C_dd) {
        p.C_dd = *c.C_dd / s.units.energy();
    } else {
        require_keys(c, {"condensate.n_dsp"}, ctx.command);
        const double strength = c.kernel.strength / s.units.kernel_strength();
        p.C_dd = (8.0 * pi / 3.0) * p.n_dsp * s.derived.sin2_theta * strength;
    }
    return p;
}

std::vector<double> magnitudes(const SimConfig& c, std::string_view command, const Units& u) {
    require_keys(c, {"run.q_min", "run.q_max"}, command);
    std::vector<double> q(c.run.n_q);
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double f = q.size() == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(q.size() - 1);
        q[i] = (c.run.q_min + f * (c.run.q_max - c.run.q_min)) * u.length;
    }
    return q;
}

void require_real_masses(const Context& ctx) {
    if (!ctx.real_mass()) {
        throw ConfigError(0, "command '" + ctx.command + "' supports the real-mass approximation only");
    }
}

Vec3 lattice_wavevector(const Grid& g, const LatticeIndex& idx) {
    Vec3 q;
    for (int a = 0; a < 3; ++a) q[a] = 2.0 * pi * static_cast<double>(idx[a]) / g.length(a);
    return q;
}

Row dispersion_row(std::int64_t direction, Vec3 d, double q_si, const DispersionResult& r, double freq) {
    return {direction, d.x, d.y, d.z, q_si, r.nu.real() * freq, r.nu.imag() * freq,
            static_cast<std::int64_t>(r.stable ? 1 : 0), r.growth_rate * freq};
}

const std::vector<std::string> kDispersionColumns{"direction", "dir_x", "dir_y", "dir_z", "q",
                                                  "nu_re",     "nu_im", "stable", "growth_rate"};

struct Check {
    std::string name;
    double error = 0.0;
    double tolerance = 0.0;
    bool pass() const { return error <= tolerance; }
};

double max_relative(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(b[i]));
    }
    return den > 0.0 ? num / den : num;
}

Check check_convolution() {
    Grid g;
    g.dims = {8, 8, 8};
    KernelSpec spec;
    spec.orientation = normalized(Vec3{0.3, 0.4, 1.0});
    spec.strength = 1.0;
    const FourierTable table = kernel_table_fourier(g, spec, TableMethod::lattice);
    std::vector<double> n(g.size());
    for (std::size_t i = 0; i < g.dims[0]; ++i)
        for (std::size_t j = 0; j < g.dims[1]; ++j)
            for (std::size_t k = 0; k < g.dims[2]; ++k) {
                const Vec3 r = g.position(i, j, k);
                n[g.index(i, j, k)] = 1.0 + 0.3 * std::cos(2 * pi * r.x / 8) * std::sin(4 * pi * r.z / 8) +
                                      std::exp(-0.5 * dot(r - Vec3{4, 3, 5}, r - Vec3{4, 3, 5}));
            }
    const auto fft = convolve(table, n);
    const auto direct =
        oracle::direct_dipolar_sum(g, n, spec.orientation, spec.strength, table.inner_radius, table.outer_radius);
    return {"kernel_convolution_vs_direct_sum", max_relative(fft, direct), 1e-10};
}

Check check_transform() {
    KernelSpec spec;
    spec.orientation = normalized(Vec3{0.2, -0.5, 1.0});
    spec.strength = 1.0;
    double worst = 0.0;
    for (const Vec3 q : {Vec3{0.7, 0.2, 0.9}, Vec3{0.0, 1.3, 0.1}, Vec3{0.1, 0.1, 2.0}}) {
        const double lib = kernel_fourier_truncated(q, spec, 1.0, 6.0);
        const double ref = oracle::kernel_fourier_quadrature(q, spec.orientation, spec.strength, 1.0, 6.0);
        worst = std::max(worst, std::abs(lib - ref) / std::abs(ref));
    }
    return {"kernel_transform_vs_quadrature", worst, 1e-8};
}

Check check_free_spreading() {
    Grid g;
    g.dims = {8, 8, 128};
    g.spacing = {1.0, 1.0, 0.5};
    SolverParams sp;
    sp.m_par = 0.5;
    GpeSolver solver(g, sp);
    InitSpec init;
    init.kind = InitKind::gaussian;
    init.widths = {1.5, 1.5, 2.0};
    const double t = 4.0;
    const auto traj = solver.evolve(init_state(g, init), t, 0.05, 1000);
    const double got = traj.observables.back().variance.z;
    const double want = oracle::free_gaussian_variance(4.0, 1.0, 0.5, t);
    return {"free_gaussian_spreading", std::abs(got - want) / want, 1e-8};
}

Check check_diffusion() {
    MediumParams m;
    m.g = 1e7;
    m.N_atoms = 1e6;
    m.V_t = 1e-12;
    m.gamma = 1e7;
    m.Omega = 5e7;
    m.k = 8e6;
    const auto d = derive_eit(m);
    const double D = constants::c * d.L_abs * d.cos2_theta;
    const double sigma0 = 20.0 * d.L_abs;
    const Grid g = line_grid(512, sigma0 / 8.0);
    LinearSimConfig cfg;
    cfg.medium = m;
    cfg.initial = ComplexField(g);
    const double zc = g.length(2) / 2.0;
    for (std::size_t i = 0; i < g.dims[2]; ++i) {
        const double z = g.coordinate(2, i) - zc;
        cfg.initial.values[i] = std::exp(-z * z / (2.0 * sigma0 * sigma0));
    }
    const double t = sigma0 * sigma0 / D;
    cfg.steps = 20;
    cfg.dt = t / 20.0;
    cfg.snapshot_stride = 20;
    const auto traj = simulate_linear_1d(cfg);
    const double want = oracle::diffusion_variance(sigma0 * sigma0, D, t);
    return {"diffusion_variance", std::abs(traj.variances.back() - want) / want, 1e-6};
}

Check check_dispersion() {
    double worst = 0.0;
    for (const double C : {-2.0, -0.3, 0.4, 1.7}) {
        CondensateParams p;
        p.hbar = 1.0;
        p.m_perp = 1.0;
        p.m_par = 0.6;
        p.C_dd = C;
        for (const Vec3 q : {Vec3{0.3, 0.1, 0.8}, Vec3{1.2, 0.0, 0.1}, Vec3{0.0, 0.7, 0.0}, Vec3{0.2, 0.2, 0.2}}) {
            const double f = 3.0 * q.z * q.z / dot(q, q) - 1.0;
            // C_dd f = 2 n0 sin2 V(q) with n0 = sin2 = 1
            const auto ref = oracle::bogoliubov_frequency(q, 1.0, 1.0, 0.6, 1.0, 1.0, 0.5 * C * f);
            const auto got = dispersion(q, p).nu;
            worst = std::max(worst, std::abs(got - ref) / std::abs(ref));
        }
    }
    return {"bogoliubov_vs_direct_formula", worst, 1e-12};
}

Check check_magic_angle() {
    const Vec3 q = Vec3{std::sqrt(2.0), 0.0, 1.0} * 0.7;  // 3 cos^2 = 1 about z
    double worst = 0.0;
    for (double C = 1e-3; C <= 1e3 * 1.0001; C *= 10.0) {
        CondensateParams p;
        p.hbar = 1.0;
        p.m_par = 0.4;
        p.C_dd = C;
        const double free = free_energy(q, p).real();
        worst = std::max(worst, std::abs(dispersion(q, p).nu - free) / free);
    }
    return {"magic_angle_identity", worst, 1e-12};
}

}  // namespace

std::vector<std::string> Context::provenance() const {
    std::vector<std::string> lines{
        std::string("slbec ") + SLBEC_VERSION,
        "command: " + command,
        "config_hash: fnv1a64:" + hex64(config.hash),
        std::string("mass_mode: ") + (real_mass() ? "real" : "complex"),
        "units: SI (rad/s for angular frequencies)",
    };
    for (const auto& e : config.effective) lines.push_back(e);
    return lines;
}

void Context::write(Table table, const std::string& filename) const {
    auto lines = provenance();
    lines.insert(lines.end(), table.comments.begin(), table.comments.end());
    table.comments = std::move(lines);
    const auto path = out_dir / filename;
    write_table(table, path);
    if (log) *log << "wrote " << path.string() << " (" << table.rows.size() << " rows)\n";
}

std::vector<std::string> command_names() {
    return {"derive", "kernel", "dispersion", "stability-map", "evolve", "respond", "validate", "selftest"};
}

void cmd_derive(const Context& ctx) {
    const Scaled s = scaled(ctx);
    const auto& d = s.derived;
    Table t;
    t.columns = {"quantity", "value", "unit"};
    auto add = [&](const char* name, double v, const char* unit) { t.rows.push_back({name, v, unit}); };
    add("L_abs", d.L_abs, "m");
    add("theta", d.theta, "rad");
    add("cos2_theta", d.cos2_theta, "1");
    add("sin2_theta", d.sin2_theta, "1");
    add("v_gr", d.v_gr, "m/s");
    add("m_perp", d.m_perp, "kg");
    add("alpha_re", d.alpha.real(), "1");
    add("alpha_im", d.alpha.imag(), "1");
    add("m_par_re", d.m_par.real(), "kg");
    add("m_par_im", d.m_par.imag(), "kg");
    add("Gamma_re", d.Gamma.real(), "rad/s");
    add("Gamma_im", d.Gamma.imag(), "rad/s");
    add("kernel_strength", ctx.config.kernel.strength, "rad*m^3/s");
    add("unit_length", s.units.length, "m");
    add("unit_time", s.units.time, "s");
    add("unit_energy", s.units.energy(), "J");
    t.rows.push_back({"real_mass_suggested", static_cast<std::int64_t>(real_mass_suggested(ctx.config.medium)), "1"});
    ctx.write(t, "derive.csv");
}

void cmd_kernel(const Context& ctx) {
    const SimConfig& c = ctx.config;
    require_keys(c, {"grid.dims", "grid.spacing"}, ctx.command);
    validate_grid(c.grid);
    const Grid& g = c.grid;
    const FourierTable table = kernel_table_fourier(g, c.kernel, c.kernel_method);
    KernelSpec point = c.kernel;
    point.cutoff_radius = table.inner_radius;

    Table real, fourier;
    real.columns = {"ix", "iy", "iz", "x", "y", "z", "eps"};
    fourier.columns = {"ix", "iy", "iz", "qx", "qy", "qz", "coefficient", "infinite_space"};
    const std::string radii = "inner_radius = " + format_double(table.inner_radius) +
                              " m, outer_radius = " + format_double(table.outer_radius) + " m";
    real.comments = {radii};
    fourier.comments = {radii};
    for (std::size_t i = 0; i < g.dims[0]; ++i)
        for (std::size_t j = 0; j < g.dims[1]; ++j)
            for (std::size_t k = 0; k < g.dims[2]; ++k) {
                const Vec3 r{g.displacement(0, i), g.displacement(1, j), g.displacement(2, k)};
                const double rn = norm(r);
                const double eps = rn > table.outer_radius ? 0.0 : kernel_value(r, point);
                const Vec3 q = g.wavevector(i, j, k);
                const auto ii = static_cast<std::int64_t>(i), jj = static_cast<std::int64_t>(j),
                           kk = static_cast<std::int64_t>(k);
                real.rows.push_back({ii, jj, kk, r.x, r.y, r.z, eps});
                fourier.rows.push_back(
                    {ii, jj, kk, q.x, q.y, q.z, table.at(i, j, k), kernel_fourier_analytic(q, c.kernel)});
            }
    ctx.write(real, "kernel_real.csv");
    ctx.write(fourier, "kernel_fourier.csv");
    write_fourier_table(table, ctx.out_dir / "kernel_table.bin");
    if (ctx.log) *ctx.log << "wrote " << (ctx.out_dir / "kernel_table.bin").string() << "\n";
}

void cmd_dispersion(const Context& ctx) {
    const Scaled s = scaled(ctx);
    const CondensateParams p = condensate(ctx, s);
    validate(p);
    std::vector<Vec3> dirs = ctx.config.run.directions;
    if (dirs.empty()) dirs = {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}};
    const auto qs = magnitudes(ctx.config, ctx.command, s.units);

    Table t, crit;
    t.columns = kDispersionColumns;
    crit.columns = {"direction", "dir_x", "dir_y", "dir_z", "critical_q"};
    t.comments = {"C_dd = " + format_double(p.C_dd * s.units.energy()) + " J"};
    const double freq = s.units.frequency();
    for (std::size_t d = 0; d < dirs.size(); ++d) {
        const Vec3 u = normalized(dirs[d]);
        const auto id = static_cast<std::int64_t>(d);
        for (double q : qs) t.rows.push_back(dispersion_row(id, u, q / s.units.length, dispersion(q * u, p), freq));
        const auto qc = critical_wavenumber(u, p);
        crit.rows.push_back({id, u.x, u.y, u.z, qc ? Cell(*qc / s.units.length) : Cell(std::string("none"))});
    }
    ctx.write(t, "dispersion.csv");
    ctx.write(crit, "critical.csv");
}

void cmd_stability_map(const Context& ctx) {
    const Scaled s = scaled(ctx);
    const CondensateParams p = condensate(ctx, s);
    const auto dirs = spherical_directions(ctx.config.run.n_theta, ctx.config.run.n_phi);
    const auto qs = magnitudes(ctx.config, ctx.command, s.units);
    const StabilityMap map = stability_map(p, dirs, qs);

    const double freq = s.units.frequency();
    Table t;
    t.columns = kDispersionColumns;
    std::size_t unstable = 0;
    for (std::size_t d = 0; d < dirs.size(); ++d)
        for (std::size_t m = 0; m < qs.size(); ++m) {
            const auto& r = map.at(d, m);
            unstable += r.stable ? 0 : 1;
            t.rows.push_back(dispersion_row(static_cast<std::int64_t>(d), dirs[d], qs[m] / s.units.length, r, freq));
        }
    const Vec3 a = map.argmax_direction;
    t.comments = {
        "C_dd = " + format_double(p.C_dd * s.units.energy()) + " J",
        "unstable_entries = " + std::to_string(unstable) + " of " + std::to_string(map.entries.size()),
        "max_growth_rate = " + format_double(map.max_growth_rate * freq) + " rad/s at direction (" +
            format_double(a.x) + ", " + format_double(a.y) + ", " + format_double(a.z) +
            "), q = " + format_double(map.argmax_magnitude / s.units.length) + " 1/m",
    };
    ctx.write(t, "stability_map.csv");
    if (ctx.log) {
        *ctx.log << "unstable entries: " << unstable << " of " << map.entries.size()
                 << ", max growth rate " << format_double(map.max_growth_rate * freq) << " rad/s\n";
    }
}

namespace {

SolverParams solver_params(const Context& ctx, const Scaled& s, const Grid& grid_nd) {
    SolverParams sp;
    sp.hbar = 1.0;
    sp.m_perp = 1.0;
    sp.m_par = s.derived.alpha;
    sp.mass_mode = ctx.real_mass() ? MassMode::real : MassMode::complex;
    sp.sin2_theta = s.derived.sin2_theta;
    const KernelSpec k = to_units(ctx.config.kernel, s.units);
    if (k.strength != 0.0) {
        sp.kernel = std::make_shared<const FourierTable>(kernel_table_fourier(grid_nd, k, ctx.config.kernel_method));
    }
    return sp;
}

}  // namespace

void cmd_evolve(const Context& ctx) {
    const SimConfig& c = ctx.config;
    require_keys(c, {"grid.dims", "grid.spacing", "run.dt", "run.t_final"}, ctx.command);
    const Scaled s = scaled(ctx);
    const Units& u = s.units;
    const Grid grid = to_units(c.grid, u);
    validate_solver_grid(grid);

    InitSpec init;
    init.kind = c.run.init;
    init.kick = c.run.kick * u.length;
    init.delta = c.run.delta;
    switch (init.kind) {
        case InitKind::gaussian:
            require_keys(c, {"run.width"}, ctx.command);
            init.widths = c.run.width / u.length;
            break;
        case InitKind::uniform:
            require_keys(c, {"run.n0"}, ctx.command);
            init.n0 = c.run.n0 * std::pow(u.length, 3);
            break;
        case InitKind::perturbed_plane_wave:
            require_keys(c, {"run.n0", "run.q_index"}, ctx.command);
            init.n0 = c.run.n0 * std::pow(u.length, 3);
            init.q = lattice_wavevector(grid, c.run.q_index);
            break;
    }

    GpeSolver solver(grid, solver_params(ctx, s, grid));
    const double dt = c.run.dt / u.time;
    const double t_final = c.run.t_final / u.time;

    const double len = u.length, energy = u.energy(), momentum = u.hbar / u.length;
    Table t;
    t.columns = {"t",     "norm",  "kinetic_z", "kinetic_perp", "dipolar", "energy", "peak_density",
                 "com_x", "com_y", "com_z",     "var_x",        "var_y",   "var_z",  "p_x",
                 "p_y",   "p_z"};
    auto emit = [&](const Observables& o) {
        t.rows.push_back({o.t * u.time, o.norm, o.kinetic_z * energy, o.kinetic_perp * energy,
                          o.dipolar * energy, o.energy * energy, o.peak_density / std::pow(len, 3),
                          o.center_of_mass.x * len, o.center_of_mass.y * len, o.center_of_mass.z * len,
                          o.variance.x * len * len, o.variance.y * len * len, o.variance.z * len * len,
                          o.momentum.x * momentum, o.momentum.y * momentum, o.momentum.z * momentum});
    };
    auto to_si = [&](CondensateState st) {
        st.phi.grid = c.grid;
        const double scale = std::pow(len, -1.5);
        for (auto& v : st.phi.values) v *= scale;
        st.t *= u.time;
        return st;
    };

    try {
        const Trajectory traj = solver.evolve(init_state(grid, init), t_final, dt, c.run.stride);
        for (const auto& o : traj.observables) emit(o);
        ctx.write(t, "observables.csv");
        if (c.run.write_snapshot) write_field(to_si(traj.final_state), ctx.out_dir / "final_state.field");
    } catch (const EvolutionAborted& e) {
        t.comments = {std::string("aborted: ") + e.what()};
        emit(e.observables);
        ctx.write(t, "observables.csv");
        write_field(to_si(e.snapshot), ctx.out_dir / "last_good_state.field");
        throw;
    }
}

void cmd_respond(const Context& ctx) {
    const SimConfig& c = ctx.config;
    require_keys(c, {"grid.dims", "grid.spacing", "run.n0"}, ctx.command);
    require_real_masses(ctx);
    const Scaled s = scaled(ctx);
    const Units& u = s.units;
    const Grid grid = to_units(c.grid, u);
    validate_solver_grid(grid);
    std::vector<LatticeIndex> indices = c.run.q_indices;
    if (c.has("run.q_index")) indices.push_back(c.run.q_index);
    if (indices.empty()) throw ConfigError(0, "command 'respond' requires run.q_indices or run.q_index");

    const SolverParams sp = solver_params(ctx, s, grid);
    const double n0 = c.run.n0 * std::pow(u.length, 3);
    const double freq = u.frequency();

    Table summary;
    summary.columns = {"ix",        "iy",        "iz",       "qx",        "qy",          "qz",
                       "nu_pred_re", "nu_pred_im", "nu_meas_re", "nu_meas_im", "rel_error", "unstable",
                       "residual",  "C_dd_calibrated", "C_dd_nominal", "kernel_coefficient"};
    for (std::size_t n = 0; n < indices.size(); ++n) {
        const auto& idx = indices[n];
        ResponseConfig rc;
        rc.n0 = n0;
        rc.q = lattice_wavevector(grid, idx);
        rc.delta = c.run.response_delta;
        const DispersionResult predicted = dispersion(rc.q, calibrated_condensate(sp, n0, rc.q));
        rc.duration = c.run.duration ? *c.run.duration / u.time : suggested_response_duration(predicted, rc.delta);
        rc.dt = c.has("run.dt") ? c.run.dt / u.time : std::min(rc.duration / 400.0, 0.05 / std::abs(predicted.nu));
        const ResponseResult r = linear_response_experiment(grid, sp, rc);

        const double rel = std::abs(r.nu_measured - r.predicted.nu) / std::abs(r.predicted.nu);
        summary.rows.push_back({idx[0], idx[1], idx[2], rc.q.x / u.length, rc.q.y / u.length, rc.q.z / u.length,
                                r.predicted.nu.real() * freq, r.predicted.nu.imag() * freq,
                                r.nu_measured.real() * freq, r.nu_measured.imag() * freq, rel,
                                static_cast<std::int64_t>(r.unstable ? 1 : 0), r.residual,
                                r.calibrated.C_dd * u.energy(), nominal_C_dd(sp, n0) * u.energy(),
                                r.kernel_coefficient * u.kernel_strength()});
        Table series;
        series.columns = {"t", "amplitude"};
        for (std::size_t i = 0; i < r.times.size(); ++i) series.rows.push_back({r.times[i] * u.time, r.amplitudes[i]});
        series.comments = {"q_index = " + std::to_string(idx[0]) + " " + std::to_string(idx[1]) + " " +
                           std::to_string(idx[2])};
        ctx.write(series, "response_" + std::to_string(n) + ".csv");
    }
    ctx.write(summary, "response.csv");
}

void cmd_validate(const Context& ctx) {
    const SimConfig& c = ctx.config;
    require_keys(c, {"pulse.T", "pulse.L_pulse"}, ctx.command);
    const Scaled s = scaled(ctx);
    const MarginReport report = adiabaticity_margins(c.medium, s.derived, c.pulse, c.margin);
    const WaveVectors w = c.phase ? *c.phase : phase_matched_wavevectors(c.medium.k, c.medium.k_c_perp);
    const Vec3 dk = phase_mismatch(w.k_plus, w.k_minus, w.k_c_plus, w.k_c_minus);

    Table t;
    t.columns = {"check", "value", "threshold", "pass"};
    for (const Margin* m : report.all()) {
        t.rows.push_back({m->name, m->ratio, report.threshold, static_cast<std::int64_t>(m->pass ? 1 : 0)});
    }
    const double dk_rel = norm(dk) / c.medium.k;
    t.rows.push_back({"phase_mismatch_x", dk.x, 0.0, static_cast<std::int64_t>(dk_rel <= 1e-12 ? 1 : 0)});
    t.rows.push_back({"phase_mismatch_y", dk.y, 0.0, static_cast<std::int64_t>(dk_rel <= 1e-12 ? 1 : 0)});
    t.rows.push_back({"phase_mismatch_z", dk.z, 0.0, static_cast<std::int64_t>(dk_rel <= 1e-12 ? 1 : 0)});
    t.rows.push_back({"real_mass_suggested", std::abs(c.medium.Delta) / c.medium.gamma, 10.0,
                      static_cast<std::int64_t>(real_mass_suggested(c.medium) ? 1 : 0)});
    t.comments = {std::string("all_margins_pass = ") + (report.all_pass() ? "true" : "false")};
    ctx.write(t, "validate.csv");
    if (ctx.log) *ctx.log << "adiabaticity margins " << (report.all_pass() ? "pass" : "FAIL") << "\n";
}

bool cmd_selftest(const Context& ctx) {
    const std::vector<Check> checks{check_convolution(), check_transform(),  check_free_spreading(),
                                    check_diffusion(),   check_dispersion(), check_magic_angle()};
    Table t;
    t.columns = {"check", "error", "tolerance", "pass"};
    bool ok = true;
    for (const auto& ch : checks) {
        ok = ok && ch.pass();
        t.rows.push_back({ch.name, ch.error, ch.tolerance, static_cast<std::int64_t>(ch.pass() ? 1 : 0)});
        if (ctx.log) {
            *ctx.log << (ch.pass() ? "[PASS] " : "[FAIL] ") << ch.name << "  error " << format_double(ch.error)
                     << " (tolerance " << format_double(ch.tolerance) << ")\n";
        }
    }
    ctx.write(t, "selftest.csv");
    return ok;
}

int run(const std::string& command, const Options& options, std::ostream& out, std::ostream& err) {
    try {
        Context ctx;
        ctx.command = command;
        ctx.out_dir = options.out_dir;
        ctx.log = &out;
        const auto names = command_names();
        if (std::find(names.begin(), names.end(), command) == names.end()) {
            err << "error: unknown command '" << command << "'\n";
            return kExitConfig;
        }
        if (options.config_path) {
            std::ifstream in(*options.config_path, std::ios::binary);
            if (!in) throw ConfigError(0, "cannot read config file " + options.config_path->string());
            std::stringstream buf;
            buf << in.rdbuf();
            ctx.config = parse_config(buf.str());
        } else if (command != "selftest") {
            throw ConfigError(0, "command '" + command + "' requires --config");
        } else {
            ctx.config = parse_config("");
        }
        if (options.real_mass) ctx.config.real_mass = *options.real_mass;
        if (options.threads < 1) throw ConfigError(0, "--threads must be >= 1");
        set_fft_threads(options.threads);
        std::filesystem::create_directories(ctx.out_dir);

        if (command == "derive") cmd_derive(ctx);
        else if (command == "kernel") cmd_kernel(ctx);
        else if (command == "dispersion") cmd_dispersion(ctx);
        else if (command == "stability-map") cmd_stability_map(ctx);
        else if (command == "evolve") cmd_evolve(ctx);
        else if (command == "respond") cmd_respond(ctx);
        else if (command == "validate") cmd_validate(ctx);
        else if (command == "selftest" && !cmd_selftest(ctx)) return kExitNumeric;
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        // DomainError and GridError: parameters outside a module's domain.
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace slbec::cli
