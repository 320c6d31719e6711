#include "slbec/dipolar_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "slbec/errors.hpp"
#include "slbec/fft.hpp"

namespace slbec {
namespace {

constexpr double pi = std::numbers::pi;

// 3 j1(x)/x, equal to 1 at x = 0.
double shell_factor(double x) {
    if (x < 0.1) {
        const double x2 = x * x;
        return 1.0 - x2 / 10.0 + x2 * x2 / 280.0 - x2 * x2 * x2 / 15120.0 + x2 * x2 * x2 * x2 / 1330560.0;
    }
    return 3.0 * (std::sin(x) - x * std::cos(x)) / (x * x * x);
}

// shell_factor(a) - shell_factor(b) for 0 <= a < b. For b <= 1 the power
// series is differenced term by term so the leading 1 cancels exactly.
double shell_difference(double a, double b) {
    if (b > 1.0) return shell_factor(a) - shell_factor(b);
    const double a2 = a * a, b2 = b * b;
    double pa = 1.0, pb = 1.0, factorial = 1.0, sum = 0.0;
    for (int n = 1; n <= 12; ++n) {
        pa *= a2;
        pb *= b2;
        factorial *= (2.0 * n - 1.0) * (2.0 * n);
        const double c = (n % 2 ? -3.0 : 3.0) / (factorial * (2.0 * n + 1.0) * (2.0 * n + 3.0));
        sum += c * (pa - pb);
    }
    return sum;
}

double default_inner(const Grid& grid, const KernelSpec& spec) {
    return spec.cutoff_radius.value_or(*std::min_element(grid.spacing.begin(), grid.spacing.end()));
}

double default_outer(const Grid& grid, const KernelSpec& spec) {
    const double half_edge = 0.5 * std::min({grid.length(0), grid.length(1), grid.length(2)});
    return spec.sphere_radius.value_or(half_edge);
}

}  // namespace

void validate(const KernelSpec& spec) {
    if (std::abs(norm(spec.orientation) - 1.0) > 1e-12)
        throw DomainError("KernelSpec invariant violated: |orientation| = 1");
    if (!std::isfinite(spec.strength)) throw DomainError("KernelSpec invariant violated: strength finite");
    if (spec.cutoff_radius && !(*spec.cutoff_radius >= 0.0))
        throw DomainError("KernelSpec invariant violated: cutoff_radius >= 0");
    if (spec.sphere_radius && !(*spec.sphere_radius > 0.0))
        throw DomainError("KernelSpec invariant violated: sphere_radius > 0");
}

double angular_factor(Vec3 axis, Vec3 v) {
    const double along = dot(axis, v);
    const double v2 = dot(v, v);
    return (3.0 * along * along - v2) / v2;
}

double kernel_value(Vec3 r, const KernelSpec& spec) {
    const double r2 = dot(r, r);
    const double cutoff = spec.cutoff_radius.value_or(0.0);
    if (r2 == 0.0) {
        if (cutoff > 0.0) return 0.0;
        throw DomainError("kernel_value: singular at r = 0 without a cutoff radius");
    }
    const double rn = std::sqrt(r2);
    if (rn < cutoff) return 0.0;
    return -spec.strength * angular_factor(spec.orientation, r) / (r2 * rn);
}

double kernel_fourier_analytic(Vec3 q, const KernelSpec& spec) {
    if (dot(q, q) == 0.0) return 0.0;
    return (4.0 * pi / 3.0) * spec.strength * angular_factor(spec.orientation, q);
}

double kernel_fourier_truncated(Vec3 q, const KernelSpec& spec, double inner, double outer) {
    if (!(inner >= 0.0) || !(outer > inner)) throw DomainError("kernel shell requires 0 <= inner < outer");
    const double qn = norm(q);
    if (qn == 0.0) return 0.0;
    return kernel_fourier_analytic(q, spec) * shell_difference(qn * inner, qn * outer);
}

FourierTable kernel_table_fourier(const Grid& grid, const KernelSpec& spec, TableMethod method) {
    validate_solver_grid(grid);
    validate(spec);

    FourierTable table;
    table.grid = grid;
    table.spec = spec;
    table.method = method;
    table.inner_radius = default_inner(grid, spec);
    table.outer_radius = default_outer(grid, spec);
    if (!(table.outer_radius > table.inner_radius))
        throw DomainError("kernel truncation radius must exceed the cutoff radius");
    table.coefficients.assign(grid.size(), 0.0);

    const auto [nx, ny, nz] = grid.dims;
    if (method == TableMethod::analytic) {
        for (std::size_t ix = 0; ix < nx; ++ix)
            for (std::size_t iy = 0; iy < ny; ++iy)
                for (std::size_t iz = 0; iz < nz; ++iz)
                    table.coefficients[grid.index(ix, iy, iz)] = kernel_fourier_truncated(
                        grid.wavevector(ix, iy, iz), spec, table.inner_radius, table.outer_radius);
    } else {
        std::vector<cd> weights(grid.size());
        const double dv = grid.cell_volume();
        for (std::size_t ix = 0; ix < nx; ++ix)
            for (std::size_t iy = 0; iy < ny; ++iy)
                for (std::size_t iz = 0; iz < nz; ++iz) {
                    const Vec3 r{grid.displacement(0, ix), grid.displacement(1, iy), grid.displacement(2, iz)};
                    const double rn = norm(r);
                    if (rn == 0.0 || rn < table.inner_radius || rn > table.outer_radius) continue;
                    weights[grid.index(ix, iy, iz)] = -spec.strength * angular_factor(spec.orientation, r) /
                                                      (rn * rn * rn) * dv;
                }
        FftPlan(grid).forward(weights);
        for (std::size_t i = 0; i < weights.size(); ++i) table.coefficients[i] = weights[i].real();
    }
    table.coefficients[0] = 0.0;
    return table;
}

std::vector<double> convolve(const FourierTable& table, std::span<const double> density) {
    if (density.size() != table.grid.size()) throw GridError("density size does not match kernel table grid");
    std::vector<cd> buffer(density.begin(), density.end());
    const FftPlan plan(table.grid);
    plan.forward(buffer);
    for (std::size_t i = 0; i < buffer.size(); ++i) buffer[i] *= table.coefficients[i];
    plan.inverse(buffer);
    std::vector<double> out(buffer.size());
    std::transform(buffer.begin(), buffer.end(), out.begin(), [](cd v) { return v.real(); });
    return out;
}

double table_coefficient(const FourierTable& table, Vec3 q) {
    const Grid& g = table.grid;
    std::array<std::size_t, 3> idx{};
    for (int a = 0; a < 3; ++a) {
        const double m = q[a] * g.length(a) / (2.0 * pi);
        const double rounded = std::round(m);
        if (std::abs(m - rounded) > 1e-9 * std::max(1.0, std::abs(m)))
            throw GridError("wavevector is not on the reciprocal lattice (axis " + std::to_string(a) + ")");
        const auto n = static_cast<long long>(g.dims[a]);
        idx[a] = static_cast<std::size_t>(((static_cast<long long>(rounded) % n) + n) % n);
    }
    return table.at(idx[0], idx[1], idx[2]);
}

}  // namespace slbec
