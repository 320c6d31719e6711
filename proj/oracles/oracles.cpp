#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "slbec/fft.hpp"

namespace slbec::oracle {

std::vector<double> direct_dipolar_sum(const Grid& grid, const std::vector<double>& density, Vec3 axis,
                                       double strength, double inner, double outer) {
    const auto [nx, ny, nz] = grid.dims;
    const double dv = grid.cell_volume();
    auto wrap = [&](int a, long d) {
        const long n = static_cast<long>(grid.dims[a]);
        d %= n;
        if (d < 0) d += n;
        if (2 * d >= n) d -= n;  // n/2 goes to -n/2
        return static_cast<double>(d) * grid.spacing[a];
    };
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t k = 0; k < nz; ++k) {
                double acc = 0.0;
                for (std::size_t a = 0; a < nx; ++a)
                    for (std::size_t b = 0; b < ny; ++b)
                        for (std::size_t c = 0; c < nz; ++c) {
                            const double x = wrap(0, static_cast<long>(i) - static_cast<long>(a));
                            const double y = wrap(1, static_cast<long>(j) - static_cast<long>(b));
                            const double z = wrap(2, static_cast<long>(k) - static_cast<long>(c));
                            const double r2 = x * x + y * y + z * z;
                            if (r2 == 0.0) continue;
                            const double r = std::sqrt(r2);
                            if (r < inner || r > outer) continue;
                            const double along = axis.x * x + axis.y * y + axis.z * z;
                            const double eps = strength * (1.0 - 3.0 * along * along / r2) / (r2 * r);
                            acc += eps * density[grid.index(a, b, c)];
                        }
                out[grid.index(i, j, k)] = acc * dv;
            }
    return out;
}

Quadrature gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1");
    Quadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = n == 1 ? x : p1;
            const double pm = n == 1 ? 1.0 : p0;
            dp = n * (x * pn - pm) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        q.nodes[i] = x;
        q.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return q;
}

double kernel_fourier_quadrature(Vec3 q, Vec3 axis, double strength, double inner, double outer, int radial_panels,
                                 int n_cos, int n_azimuth) {
    const double qn = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
    Vec3 e3 = qn > 0.0 ? Vec3{q.x / qn, q.y / qn, q.z / qn} : Vec3{0.0, 0.0, 1.0};
    Vec3 seed = std::abs(e3.x) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
    Vec3 e1 = cross(e3, seed);
    e1 = e1 / std::sqrt(dot(e1, e1));
    const Vec3 e2 = cross(e3, e1);

    const Quadrature gl_r = gauss_legendre(8);
    // Enough polar nodes to resolve cos(q r c) at the outer radius.
    const int n_c = std::max(n_cos, static_cast<int>(std::ceil(qn * outer)) + 32);
    const Quadrature gl_c = gauss_legendre(n_c);
    const double u0 = std::log(inner), u1 = std::log(outer);
    const double du = (u1 - u0) / radial_panels;

    // Azimuthal integral of 1 - 3 (axis.rhat)^2 on each polar ring.
    std::vector<double> ring(n_c, 0.0);
    for (int ic = 0; ic < n_c; ++ic) {
        const double c = gl_c.nodes[ic];
        const double s = std::sqrt(1.0 - c * c);
        for (int ia = 0; ia < n_azimuth; ++ia) {
            const double phi = 2.0 * std::numbers::pi * ia / n_azimuth;
            const Vec3 rhat = e1 * (s * std::cos(phi)) + e2 * (s * std::sin(phi)) + e3 * c;
            const double along = dot(axis, rhat);
            ring[ic] += 1.0 - 3.0 * along * along;
        }
        ring[ic] *= 2.0 * std::numbers::pi / n_azimuth;
    }
    auto angular = [&](double qr) {
        double acc = 0.0;
        for (int ic = 0; ic < n_c; ++ic) acc += gl_c.weights[ic] * std::cos(qr * gl_c.nodes[ic]) * ring[ic];
        return acc;
    };

    double total = 0.0;
    for (int p = 0; p < radial_panels; ++p) {
        const double a = u0 + p * du;
        for (std::size_t i = 0; i < gl_r.nodes.size(); ++i) {
            const double u = a + 0.5 * du * (gl_r.nodes[i] + 1.0);
            const double r = std::exp(u);
            // eps r^2 dr = strength (angular) dr / r = strength (angular) du
            total += 0.5 * du * gl_r.weights[i] * angular(qn * r);
        }
    }
    return strength * total;
}

double free_gaussian_variance(double sigma0_sq, double hbar, double mass, double t) {
    const double s = hbar * t / (2.0 * mass * sigma0_sq);
    return sigma0_sq * (1.0 + s * s);
}

double diffusion_variance(double sigma0_sq, double D, double t) { return sigma0_sq + 2.0 * D * t; }

std::vector<std::complex<double>> integrating_factor_rk4(const Grid& grid, std::vector<std::complex<double>> psi,
                                                         double hbar, double m_perp, double m_par,
                                                         const PotentialFn& potential, double t, int substeps) {
    using C = std::complex<double>;
    const FftPlan plan(grid);
    const std::size_t n = grid.size();
    const double h = t / substeps;

    std::vector<C> half(n), full(n);
    for (std::size_t i = 0; i < grid.dims[0]; ++i)
        for (std::size_t j = 0; j < grid.dims[1]; ++j)
            for (std::size_t k = 0; k < grid.dims[2]; ++k) {
                const Vec3 q = grid.wavevector(i, j, k);
                const double w = 0.5 * hbar * (q.z * q.z / m_par + (q.x * q.x + q.y * q.y) / m_perp);
                const std::size_t idx = grid.index(i, j, k);
                half[idx] = std::exp(C(0.0, -w * h / 2.0));
                full[idx] = half[idx] * half[idx];
            }

    // Nonlinear term in Fourier space: FFT(-i V psi), psi given in Fourier space.
    auto nonlinear = [&](const std::vector<C>& spec) {
        std::vector<C> x = spec;
        plan.inverse(x);
        std::vector<double> dens(n);
        for (std::size_t i = 0; i < n; ++i) dens[i] = std::norm(x[i]);
        const std::vector<double> v = potential(dens);
        for (std::size_t i = 0; i < n; ++i) x[i] *= C(0.0, -v[i]);
        plan.forward(x);
        return x;
    };

    plan.forward(psi);
    std::vector<C> tmp(n);
    for (int s = 0; s < substeps; ++s) {
        std::vector<C> a = nonlinear(psi);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = half[i] * (psi[i] + 0.5 * h * a[i]);
        std::vector<C> b = nonlinear(tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = half[i] * psi[i] + 0.5 * h * b[i];
        std::vector<C> c = nonlinear(tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = full[i] * psi[i] + half[i] * h * c[i];
        std::vector<C> d = nonlinear(tmp);
        for (std::size_t i = 0; i < n; ++i) {
            psi[i] = full[i] * psi[i] +
                     h / 6.0 * (full[i] * a[i] + 2.0 * half[i] * (b[i] + c[i]) + d[i]);
        }
    }
    plan.inverse(psi);
    return psi;
}

std::complex<double> bogoliubov_frequency(Vec3 q, double hbar, double m_perp, double m_par, double n0,
                                          double sin2_theta, double kernel_coefficient) {
    const double e = 0.5 * hbar * (q.z * q.z / m_par + (q.x * q.x + q.y * q.y) / m_perp);
    const double nu2 = e * (e + 2.0 * n0 * sin2_theta * kernel_coefficient);
    if (nu2 >= 0.0) return {std::sqrt(nu2), 0.0};
    return {0.0, std::sqrt(-nu2)};
}

}  // namespace slbec::oracle
