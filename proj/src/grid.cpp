#include "slbec/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "slbec/errors.hpp"

namespace slbec {

double Grid::displacement(int axis, std::size_t i) const {
    const auto n = dims[axis];
    const auto signed_i = static_cast<double>(i) - (i >= (n + 1) / 2 && n > 1 ? static_cast<double>(n) : 0.0);
    return signed_i * spacing[axis];
}

double Grid::wavenumber(int axis, std::size_t i) const {
    const auto n = dims[axis];
    if (n == 1) return 0.0;
    const double m = i < n / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(n);
    return 2.0 * std::numbers::pi * m / length(axis);
}

Grid line_grid(std::size_t nz, double dz) {
    Grid g;
    g.dims = {1, 1, nz};
    g.spacing = {1.0, 1.0, dz};
    validate_grid(g);
    return g;
}

void validate_grid(const Grid& grid) {
    for (int a = 0; a < 3; ++a) {
        if (grid.dims[a] == 0) throw GridError("grid axis " + std::to_string(a) + " has no points");
        if (!(grid.spacing[a] > 0.0) || !std::isfinite(grid.spacing[a]))
            throw GridError("grid spacing along axis " + std::to_string(a) + " must be positive");
    }
}

void validate_solver_grid(const Grid& grid) {
    validate_grid(grid);
    for (int a = 0; a < 3; ++a) {
        if (grid.dims[a] < 8)
            throw GridError("grid too small: axis " + std::to_string(a) + " has " +
                            std::to_string(grid.dims[a]) + " points, need at least 8");
        if (grid.dims[a] % 2 != 0)
            throw GridError("grid axis " + std::to_string(a) + " must have an even point count");
    }
}

ComplexField::ComplexField(const Grid& g, std::vector<cd> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw GridError("field data size does not match its grid");
}

void require_same_grid(const ComplexField& a, const ComplexField& b, const char* what) {
    if (!(a.grid == b.grid)) throw GridError(std::string("grid mismatch: ") + what);
}

double field_norm(const ComplexField& f) {
    double sum = 0.0;
    for (const auto& v : f.values) sum += std::norm(v);
    return sum * f.grid.cell_volume();
}

}  // namespace slbec
