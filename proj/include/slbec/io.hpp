#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "slbec/dipolar_kernel.hpp"
#include "slbec/gpe_solver.hpp"

namespace slbec {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::string> comments;  // emitted as "# ..." lines before the header
};

// CSV text: comment lines, header row, one line per row, LF endings, doubles as %.17g.
std::string format_table(const Table& table);

// Writes format_table() atomically (temporary file then rename).
void write_table(const Table& table, const std::filesystem::path& path);

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

// Field file: one text header line
//   slbec-field v1 dims=<nx>,<ny>,<nz> spacing=<dx>,<dy>,<dz> t=<t> [key=value ...]
// followed by nx*ny*nz little-endian float64 (Re, Im) pairs.
void write_field(const CondensateState& state, const std::filesystem::path& path,
                 const std::map<std::string, double>& metadata = {});

struct FieldFile {
    CondensateState state;
    std::map<std::string, double> metadata;
};

FieldFile read_field(const std::filesystem::path& path);

// Kernel table file: one text header line
//   slbec-kernel v1 dims=... spacing=... strength=... orientation=x,y,z method=... inner=... outer=...
// followed by the coefficients as little-endian float64 in FFT order.
void write_fourier_table(const FourierTable& table, const std::filesystem::path& path);
FourierTable read_fourier_table(const std::filesystem::path& path);

std::string format_double(double value);

}  // namespace slbec
