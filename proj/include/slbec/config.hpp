#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "slbec/dipolar_kernel.hpp"
#include "slbec/eit_parameters.hpp"
#include "slbec/gpe_solver.hpp"
#include "slbec/grid.hpp"

namespace slbec {

using LatticeIndex = std::array<std::int64_t, 3>;

// Command-specific settings. All physical values are SI.
struct RunParams {
    double dt = 0.0;
    double t_final = 0.0;
    std::size_t stride = 10;
    InitKind init = InitKind::gaussian;
    Vec3 width{};
    Vec3 kick{};
    double n0 = 0.0;
    double delta = 1e-3;
    LatticeIndex q_index{};
    std::vector<Vec3> directions;
    double q_min = 0.0;
    double q_max = 0.0;
    std::size_t n_q = 32;
    std::size_t n_theta = 18;
    std::size_t n_phi = 36;
    std::vector<LatticeIndex> q_indices;
    double response_delta = 1e-4;
    std::optional<double> duration;
    std::uint64_t seed = 0;  // reserved; nothing stochastic uses it yet
    bool write_snapshot = true;
};

struct SimConfig {
    MediumParams medium;
    bool real_mass = true;
    KernelSpec kernel;
    TableMethod kernel_method = TableMethod::analytic;
    bool kernel_strength_explicit = false;
    Grid grid;
    PulseSpec pulse;
    double margin = 10.0;
    std::optional<WaveVectors> phase;
    double n_dsp = 0.0;
    std::optional<double> C_dd;
    RunParams run;

    std::set<std::string> present;       // keys set explicitly
    std::vector<std::string> effective;  // "key = value unit" for every known key
    std::uint64_t hash = 0;              // FNV-1a of the source text

    bool has(const std::string& key) const { return present.count(key) != 0; }
};

// Parses the line-oriented "section.key = value [unit]" format. Blank lines
// and text after '#' are ignored. Unknown keys, duplicate keys, malformed
// values, unit/dimension mismatches and parameter-domain violations all raise
// ConfigError with the offending line number.
SimConfig parse_config(std::string_view text);

// Throws ConfigError listing every key of `keys` that the config lacks.
void require_keys(const SimConfig& config, std::initializer_list<const char*> keys, std::string_view command);

// All keys the parser accepts, in table order.
std::vector<std::string> known_config_keys();

// Scale to SI of a unit expression such as "um", "rad/s", "m/s/C^2" or "J*m^3".
// Returns the factor and the (length, time, mass, charge) exponents.
struct UnitValue {
    double scale = 1.0;
    std::array<int, 4> dims{};
};
UnitValue parse_unit(std::string_view text);

std::uint64_t fnv1a64(std::string_view text);

}  // namespace slbec
