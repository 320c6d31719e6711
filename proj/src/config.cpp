#include "slbec/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "slbec/errors.hpp"

namespace slbec {
namespace {

using Dims = std::array<int, 4>;  // length, time, mass, charge

constexpr Dims kNone{0, 0, 0, 0};
constexpr Dims kLength{1, 0, 0, 0};
constexpr Dims kTime{0, 1, 0, 0};
constexpr Dims kRate{0, -1, 0, 0};
constexpr Dims kVolume{3, 0, 0, 0};
constexpr Dims kWavenumber{-1, 0, 0, 0};
constexpr Dims kDensity{-3, 0, 0, 0};
constexpr Dims kEnergy{2, -2, 1, 0};
constexpr Dims kDipole{1, 0, 0, 1};
constexpr Dims kKernelStrength{3, -1, 0, 0};
// kernel strength per squared dipole moment
constexpr Dims kCoupling{1, -1, 0, -2};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string dims_label(const Dims& d) {
    static const char* symbols[4] = {"m", "s", "kg", "C"};
    std::string out;
    for (int i = 0; i < 4; ++i) {
        if (d[i] == 0) continue;
        if (!out.empty()) out += "*";
        out += symbols[i];
        if (d[i] != 1) out += "^" + std::to_string(d[i]);
    }
    return out;
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_int(std::string_view s, std::int64_t& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::string format_si(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct BaseUnit {
    double scale;
    Dims dims;
};

const std::map<std::string, BaseUnit, std::less<>>& base_units() {
    static const std::map<std::string, BaseUnit, std::less<>> table{
        {"1", {1.0, kNone}},
        {"rad", {1.0, kNone}},
        {"m", {1.0, kLength}},
        {"s", {1.0, kTime}},
        {"g", {1e-3, {0, 0, 1, 0}}},
        {"C", {1.0, {0, 0, 0, 1}}},
        {"J", {1.0, kEnergy}},
        {"eV", {1.602176634e-19, kEnergy}},
    };
    return table;
}

const std::map<char, double>& prefixes() {
    static const std::map<char, double> table{
        {'p', 1e-12}, {'n', 1e-9}, {'u', 1e-6}, {'m', 1e-3}, {'c', 1e-2}, {'k', 1e3}, {'M', 1e6}, {'G', 1e9},
    };
    return table;
}

BaseUnit lookup_symbol(std::string_view sym) {
    const auto& bases = base_units();
    if (auto it = bases.find(sym); it != bases.end()) return it->second;
    if (sym.size() > 1) {
        const auto p = prefixes().find(sym.front());
        const auto it = bases.find(sym.substr(1));
        if (p != prefixes().end() && it != bases.end() && it->first != "1") {
            return {p->second * it->second.scale, it->second.dims};
        }
    }
    throw std::invalid_argument("unknown unit '" + std::string(sym) + "'");
}

// ---------------------------------------------------------------------------
// Key table

enum class Kind { scalar, vec2, vec3, vec3_iso, count, int3, vec3_list, int3_list, word, boolean };

enum class Check { none, positive, non_negative, at_least_one };

struct Value {
    std::vector<double> nums;                 // SI-scaled numbers (scalar, vectors)
    std::vector<std::int64_t> ints;           // count, int3
    std::vector<std::vector<double>> groups;  // vec3_list
    std::vector<LatticeIndex> index_groups;   // int3_list
    std::string word;
    bool flag = false;
};

struct KeySpec {
    std::string name;
    Kind kind;
    Dims dims;
    std::optional<std::string> fallback;  // default value text, parsed like user input
    Check check = Check::none;
    std::string owner;  // type whose invariant the check enforces
    std::vector<std::string> words;
    std::function<void(SimConfig&, const Value&)> apply;
};

Vec3 as_vec3(const Value& v) { return {v.nums[0], v.nums[1], v.nums[2]}; }

WaveVectors& phase_slot(SimConfig& c) {
    if (!c.phase) c.phase.emplace();
    return *c.phase;
}

const std::vector<KeySpec>& key_table() {
    using K = Kind;
    using C = Check;
    static const std::vector<KeySpec> table{
        // medium
        {"medium.g", K::scalar, kRate, {}, C::positive, "MediumParams", {},
         [](SimConfig& c, const Value& v) { c.medium.g = v.nums[0]; }},
        {"medium.N_atoms", K::scalar, kNone, {}, C::at_least_one, "MediumParams", {},
         [](SimConfig& c, const Value& v) { c.medium.N_atoms = v.nums[0]; }},
        {"medium.V_t", K::scalar, kVolume, {}, C::positive, "MediumParams", {},
         [](SimConfig& c, const Value& v) { c.medium.V_t = v.nums[0]; }},
        {"medium.gamma", K::scalar, kRate, {}, C::positive, "MediumParams", {},
         [](SimConfig& c, const Value& v) { c.medium.gamma = v.nums[0]; }},
        {"medium.Delta", K::scalar, kRate, "0", C::none, "", {},
         [](SimConfig& c, const Value& v) { c.medium.Delta = v.nums[0]; }},
        {"medium.Omega", K::scalar, kRate, {}, C::positive, "MediumParams", {},
         [](SimConfig& c, const Value& v) { c.medium.Omega = v.nums[0]; }},
        {"medium.k", K::scalar, kWavenumber, {}, C::positive, "MediumParams", {},
         [](SimConfig& c, const Value& v) { c.medium.k = v.nums[0]; }},
        {"medium.k_c_perp", K::vec2, kWavenumber, "0 0", C::none, "", {},
         [](SimConfig& c, const Value& v) { c.medium.k_c_perp = {v.nums[0], v.nums[1]}; }},
        {"medium.U_strength", K::scalar, kCoupling, "0", C::none, "", {},
         [](SimConfig& c, const Value& v) { c.medium.U_strength = v.nums[0]; }},
        {"medium.dip_moment_r", K::scalar, kDipole, "0", C::none, "", {},
         [](SimConfig& c, const Value& v) { c.medium.dip_moment_r = v.nums[0]; }},
        {"medium.real_mass", K::boolean, kNone, "true", C::none, "", {},
         [](SimConfig& c, const Value& v) { c.real_mass = v.flag; }},
        // kernel
        {"kernel.orientation", K::vec3, kNone, "0 0 1", C::none, "", {},
         [](SimConfig& c, const Value& v) { c.kernel.orientation = as_vec3(v); }},
        {"kernel.strength", K::scalar, kKernelStrength, {}, C::none, "", {},
         [](SimConfig& c, const Value& v) {
             c.kernel.strength = v.nums[0];
             c.kernel_strength_explicit = true;
         }},
        {"kernel.cutoff_radius", K::scalar, kLength, {}, C::non_negative, "KernelSpec", {},
         [](SimConfig& c, const Value& v) { c.kernel.cutoff_radius = v.nums[0]; }},
        {"kernel.sphere_radius", K::scalar, kLength, {}, C::positive, "KernelSpec", {},
         [](SimConfig& c, const Value& v) { c.kernel.sphere_radius = v.nums[0]; }},
        {"kernel.method", K::word, kNone, "analytic", C::none, "", {"analytic", "lattice"},
         [](SimConfig& c, const Value& v) {
             c.kernel_method = v.word == "lattice" ? TableMethod::lattice : TableMethod::analytic;
         }},
        // grid
        {"grid.dims", K::int3, kNone, {}, C::at_least_one, "GridSpec", {},
         [](SimConfig& c, const Value& v) {
             for (int a = 0; a < 3; ++a) c.grid.dims[a] = static_cast<std::size_t>(v.ints[a]);
         }},
        {"grid.spacing", K::vec3_iso, kLength, {}, C::positive, "GridSpec", {},
         [](SimConfig& c, const Value& v) { c.grid.spacing = {v.nums[0], v.nums[1], v.nums[2]}; }},
        // pulse
        {"pulse.T", K::scalar, kTime, {}, C::positive, "PulseSpec", {},
         [](SimConfig& c, const Value& v) { c.pulse.T = v.nums[0]; }},
        {"pulse.L_pulse", K::scalar, kLength, {}, C::positive, "PulseSpec", {},
         [](SimConfig& c, const Value& v) { c.pulse.L_pulse = v.nums[0]; }},
        {"pulse.delta_RR_avg", K::scalar, kRate, "0", C::non_negative, "PulseSpec", {},
         [](SimConfig& c, const Value& v) { c.pulse.delta_RR_avg = v.nums[0]; }},
        {"pulse.margin", K::scalar, kNone, "10", C::positive, "MarginReport", {},
         [](SimConfig& c, const Value& v) { c.margin = v.nums[0]; }},
        // phase (all four or none)
        {"phase.k_plus", K::vec3, kWavenumber, {}, C::none, "", {},
         [](SimConfig& c, const Value& v) { phase_slot(c).k_plus = as_vec3(v); }},
        {"phase.k_minus", K::vec3, kWavenumber, {}, C::none, "", {},
         [](SimConfig& c, const Value& v) { phase_slot(c).k_minus = as_vec3(v); }},
        {"phase.k_c_plus", K::vec3, kWavenumber, {}, C::none, "", {},
         [](SimConfig& c, const Value& v) { phase_slot(c).k_c_plus = as_vec3(v); }},
        {"phase.k_c_minus", K::vec3, kWavenumber, {}, C::none, "", {},
         [](SimConfig& c, const Value& v) { phase_slot(c).k_c_minus = as_vec3(v); }},
        // condensate
        {"condensate.n_dsp", K::scalar, kDensity, {}, C::positive, "CondensateParams", {},
         [](SimConfig& c, const Value& v) { c.n_dsp = v.nums[0]; }},
        {"condensate.C_dd", K::scalar, kEnergy, {}, C::none, "", {},
         [](SimConfig& c, const Value& v) { c.C_dd = v.nums[0]; }},
        // run
        {"run.dt", K::scalar, kTime, {}, C::positive, "run", {},
         [](SimConfig& c, const Value& v) { c.run.dt = v.nums[0]; }},
        {"run.t_final", K::scalar, kTime, {}, C::positive, "run", {},
         [](SimConfig& c, const Value& v) { c.run.t_final = v.nums[0]; }},
        {"run.stride", K::count, kNone, "10", C::at_least_one, "run", {},
         [](SimConfig& c, const Value& v) { c.run.stride = static_cast<std::size_t>(v.ints[0]); }},
        {"run.init", K::word, kNone, "gaussian", C::none, "", {"uniform", "gaussian", "perturbed_plane_wave"},
         [](SimConfig& c, const Value& v) {
             c.run.init = v.word == "uniform"   ? InitKind::uniform
                          : v.word == "gaussian" ? InitKind::gaussian
                                                 : InitKind::perturbed_plane_wave;
         }},
        {"run.width", K::vec3_iso, kLength, {}, C::positive, "InitSpec", {},
         [](SimConfig& c, const Value& v) { c.run.width = as_vec3(v); }},
        {"run.kick", K::vec3, kWavenumber, "0 0 0", C::none, "", {},
         [](SimConfig& c, const Value& v) { c.run.kick = as_vec3(v); }},
        {"run.n0", K::scalar, kDensity, {}, C::positive, "InitSpec", {},
         [](SimConfig& c, const Value& v) { c.run.n0 = v.nums[0]; }},
        {"run.delta", K::scalar, kNone, "1e-3", C::positive, "InitSpec", {},
         [](SimConfig& c, const Value& v) { c.run.delta = v.nums[0]; }},
        {"run.q_index", K::int3, kNone, {}, C::none, "", {},
         [](SimConfig& c, const Value& v) { c.run.q_index = {v.ints[0], v.ints[1], v.ints[2]}; }},
        {"run.directions", K::vec3_list, kNone, {}, C::none, "", {},
         [](SimConfig& c, const Value& v) {
             c.run.directions.clear();
             for (const auto& g : v.groups) c.run.directions.push_back({g[0], g[1], g[2]});
         }},
        {"run.q_min", K::scalar, kWavenumber, {}, C::positive, "run", {},
         [](SimConfig& c, const Value& v) { c.run.q_min = v.nums[0]; }},
        {"run.q_max", K::scalar, kWavenumber, {}, C::positive, "run", {},
         [](SimConfig& c, const Value& v) { c.run.q_max = v.nums[0]; }},
        {"run.n_q", K::count, kNone, "32", C::at_least_one, "run", {},
         [](SimConfig& c, const Value& v) { c.run.n_q = static_cast<std::size_t>(v.ints[0]); }},
        {"run.n_theta", K::count, kNone, "18", C::at_least_one, "run", {},
         [](SimConfig& c, const Value& v) { c.run.n_theta = static_cast<std::size_t>(v.ints[0]); }},
        {"run.n_phi", K::count, kNone, "36", C::at_least_one, "run", {},
         [](SimConfig& c, const Value& v) { c.run.n_phi = static_cast<std::size_t>(v.ints[0]); }},
        {"run.q_indices", K::int3_list, kNone, {}, C::none, "", {},
         [](SimConfig& c, const Value& v) { c.run.q_indices = v.index_groups; }},
        {"run.response_delta", K::scalar, kNone, "1e-4", C::positive, "ResponseConfig", {},
         [](SimConfig& c, const Value& v) { c.run.response_delta = v.nums[0]; }},
        {"run.duration", K::scalar, kTime, {}, C::positive, "ResponseConfig", {},
         [](SimConfig& c, const Value& v) { c.run.duration = v.nums[0]; }},
        {"run.snapshot", K::boolean, kNone, "true", C::none, "", {},
         [](SimConfig& c, const Value& v) { c.run.write_snapshot = v.flag; }},
        // output
        {"output.seed", K::count, kNone, "0", C::none, "", {},
         [](SimConfig& c, const Value& v) { c.run.seed = static_cast<std::uint64_t>(v.ints[0]); }},
    };
    return table;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string nearest_key(std::string_view key) {
    std::string best;
    std::size_t best_d = std::string::npos;
    for (const auto& spec : key_table()) {
        const auto d = levenshtein(key, spec.name);
        if (d < best_d) {
            best_d = d;
            best = spec.name;
        }
    }
    return best;
}

// Splits "1, 2 3 um/s" into number tokens and a trailing unit expression.
void split_numbers(std::string_view text, std::vector<std::string>& numbers, std::string& unit) {
    std::string cleaned(text);
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    std::istringstream in(cleaned);
    std::string tok;
    bool in_unit = false;
    double scratch = 0.0;
    while (in >> tok) {
        if (!in_unit && parse_double(tok, scratch)) {
            numbers.push_back(tok);
        } else {
            in_unit = true;
            unit += tok;
        }
    }
}

std::vector<double> parse_quantities(std::string_view text, const KeySpec& spec, std::size_t min_count,
                                     std::size_t max_count) {
    std::vector<std::string> tokens;
    std::string unit_text;
    split_numbers(text, tokens, unit_text);
    if (tokens.size() < min_count || tokens.size() > max_count) {
        const std::string want = min_count == max_count ? std::to_string(min_count)
                                                        : std::to_string(min_count) + " or " + std::to_string(max_count);
        throw std::invalid_argument("expected " + want + " number(s), got " + std::to_string(tokens.size()));
    }
    // A bare number is taken in SI units.
    UnitValue unit{1.0, spec.dims};
    if (!unit_text.empty()) unit = parse_unit(unit_text);
    if (unit.dims != spec.dims) {
        const std::string want = spec.dims == kNone ? "dimensionless" : dims_label(spec.dims);
        const std::string got = unit.dims == kNone ? "dimensionless" : dims_label(unit.dims);
        throw std::invalid_argument("dimension mismatch for " + spec.name + ": expected " + want + ", got " + got +
                                    " ('" + unit_text + "')");
    }
    std::vector<double> out;
    for (const auto& t : tokens) {
        double v = 0.0;
        parse_double(t, v);
        out.push_back(v * unit.scale);
    }
    return out;
}

std::vector<std::int64_t> parse_integers(std::string_view text, std::size_t count) {
    std::string cleaned(text);
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    std::istringstream in(cleaned);
    std::string tok;
    std::vector<std::int64_t> out;
    while (in >> tok) {
        std::int64_t v = 0;
        if (!parse_int(tok, v)) throw std::invalid_argument("expected an integer, got '" + tok + "'");
        out.push_back(v);
    }
    if (out.size() != count) {
        throw std::invalid_argument("expected " + std::to_string(count) + " integer(s), got " +
                                    std::to_string(out.size()));
    }
    return out;
}

std::vector<std::string> split_groups(std::string_view text) {
    std::vector<std::string> groups;
    std::string cur;
    for (char ch : text) {
        if (ch == ';') {
            groups.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    groups.push_back(trim(cur));
    if (!groups.empty() && groups.back().empty()) groups.pop_back();
    if (groups.empty()) throw std::invalid_argument("empty list");
    return groups;
}

Value parse_value(std::string_view text, const KeySpec& spec) {
    Value v;
    switch (spec.kind) {
        case Kind::scalar: v.nums = parse_quantities(text, spec, 1, 1); break;
        case Kind::vec2: v.nums = parse_quantities(text, spec, 2, 2); break;
        case Kind::vec3: v.nums = parse_quantities(text, spec, 3, 3); break;
        case Kind::vec3_iso:
            v.nums = parse_quantities(text, spec, 1, 3);
            if (v.nums.size() == 2) throw std::invalid_argument("expected 1 or 3 numbers, got 2");
            if (v.nums.size() == 1) v.nums = {v.nums[0], v.nums[0], v.nums[0]};
            break;
        case Kind::count:
            v.ints = parse_integers(text, 1);
            if (v.ints[0] < 0) throw std::invalid_argument("expected a non-negative integer");
            break;
        case Kind::int3: v.ints = parse_integers(text, 3); break;
        case Kind::vec3_list:
            for (const auto& g : split_groups(text)) v.groups.push_back(parse_quantities(g, spec, 3, 3));
            break;
        case Kind::int3_list:
            for (const auto& g : split_groups(text)) {
                const auto ints = parse_integers(g, 3);
                v.index_groups.push_back({ints[0], ints[1], ints[2]});
            }
            break;
        case Kind::word: {
            v.word = trim(text);
            if (std::find(spec.words.begin(), spec.words.end(), v.word) == spec.words.end()) {
                std::string allowed;
                for (const auto& w : spec.words) allowed += (allowed.empty() ? "" : ", ") + w;
                throw std::invalid_argument("'" + v.word + "' is not one of: " + allowed);
            }
            break;
        }
        case Kind::boolean: {
            const std::string w = trim(text);
            if (w == "true" || w == "yes" || w == "1") {
                v.flag = true;
            } else if (w == "false" || w == "no" || w == "0") {
                v.flag = false;
            } else {
                throw std::invalid_argument("expected true or false, got '" + w + "'");
            }
            break;
        }
    }
    return v;
}

void check_domain(const KeySpec& spec, const Value& v) {
    const std::string field = spec.name.substr(spec.name.find('.') + 1);
    auto fail = [&](const char* rel) {
        throw std::invalid_argument(spec.owner + " invariant violated: " + field + " " + rel);
    };
    std::vector<double> values = v.nums;
    for (auto i : v.ints) values.push_back(static_cast<double>(i));
    for (double x : values) {
        switch (spec.check) {
            case Check::none: break;
            case Check::positive:
                if (!(x > 0.0)) fail("> 0");
                break;
            case Check::non_negative:
                if (!(x >= 0.0)) fail(">= 0");
                break;
            case Check::at_least_one:
                if (!(x >= 1.0)) fail(">= 1");
                break;
        }
    }
}

std::string render(const KeySpec& spec, const Value& v) {
    const std::string unit = spec.dims == kNone ? "" : " " + dims_label(spec.dims);
    auto join = [](const std::vector<double>& xs) {
        std::string s;
        for (double x : xs) s += (s.empty() ? "" : " ") + format_si(x);
        return s;
    };
    switch (spec.kind) {
        case Kind::scalar:
        case Kind::vec2:
        case Kind::vec3:
        case Kind::vec3_iso: return join(v.nums) + unit;
        case Kind::count:
        case Kind::int3: {
            std::string s;
            for (auto i : v.ints) s += (s.empty() ? "" : " ") + std::to_string(i);
            return s;
        }
        case Kind::vec3_list: {
            std::string s;
            for (const auto& g : v.groups) s += (s.empty() ? "" : "; ") + join(g);
            return s;
        }
        case Kind::int3_list: {
            std::string s;
            for (const auto& g : v.index_groups) {
                s += (s.empty() ? "" : "; ") + std::to_string(g[0]) + " " + std::to_string(g[1]) + " " +
                     std::to_string(g[2]);
            }
            return s;
        }
        case Kind::word: return v.word;
        case Kind::boolean: return v.flag ? "true" : "false";
    }
    return {};
}

}  // namespace

UnitValue parse_unit(std::string_view text) {
    const std::string s = trim(text);
    if (s.empty()) throw std::invalid_argument("empty unit");
    UnitValue out;
    std::size_t pos = 0;
    char op = '*';
    while (pos < s.size()) {
        std::size_t end = s.find_first_of("*/", pos);
        if (end == std::string::npos) end = s.size();
        std::string factor = trim(std::string_view(s).substr(pos, end - pos));
        if (factor.empty()) throw std::invalid_argument("malformed unit '" + s + "'");
        int power = 1;
        if (const auto caret = factor.find('^'); caret != std::string::npos) {
            std::int64_t p = 0;
            if (!parse_int(trim(std::string_view(factor).substr(caret + 1)), p) || p == 0) {
                throw std::invalid_argument("malformed exponent in unit '" + s + "'");
            }
            power = static_cast<int>(p);
            factor = trim(std::string_view(factor).substr(0, caret));
        }
        const BaseUnit base = lookup_symbol(factor);
        const int sign = op == '*' ? 1 : -1;
        out.scale *= std::pow(base.scale, sign * power);
        for (int i = 0; i < 4; ++i) out.dims[i] += sign * power * base.dims[i];
        if (end < s.size()) op = s[end];
        pos = end + 1;
        if (end == s.size() - 1) throw std::invalid_argument("malformed unit '" + s + "'");
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<std::string> known_config_keys() {
    std::vector<std::string> keys;
    for (const auto& spec : key_table()) keys.push_back(spec.name);
    return keys;
}

SimConfig parse_config(std::string_view text) {
    SimConfig config;
    config.hash = fnv1a64(text);

    const auto& table = key_table();
    std::map<std::string, std::pair<int, std::string>> given;  // key -> (line, value text)

    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, "expected 'section.key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        const bool known = std::any_of(table.begin(), table.end(), [&](const KeySpec& s) { return s.name == key; });
        if (!known) {
            throw ConfigError(line_no, "unknown key '" + key + "'; did you mean '" + nearest_key(key) + "'?");
        }
        if (value.empty()) throw ConfigError(line_no, "missing value for " + key);
        if (given.count(key)) {
            throw ConfigError(line_no, "duplicate key '" + key + "' (first set on line " +
                                           std::to_string(given[key].first) + ")");
        }
        given[key] = {line_no, value};
    }

    std::map<std::string, int> section_line;  // first line of each section, for aggregate errors
    for (const auto& spec : table) {
        const auto it = given.find(spec.name);
        const bool present = it != given.end();
        if (!present && !spec.fallback) {
            config.effective.push_back(spec.name + " = (unset)");
            continue;
        }
        const int line = present ? it->second.first : 0;
        const std::string& value_text = present ? it->second.second : *spec.fallback;
        try {
            const Value v = parse_value(value_text, spec);
            check_domain(spec, v);
            spec.apply(config, v);
            config.effective.push_back(spec.name + " = " + render(spec, v) + (present ? "" : "  (default)"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(line, spec.name + ": " + e.what());
        }
        if (present) {
            config.present.insert(spec.name);
            const std::string section = spec.name.substr(0, spec.name.find('.'));
            if (!section_line.count(section)) section_line[section] = line;
        }
    }

    auto line_of = [&](const std::string& key) { return given.count(key) ? given[key].first : 0; };

    // Cross-key consistency, delegated to the owning modules' validators.
    if (config.phase) {
        for (const char* k : {"phase.k_plus", "phase.k_minus", "phase.k_c_plus", "phase.k_c_minus"}) {
            if (!config.has(k)) {
                throw ConfigError(section_line["phase"], std::string("phase section needs all four wavevectors; ") +
                                                             k + " is missing");
            }
        }
    }
    const double onorm = norm(config.kernel.orientation);
    if (!(onorm > 0.0)) throw ConfigError(line_of("kernel.orientation"), "KernelSpec invariant violated: |orientation| > 0");
    config.kernel.orientation = config.kernel.orientation / onorm;
    if (!config.kernel_strength_explicit) config.kernel.strength = config.medium.dipolar_strength();
    for (auto& e : config.effective) {
        if (e.rfind("kernel.strength =", 0) == 0 && !config.kernel_strength_explicit) {
            e = "kernel.strength = " + format_si(config.kernel.strength) + " " + dims_label(kKernelStrength) +
                "  (U_strength * dip_moment_r^2)";
        }
        if (e.rfind("kernel.orientation =", 0) == 0) {
            const Vec3 o = config.kernel.orientation;
            e = "kernel.orientation = " + format_si(o.x) + " " + format_si(o.y) + " " + format_si(o.z) +
                (config.has("kernel.orientation") ? "" : "  (default)");
        }
    }
    try {
        validate(config.kernel);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(section_line.count("kernel") ? section_line["kernel"] : 0, e.what());
    }
    if (config.has("run.q_min") && config.has("run.q_max") && !(config.run.q_max >= config.run.q_min)) {
        throw ConfigError(line_of("run.q_max"), "run.q_max must be >= run.q_min");
    }
    if (config.has("run.directions")) {
        for (const auto& d : config.run.directions) {
            if (!(norm(d) > 0.0)) throw ConfigError(line_of("run.directions"), "run.directions: zero vector");
        }
    }
    if (config.has("run.delta") && config.run.delta > 1e-3) {
        throw ConfigError(line_of("run.delta"), "InitSpec invariant violated: delta <= 1e-3");
    }
    return config;
}

void require_keys(const SimConfig& config, std::initializer_list<const char*> keys, std::string_view command) {
    std::string missing;
    for (const char* k : keys) {
        if (!config.has(k)) missing += (missing.empty() ? "" : ", ") + std::string(k);
    }
    if (!missing.empty()) {
        throw ConfigError(0, "command '" + std::string(command) + "' requires: " + missing);
    }
}

}  // namespace slbec
