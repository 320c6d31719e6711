#include <cmath>
#include <string>

#include "doctest.h"
#include "slbec/config.hpp"
#include "slbec/errors.hpp"

using namespace slbec;

namespace {

const char* kMinimal = R"(# minimal medium
medium.g = 2e5 rad/s
medium.N_atoms = 1e8
medium.V_t = 1e-9 m^3
medium.gamma = 10 Mrad/s
medium.Omega = 4e7 rad/s
medium.k = 8 rad/um
)";

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("minimal config fills defaults and echoes every key") {
    const SimConfig c = parse_config(kMinimal);
    CHECK(c.medium.g == 2e5);
    CHECK(c.medium.gamma == 1e7);
    CHECK(c.medium.k == doctest::Approx(8e6).epsilon(1e-15));
    CHECK(c.medium.Delta == 0.0);
    CHECK(c.real_mass);
    CHECK(c.margin == 10.0);
    CHECK(c.kernel.orientation == Vec3{0, 0, 1});
    CHECK(c.kernel.strength == 0.0);
    CHECK(c.kernel_method == TableMethod::analytic);
    CHECK(c.run.stride == 10);
    CHECK(c.has("medium.g"));
    CHECK_FALSE(c.has("medium.Delta"));
    CHECK(c.effective.size() == known_config_keys().size());
    bool saw_default = false, saw_unset = false;
    for (const auto& e : c.effective) {
        saw_default = saw_default || (contains(e, "medium.Delta = 0") && contains(e, "(default)"));
        saw_unset = saw_unset || e == "grid.dims = (unset)";
    }
    CHECK(saw_default);
    CHECK(saw_unset);
    CHECK(contains(c.effective[0], "medium.g = 200000 s^-1"));
}

TEST_CASE("misspelled keys name the line and the nearest key") {
    const std::string err = error_of(std::string(kMinimal) + "medium.gamm = 3\n");
    CHECK(contains(err, "line 8"));
    CHECK(contains(err, "medium.gamm"));
    CHECK(contains(err, "did you mean 'medium.gamma'"));
    CHECK(contains(error_of("kernal.strength = 1\n"), "kernel.strength"));
}

TEST_CASE("domain violations cite the owning invariant") {
    std::string text = kMinimal;
    text.replace(text.find("10 Mrad/s"), 9, "-10 Mrad/s");
    const std::string err = error_of(text);
    CHECK(contains(err, "line 5"));
    CHECK(contains(err, "MediumParams invariant violated: gamma > 0"));
    CHECK(contains(error_of("medium.N_atoms = 0.5\n"), "N_atoms >= 1"));
    CHECK(contains(error_of("grid.spacing = 0 um\n"), "GridSpec"));
    CHECK(contains(error_of("kernel.orientation = 0 0 0\n"), "orientation"));
    CHECK(contains(error_of("run.delta = 0.01\n"), "delta <= 1e-3"));
}

TEST_CASE("units are converted and dimension-checked") {
    const SimConfig c = parse_config(
        "grid.spacing = 0.5 um\n"
        "pulse.T = 3 us\n"
        "pulse.L_pulse = 2 mm\n"
        "run.width = 1 2 3 nm\n"
        "medium.U_strength = 2 m/s/C^2\n"
        "medium.dip_moment_r = 3e-29 C*m\n"
        "kernel.strength = 1e-20 m^3*rad/s\n"
        "condensate.C_dd = 1 eV\n"
        "condensate.n_dsp = 1e12 cm^-3\n"
        "medium.Delta = -3e8\n");
    CHECK(c.grid.spacing[0] == doctest::Approx(0.5e-6).epsilon(1e-15));
    CHECK(c.grid.spacing[2] == c.grid.spacing[0]);
    CHECK(c.pulse.T == doctest::Approx(3e-6).epsilon(1e-15));
    CHECK(c.pulse.L_pulse == doctest::Approx(2e-3).epsilon(1e-15));
    CHECK(c.run.width.y == doctest::Approx(2e-9).epsilon(1e-15));
    CHECK(c.medium.U_strength == 2.0);
    CHECK(c.kernel.strength == 1e-20);
    CHECK(*c.C_dd == doctest::Approx(1.602176634e-19).epsilon(1e-15));
    CHECK(c.n_dsp == doctest::Approx(1e18).epsilon(1e-14));
    CHECK(c.medium.Delta == -3e8);

    CHECK(contains(error_of("pulse.T = 3 m\n"), "dimension mismatch for pulse.T"));
    CHECK(contains(error_of("medium.gamma = 3 MHz\n"), "unknown unit"));
    CHECK(contains(error_of("medium.N_atoms = 5 m\n"), "expected dimensionless"));
    CHECK(contains(error_of("grid.spacing = 1 2 um\n"), "1 or 3"));
}

TEST_CASE("unit expressions") {
    CHECK(parse_unit("um").scale == doctest::Approx(1e-6).epsilon(1e-15));
    CHECK(parse_unit("rad/s").dims == std::array<int, 4>{0, -1, 0, 0});
    CHECK(parse_unit("kg").scale == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(parse_unit("J*m^3").dims == std::array<int, 4>{5, -2, 1, 0});
    CHECK(parse_unit("1/ms").scale == doctest::Approx(1e3).epsilon(1e-15));
    CHECK(parse_unit("m/s/C^2").dims == std::array<int, 4>{1, -1, 0, -2});
    CHECK_THROWS(parse_unit("m/"));
    CHECK_THROWS(parse_unit("m^x"));
    CHECK_THROWS(parse_unit("furlong"));
}

TEST_CASE("structure errors") {
    CHECK(contains(error_of("medium.g 3\n"), "line 1"));
    CHECK(contains(error_of("medium.g = 1\nmedium.g = 2\n"), "duplicate"));
    CHECK(contains(error_of("medium.g =\n"), "missing value"));
    CHECK(contains(error_of("kernel.method = fast\n"), "analytic, lattice"));
    CHECK(contains(error_of("run.stride = 2.5\n"), "integer"));
    CHECK(contains(error_of("phase.k_plus = 0 0 1 1/m\n"), "all four wavevectors"));
    CHECK(contains(error_of("run.q_min = 2 1/m\nrun.q_max = 1 1/m\n"), "q_max"));
}

TEST_CASE("lists, words and booleans") {
    const SimConfig c = parse_config(
        "run.directions = 0 0 1; 1, 0, 0 ; 0 1 1\n"
        "run.q_indices = 0 0 4; 4 4 4\n"
        "run.init = perturbed_plane_wave\n"
        "medium.real_mass = no\n"
        "kernel.method = lattice\n"
        "kernel.orientation = 0 3 4\n"
        "grid.dims = 8 16 32  # trailing comment\n");
    REQUIRE(c.run.directions.size() == 3);
    CHECK(c.run.directions[2] == Vec3{0, 1, 1});
    REQUIRE(c.run.q_indices.size() == 2);
    CHECK(c.run.q_indices[1] == LatticeIndex{4, 4, 4});
    CHECK(c.run.init == InitKind::perturbed_plane_wave);
    CHECK_FALSE(c.real_mass);
    CHECK(c.kernel_method == TableMethod::lattice);
    CHECK(c.kernel.orientation == Vec3{0, 0.6, 0.8});
    CHECK(c.grid.dims == std::array<std::size_t, 3>{8, 16, 32});
}

TEST_CASE("derived kernel strength and required keys") {
    const SimConfig c = parse_config(std::string(kMinimal) +
                                     "medium.U_strength = 2 m/s/C^2\nmedium.dip_moment_r = 3 C*m\n");
    CHECK(c.kernel.strength == 18.0);
    CHECK_NOTHROW(require_keys(c, {"medium.g", "medium.k"}, "derive"));
    try {
        require_keys(c, {"grid.dims", "medium.g", "grid.spacing"}, "kernel");
        FAIL("expected missing keys");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()) == "command 'kernel' requires: grid.dims, grid.spacing");
    }
}

TEST_CASE("config hash") {
    CHECK(fnv1a64("") == 14695981039346656037ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(parse_config(kMinimal).hash == parse_config(kMinimal).hash);
    CHECK(parse_config(kMinimal).hash != parse_config(std::string(kMinimal) + "\n").hash);
}
