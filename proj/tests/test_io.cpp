#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "slbec/bogoliubov.hpp"
#include "slbec/errors.hpp"
#include "slbec/io.hpp"

using namespace slbec;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "slbec_test_io";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("csv formatting") {
    Table t;
    t.columns = {"name", "value", "count"};
    SUBCASE("header only") { CHECK(format_table(t) == "name,value,count\n"); }
    SUBCASE("rows, comments and escaping") {
        t.comments = {"provenance line"};
        t.rows.push_back({std::string("plain"), 0.1, std::int64_t{3}});
        t.rows.push_back({std::string("needs, \"quotes\""), -2.5e-300, std::int64_t{-7}});
        CHECK(format_table(t) ==
              "# provenance line\nname,value,count\nplain,0.10000000000000001,3\n"
              "\"needs, \"\"quotes\"\"\",-2.5e-300,-7\n");
    }
    SUBCASE("schema mismatch") {
        t.rows.push_back({1.0, 2.0});
        CHECK_THROWS_AS(format_table(t), IoError);
    }
    SUBCASE("doubles round-trip through %.17g") {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(-1e10, 1e10);
        for (int i = 0; i < 100; ++i) {
            const double v = u(rng) * std::pow(10.0, static_cast<int>(i % 40) - 20);
            CHECK(std::stod(format_double(v)) == v);
        }
    }
}

TEST_CASE("atomic table writes") {
    const fs::path path = scratch("table.csv");
    Table t;
    t.columns = {"a"};
    t.rows.push_back({1.5});
    write_table(t, path);
    CHECK(slurp(path) == "a\n1.5\n");
    CHECK_FALSE(fs::exists(path.string() + ".tmp"));
    CHECK_THROWS_AS(write_table(t, scratch("missing_dir/x/y.csv").parent_path() / "nope" / "t.csv"), IoError);
}

TEST_CASE("stability map export ordering") {
    CondensateParams p;
    p.hbar = 1.0;
    p.C_dd = 0.3;
    const auto dirs = spherical_directions(2, 5);
    std::vector<double> mags;
    for (int i = 1; i <= 10; ++i) mags.push_back(0.2 * i);
    const StabilityMap map = stability_map(p, dirs, mags);
    Table t;
    t.columns = {"direction", "q", "nu_re", "nu_im", "stable"};
    for (std::size_t d = 0; d < dirs.size(); ++d)
        for (std::size_t m = 0; m < mags.size(); ++m) {
            const auto& e = map.at(d, m);
            t.rows.push_back({static_cast<std::int64_t>(d), mags[m], e.nu.real(), e.nu.imag(),
                              static_cast<std::int64_t>(e.stable)});
        }
    const std::string text = format_table(t);
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(line.rfind(std::to_string(rows / 10) + ",", 0) == 0);
        ++rows;
    }
    CHECK(rows == 100);
}

TEST_CASE("field files round-trip bit-exactly") {
    Grid g;
    g.dims = {8, 4, 6};
    g.spacing = {0.1, 0.3, 1e-7};
    CondensateState st{ComplexField(g), 1.25e-9};
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n;
    for (auto& v : st.phi.values) v = {n(rng), n(rng)};
    st.phi[3] = {-0.0, 5e-324};
    const fs::path path = scratch("state.field");
    write_field(st, path, {{"sin2_theta", 0.8}, {"m_par", 0.31}});
    const FieldFile back = read_field(path);
    CHECK(back.state.phi.grid == g);
    CHECK(back.state.t == st.t);
    REQUIRE(back.state.phi.size() == st.phi.size());
    CHECK(std::memcmp(back.state.phi.values.data(), st.phi.values.data(), st.phi.size() * sizeof(cd)) == 0);
    CHECK(back.metadata.at("sin2_theta") == 0.8);
    CHECK(back.metadata.at("m_par") == 0.31);

    const std::string bytes = slurp(path);
    CHECK(bytes.rfind("slbec-field v1 dims=8,4,6", 0) == 0);
    const auto header_end = bytes.find('\n');
    CHECK(bytes.size() - header_end - 1 == st.phi.size() * 16);

    std::ofstream(scratch("bad.field")) << "not a field\n";
    CHECK_THROWS_AS(read_field(scratch("bad.field")), IoError);
    CHECK_THROWS_AS(read_field(scratch("absent.field")), IoError);
    std::ofstream(scratch("short.field"), std::ios::binary) << bytes.substr(0, bytes.size() - 8);
    CHECK_THROWS_AS(read_field(scratch("short.field")), IoError);
}

TEST_CASE("kernel tables round-trip") {
    Grid g;
    g.dims = {8, 8, 16};
    g.spacing = {1.0, 1.0, 0.5};
    KernelSpec k;
    k.orientation = normalized(Vec3{0.1, 0.2, 1.0});
    k.strength = -0.7;
    const FourierTable t = kernel_table_fourier(g, k, TableMethod::lattice);
    const fs::path path = scratch("kernel.bin");
    write_fourier_table(t, path);
    const FourierTable back = read_fourier_table(path);
    CHECK(back.grid == g);
    CHECK(back.spec.strength == k.strength);
    CHECK(back.spec.orientation == k.orientation);
    CHECK(back.method == TableMethod::lattice);
    CHECK(back.inner_radius == t.inner_radius);
    CHECK(back.outer_radius == t.outer_radius);
    CHECK(back.coefficients == t.coefficients);
}
