#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "commands.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using namespace slbec;

namespace {

const fs::path kExamples = SLBEC_EXAMPLES_DIR;

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("slbec_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "input.cfg";
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(const std::string& command, const fs::path& config, const fs::path& out_dir) {
    cli::Options o;
    if (!config.empty()) o.config_path = config;
    o.out_dir = out_dir;
    std::ostringstream out, err;
    const int code = cli::run(command, o, out, err);
    return {code, out.str(), err.str()};
}

int shell(const std::string& args) {
    const std::string cmd = std::string("\"") + SLBEC_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("derive writes a table with a provenance header") {
    const fs::path dir = scratch("derive");
    const auto r = run("derive", kExamples / "medium.cfg", dir);
    REQUIRE(r.code == cli::kExitOk);
    const std::string csv = slurp(dir / "derive.csv");
    CHECK(csv.rfind("# slbec ", 0) == 0);
    CHECK(contains(csv, "# command: derive\n"));
    CHECK(contains(csv, "# config_hash: fnv1a64:"));
    CHECK(contains(csv, "# medium.gamma = "));
    CHECK(contains(csv, "\nquantity,value,unit\n"));
    CHECK(contains(csv, "\nL_abs,"));
    CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("identical runs produce byte-identical outputs") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    for (const char* cmd : {"dispersion", "stability-map", "validate"}) {
        REQUIRE(run(cmd, kExamples / "medium.cfg", a).code == cli::kExitOk);
        REQUIRE(run(cmd, kExamples / "medium.cfg", b).code == cli::kExitOk);
    }
    REQUIRE(run("respond", kExamples / "respond.cfg", a).code == cli::kExitOk);
    REQUIRE(run("respond", kExamples / "respond.cfg", b).code == cli::kExitOk);
    for (const char* f : {"dispersion.csv", "critical.csv", "stability_map.csv", "validate.csv", "response.csv",
                          "response_0.csv"}) {
        CAPTURE(f);
        const std::string x = slurp(a / f);
        CHECK(!x.empty());
        CHECK(x == slurp(b / f));
    }
}

TEST_CASE("every example config runs") {
    const fs::path dir = scratch("examples");
    CHECK(run("kernel", kExamples / "kernel.cfg", dir).code == cli::kExitOk);
    CHECK(fs::exists(dir / "kernel_table.bin"));
    const auto e = run("evolve", kExamples / "evolve.cfg", dir);
    CHECK(e.code == cli::kExitOk);
    CHECK(fs::exists(dir / "observables.csv"));
    CHECK(fs::exists(dir / "final_state.field"));
    const std::string map = (run("stability-map", kExamples / "medium.cfg", dir), slurp(dir / "stability_map.csv"));
    CHECK(contains(map, "# unstable_entries = "));
}

TEST_CASE("configuration problems exit with code 2") {
    const fs::path dir = scratch("config_errors");
    SUBCASE("misspelled key") {
        const auto r = run("derive", write_config(dir, slurp(kExamples / "medium.cfg") + "medium.gamm = 1 rad/s\n"), dir);
        CHECK(r.code == cli::kExitConfig);
        CHECK(contains(r.err, "did you mean 'medium.gamma'"));
    }
    SUBCASE("missing section for the command") {
        const auto r = run("evolve", kExamples / "medium.cfg", dir);
        CHECK(r.code == cli::kExitConfig);
        CHECK(contains(r.err, "requires"));
        CHECK(contains(r.err, "grid.dims"));
    }
    SUBCASE("no config file") {
        CHECK(run("derive", {}, dir).code == cli::kExitConfig);
        CHECK(run("derive", dir / "does_not_exist.cfg", dir).code == cli::kExitConfig);
    }
    SUBCASE("respond refuses complex masses") {
        cli::Options o;
        o.config_path = kExamples / "respond.cfg";
        o.out_dir = dir;
        o.real_mass = false;
        std::ostringstream out, err;
        CHECK(cli::run("respond", o, out, err) == cli::kExitConfig);
    }
}

TEST_CASE("a perturbation driven out of the linear regime exits with code 3") {
    const fs::path dir = scratch("numeric");
    std::string text = slurp(kExamples / "respond.cfg");
    text.replace(text.find("run.q_indices"), std::string::npos, "run.q_index = 4 0 0\nrun.duration = 200 ps\n");
    const auto r = run("respond", write_config(dir, text), dir);
    CHECK(r.code == cli::kExitNumeric);
    CHECK(contains(r.err, "linear regime"));
}

TEST_CASE("selftest passes without a config") {
    const fs::path dir = scratch("selftest");
    const auto r = run("selftest", {}, dir);
    CHECK(r.code == cli::kExitOk);
    const std::string csv = slurp(dir / "selftest.csv");
    CHECK(contains(csv, "\ncheck,error,tolerance,pass\n"));
    CHECK(!contains(csv, ",0\n"));
    CHECK(contains(r.out, "[PASS] kernel_convolution_vs_direct_sum"));
}

TEST_CASE("the executable maps outcomes to exit codes") {
    const fs::path dir = scratch("binary");
    const std::string out = " --out \"" + dir.string() + "\"";
    CHECK(shell("derive --config \"" + (kExamples / "medium.cfg").string() + "\"" + out) == 0);
    CHECK(fs::exists(dir / "derive.csv"));
    CHECK(shell("derive" + out) == 2);
    CHECK(shell("no-such-command" + out) == 2);
    CHECK(shell("derive --config x --real-mass --complex-mass" + out) == 2);
    CHECK(shell("derive --threads 0 --config \"" + (kExamples / "medium.cfg").string() + "\"" + out) == 2);
}
