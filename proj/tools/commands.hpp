#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "slbec/config.hpp"
#include "slbec/io.hpp"

namespace slbec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

struct Options {
    std::optional<std::filesystem::path> config_path;
    std::filesystem::path out_dir = ".";
    int threads = 1;
    std::optional<bool> real_mass;  // command-line override of medium.real_mass
};

struct Context {
    SimConfig config;
    std::string command;
    std::filesystem::path out_dir;
    std::ostream* log = nullptr;

    bool real_mass() const { return config.real_mass; }
    // Provenance block: tool version, command, config hash, effective values.
    std::vector<std::string> provenance() const;
    void write(Table table, const std::string& filename) const;
};

std::vector<std::string> command_names();

// Runs one command end to end and returns the process exit code. Errors are
// reported on `err`.
int run(const std::string& command, const Options& options, std::ostream& out, std::ostream& err);

// Individual commands, exposed for tests. They throw on failure.
void cmd_derive(const Context& ctx);
void cmd_kernel(const Context& ctx);
void cmd_dispersion(const Context& ctx);
void cmd_stability_map(const Context& ctx);
void cmd_evolve(const Context& ctx);
void cmd_respond(const Context& ctx);
void cmd_validate(const Context& ctx);
// Returns true when every oracle check passes.
bool cmd_selftest(const Context& ctx);

}  // namespace slbec::cli
