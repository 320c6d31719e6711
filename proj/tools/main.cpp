#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
    namespace cli = slbec::cli;
    CLI::App app{"Slow-light dipolar polariton condensate toolkit"};
    app.fallthrough();
    app.require_subcommand(1);

    cli::Options options;
    std::string config;
    std::string out = ".";
    bool real_mass = false, complex_mass = false;
    app.add_option("--config", config, "Configuration file (section.key = value [unit])");
    app.add_option("--out", out, "Output directory")->capture_default_str();
    app.add_option("--threads", options.threads, "FFT threads")->capture_default_str();
    auto* real = app.add_flag("--real-mass", real_mass, "Drop the imaginary part of the longitudinal mass");
    auto* cplx = app.add_flag("--complex-mass", complex_mass, "Keep the complex longitudinal mass");
    real->excludes(cplx);

    const std::pair<const char*, const char*> commands[] = {
        {"derive", "EIT-derived quantities of the medium"},
        {"kernel", "Tabulate the dipolar kernel and its Fourier coefficients"},
        {"dispersion", "Bogoliubov frequencies along rays"},
        {"stability-map", "Bogoliubov stability over a direction x magnitude grid"},
        {"evolve", "Split-step evolution of the condensate"},
        {"respond", "Measure collective-mode frequencies from small perturbations"},
        {"validate", "Adiabaticity margins and phase matching"},
        {"selftest", "Compare the library against independent reference computations"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kExitConfig;
    }

    if (!config.empty()) options.config_path = config;
    options.out_dir = out;
    if (real_mass) options.real_mass = true;
    if (complex_mass) options.real_mass = false;
    const std::string command = app.get_subcommands().front()->get_name();
    return cli::run(command, options, std::cout, std::cerr);
}
