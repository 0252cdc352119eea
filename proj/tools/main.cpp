#include <array>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcair/run.hpp"

namespace {

struct Command {
    const char* name;
    const char* help;
};

constexpr std::array<Command, 9> kCommands{{
    {"cir", "Impulse response taps and Gaussian-validity report"},
    {"memory", "Effective channel memory for a symbol interval"},
    {"transitions", "Analytic detector transition probabilities per history"},
    {"mi", "Per-use information for one source parameter point"},
    {"capacity", "Capacity at one symbol interval (grid over the source)"},
    {"sweep", "Capacity across a range of symbol intervals"},
    {"surface", "Information rate over the full source-parameter grid"},
    {"simulate", "Particle-level stream simulation"},
    {"validate", "Monte Carlo cross-checks against the analytic model"},
}};

std::string read_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw std::runtime_error("cannot read config file '" + path + "'");
    std::ostringstream text;
    text << file.rdbuf();
    return text.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Information rates of a diffusive molecular channel with a resetting "
                 "fully-absorbing receiver"};
    app.require_subcommand(1);

    std::string config_path, out_path, scenario;
    uint64_t seed = 0;
    int workers = 1;
    double t_sym = 0.0, grid_step = 0.0;

    for (const Command& cmd : kCommands) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->add_option("--config", config_path, "Configuration file (flat key = value)");
        sub->add_option("--out", out_path, "CSV output path");
        sub->add_option("--seed", seed, "RNG seed");
        sub->add_option("--workers", workers, "Worker thread count");
        sub->add_option("--t-sym", t_sym, "Symbol interval in seconds");
        sub->add_option("--scenario", scenario,
                        "crr-isia | crr-isiu | ind-isia | ind-isiu");
        sub->add_option("--grid-step", grid_step, "Source-parameter grid step");
    }

    CLI11_PARSE(app, argc, argv);
    CLI::App* sub = app.get_subcommands().front();

    try {
        mcair::RunConfig cfg =
            mcair::parse_config(sub->count("--config") ? read_file(config_path) : "");
        if (sub->count("--seed")) cfg.seed = seed;
        if (sub->count("--workers")) {
            if (workers < 1 || workers > 1024)
                throw mcair::config_error("config: workers must lie in [1, 1024]");
            cfg.workers = workers;
        }
        if (sub->count("--t-sym")) {
            if (!(t_sym > 0.0)) throw mcair::config_error("config: t_sym must be > 0");
            cfg.t_sym = t_sym;
        }
        if (sub->count("--scenario")) cfg.scenario = mcair::parse_scenario(scenario);
        if (sub->count("--grid-step")) {
            if (!(grid_step > 0.0 && grid_step <= 0.5))
                throw mcair::config_error("config: grid_step must lie in (0, 0.5]");
            cfg.grid_step = grid_step;
        }
        if (sub->count("--out")) cfg.out = out_path;
        return mcair::run_command(sub->get_name(), cfg, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
