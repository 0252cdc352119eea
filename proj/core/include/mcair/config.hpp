#pragma once
// Flat key = value configuration (with # comments) and the run settings
// shared by every CLI command.

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "mcair/channel.hpp"
#include "mcair/mutual_info.hpp"

namespace mcair {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    SystemParams params;  // Table-style physical defaults
    Scenario scenario{SourceKind::markov, IsiKnowledge::aware};

    double t_sym = 1.0;
    double t_sym_min = 0.2;
    double t_sym_max = 1.5;
    double t_sym_step = 0.05;

    double grid_step = 0.01;
    int tau_coarse_steps = 256;
    int tau_refine_rounds = 3;
    int memory_cap = kDefaultMemoryCap;

    // source parameters used by fixed-point commands (transitions, mi, simulate)
    double p = 0.5;
    double q = 0.5;
    double lambda0 = 0.5;

    // detector threshold for transitions/simulate/validate; NaN = derive the
    // canonical midpoint mu_E + N_T h_1 / 2 from the channel
    double tau = std::numeric_limits<double>::quiet_NaN();

    uint64_t n_symbols = 1'000'000;
    uint64_t seed = 1;
    int workers = 1;
    double time_resolution = 1e-5;
    bool tail_truncate = false;  // simulate: drop taps beyond the memory
    bool tail_set = false;       // whether the config named a tail mode

    std::string out;  // CSV output path; empty = no file
};

// Parses and fully validates; unknown keys and out-of-range values are
// rejected with the violated invariant named in the exception message.
RunConfig parse_config(const std::string& text);

std::string scenario_name(const Scenario& s);
Scenario parse_scenario(const std::string& name);  // crr-isia, crr-isiu, ind-isia, ind-isiu

}  // namespace mcair
