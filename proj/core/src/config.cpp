#include "mcair/config.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <string_view>

namespace mcair {

namespace {

std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n";
    const size_t first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const size_t last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& what) { throw config_error("config: " + what); }

double to_double(std::string_view key, std::string_view value) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(out))
        fail(std::string(key) + " must be a finite number, got '" + std::string(value) + "'");
    return out;
}

int to_int(std::string_view key, std::string_view value) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        fail(std::string(key) + " must be an integer, got '" + std::string(value) + "'");
    return out;
}

uint64_t to_uint64(std::string_view key, std::string_view value) {
    uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        fail(std::string(key) + " must be a non-negative integer, got '" + std::string(value) +
             "'");
    return out;
}

void validate(const RunConfig& cfg) {
    try {
        cfg.params.validate();
    } catch (const std::exception& e) {
        fail(e.what());
    }
    if (!(cfg.t_sym > 0.0)) fail("t_sym must be > 0");
    if (!(cfg.t_sym_min > 0.0)) fail("t_sym_min must be > 0");
    if (!(cfg.t_sym_step > 0.0)) fail("t_sym_step must be > 0");
    if (!(cfg.t_sym_max >= cfg.t_sym_min)) fail("t_sym_max must be >= t_sym_min");
    if (!(cfg.grid_step > 0.0 && cfg.grid_step <= 0.5)) fail("grid_step must lie in (0, 0.5]");
    if (cfg.tau_coarse_steps < 16) fail("tau_coarse_steps must be >= 16");
    if (cfg.tau_refine_rounds < 0 || cfg.tau_refine_rounds > 16)
        fail("tau_refine_rounds must lie in [0, 16]");
    if (cfg.memory_cap < 1 || cfg.memory_cap > 30) fail("memory_cap must lie in [1, 30]");
    if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) fail("p must lie in [0, 1]");
    if (!(cfg.q >= 0.0 && cfg.q <= 1.0)) fail("q must lie in [0, 1]");
    if (!(cfg.lambda0 >= 0.0 && cfg.lambda0 <= 1.0)) fail("lambda0 must lie in [0, 1]");
    if (cfg.n_symbols < 1) fail("n_symbols must be >= 1");
    if (cfg.workers < 1 || cfg.workers > 1024) fail("workers must lie in [1, 1024]");
    if (!(cfg.time_resolution > 0.0 && cfg.time_resolution <= 1e-4))
        fail("time_resolution must lie in (0, 1e-4]");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::set<std::string, std::less<>> seen;
    size_t pos = 0, line_no = 0;
    while (pos <= text.size()) {
        const size_t eol = text.find('\n', pos);
        std::string_view line(text.data() + pos,
                              (eol == std::string::npos ? text.size() : eol) - pos);
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (const size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            fail("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) fail("line " + std::to_string(line_no) + ": empty key");
        if (!seen.insert(key).second) fail("duplicate key '" + key + "'");

        if (key == "n_released") cfg.params.n_released = to_double(key, value);
        else if (key == "receiver_radius") cfg.params.receiver_radius = to_double(key, value);
        else if (key == "distance") cfg.params.distance = to_double(key, value);
        else if (key == "diffusion_coeff") cfg.params.diffusion_coeff = to_double(key, value);
        else if (key == "noise_mean") cfg.params.noise_mean = to_double(key, value);
        else if (key == "noise_std") cfg.params.noise_std = to_double(key, value);
        else if (key == "alpha") cfg.params.alpha = to_double(key, value);
        else if (key == "scenario") cfg.scenario = parse_scenario(std::string(value));
        else if (key == "t_sym") cfg.t_sym = to_double(key, value);
        else if (key == "t_sym_min") cfg.t_sym_min = to_double(key, value);
        else if (key == "t_sym_max") cfg.t_sym_max = to_double(key, value);
        else if (key == "t_sym_step") cfg.t_sym_step = to_double(key, value);
        else if (key == "grid_step") cfg.grid_step = to_double(key, value);
        else if (key == "tau_coarse_steps") cfg.tau_coarse_steps = to_int(key, value);
        else if (key == "tau_refine_rounds") cfg.tau_refine_rounds = to_int(key, value);
        else if (key == "memory_cap") cfg.memory_cap = to_int(key, value);
        else if (key == "p") cfg.p = to_double(key, value);
        else if (key == "q") cfg.q = to_double(key, value);
        else if (key == "lambda0") cfg.lambda0 = to_double(key, value);
        else if (key == "tau") cfg.tau = to_double(key, value);
        else if (key == "n_symbols") cfg.n_symbols = to_uint64(key, value);
        else if (key == "seed") cfg.seed = to_uint64(key, value);
        else if (key == "workers") cfg.workers = to_int(key, value);
        else if (key == "time_resolution") cfg.time_resolution = to_double(key, value);
        else if (key == "tail") {
            if (value == "full") cfg.tail_truncate = false;
            else if (value == "truncate") cfg.tail_truncate = true;
            else fail("tail must be 'full' or 'truncate', got '" + std::string(value) + "'");
            cfg.tail_set = true;
        }
        else if (key == "out") cfg.out = std::string(value);
        else fail("unknown key '" + key + "'");
    }
    validate(cfg);
    return cfg;
}

std::string scenario_name(const Scenario& s) {
    const bool markov = s.source == SourceKind::markov;
    const bool aware = s.isi == IsiKnowledge::aware;
    if (markov) return aware ? "crr-isia" : "crr-isiu";
    return aware ? "ind-isia" : "ind-isiu";
}

Scenario parse_scenario(const std::string& name) {
    if (name == "crr-isia") return {SourceKind::markov, IsiKnowledge::aware};
    if (name == "crr-isiu") return {SourceKind::markov, IsiKnowledge::unaware};
    if (name == "ind-isia") return {SourceKind::independent, IsiKnowledge::aware};
    if (name == "ind-isiu") return {SourceKind::independent, IsiKnowledge::unaware};
    throw config_error(
        "config: scenario must be one of crr-isia, crr-isiu, ind-isia, ind-isiu; got '" +
        name + "'");
}

}  // namespace mcair
