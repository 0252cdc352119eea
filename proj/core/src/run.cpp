#include "mcair/run.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "mcair/csv.hpp"
#include "mcair/montecarlo.hpp"
#include "mcair/optimize.hpp"

namespace mcair {

namespace {

// Two-sided tail mass at three standard deviations of a Gaussian; the level
// of the exact binomial test used by `validate`.
constexpr double kThreeSigmaLevel = 0.0026997960632601866;

std::ofstream open_csv(const std::string& path) {
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
    return file;
}

SearchSettings search_settings(const RunConfig& cfg) {
    return {cfg.tau_coarse_steps, cfg.tau_refine_rounds};
}

// Midpoint between the noise-only mean and the isolated-pulse mean.
double resolve_tau(const RunConfig& cfg, const ChannelImpulseResponse& cir) {
    if (!std::isnan(cfg.tau)) return cfg.tau;
    return cfg.params.noise_mean + cfg.params.n_released * cir.h[0] / 2.0;
}

std::string history_bits(uint32_t word, int memory) {
    std::string s;
    for (int k = 0; k + 1 < memory; ++k) s.push_back(char('0' + ((word >> k) & 1u)));
    return s;  // oldest symbol first
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

int cmd_cir(const RunConfig& cfg, std::ostream& out) {
    const ChannelImpulseResponse cir = compute_cir(cfg.params, cfg.t_sym, cfg.memory_cap);
    const GaussianValidity validity = validate_gaussian(cfg.params, cir);
    if (!cfg.out.empty()) {
        std::ofstream csv = open_csv(cfg.out);
        csv << "tap,h,gauss_ratio,gauss_ok\n";
        for (size_t i = 0; i < cir.h.size(); ++i)
            csv << (i + 1) << ',' << format_g9(cir.h[i]) << ','
                << format_g9(validity.ratio[i]) << ',' << (validity.tap_ok[i] ? 1 : 0) << '\n';
    }
    out << "cir: t_sym = " << format_g9(cir.t_sym) << ", M = " << cir.memory
        << ", t_alpha = " << format_g9(cir.t_alpha)
        << ", gaussian_ok = " << yes_no(validity.all_ok)
        << (cir.degenerate ? ", degenerate" : "") << "\n";
    return 0;
}

int cmd_memory(const RunConfig& cfg, std::ostream& out) {
    const MemoryResult mem = effective_memory(cfg.params, cfg.t_sym, cfg.memory_cap);
    if (!cfg.out.empty()) {
        std::ofstream csv = open_csv(cfg.out);
        csv << "t_sym,t_alpha,M,degenerate\n";
        csv << format_g9(cfg.t_sym) << ',' << format_g9(mem.t_alpha) << ',' << mem.memory
            << ',' << (mem.degenerate ? 1 : 0) << '\n';
    }
    out << "M = " << mem.memory << " (t_alpha = " << format_g9(mem.t_alpha)
        << ", t_sym = " << format_g9(cfg.t_sym) << ")"
        << (mem.degenerate ? " [degenerate: window peak below alpha]" : "") << "\n";
    return 0;
}

int cmd_transitions(const RunConfig& cfg, std::ostream& out) {
    const ChannelImpulseResponse cir = compute_cir(cfg.params, cfg.t_sym, cfg.memory_cap);
    const double tau = resolve_tau(cfg, cir);
    const TransitionTable table = build_transition_table(cir, cfg.params, Detector{tau});
    if (!cfg.out.empty()) {
        std::ofstream csv = open_csv(cfg.out);
        write_transitions_csv(csv, table);
    }
    out << "transitions: t_sym = " << format_g9(cfg.t_sym) << ", M = " << table.memory
        << ", histories = " << table.histories() << ", tau = " << format_g9(tau) << "\n";
    return 0;
}

int cmd_mi(const RunConfig& cfg, std::ostream& out) {
    const ChannelImpulseResponse cir = compute_cir(cfg.params, cfg.t_sym, cfg.memory_cap);
    const bool markov = cfg.scenario.source == SourceKind::markov;
    const bool aware = cfg.scenario.isi == IsiKnowledge::aware;
    const double param1 = markov ? cfg.p : cfg.lambda0;
    const double param2 = markov ? cfg.q : std::numeric_limits<double>::quiet_NaN();

    MIResult mi;
    double tau;
    if (std::isnan(cfg.tau)) {
        const ThresholdSearch search =
            default_threshold_search(cir, cfg.params, search_settings(cfg));
        const ThresholdResult r =
            markov ? optimize_threshold(cfg.scenario.isi, cir, cfg.params,
                                        MarkovSource{cfg.p, cfg.q}, search)
                   : optimize_threshold(cfg.scenario.isi, cir, cfg.params,
                                        IndependentSource{cfg.lambda0}, search);
        mi = r.mi;
        tau = r.tau;
    } else {
        tau = cfg.tau;
        const Detector det{tau};
        if (markov) {
            const MarkovSource src{cfg.p, cfg.q};
            mi = aware ? mi_isia_markov(cir, cfg.params, det, src)
                       : mi_isiu_markov(cir, cfg.params, det, src);
        } else {
            const IndependentSource src{cfg.lambda0};
            mi = aware ? mi_isia_independent(cir, cfg.params, det, src)
                       : mi_isiu_independent(cir, cfg.params, det, src);
        }
    }

    if (!cfg.out.empty()) {
        std::ofstream csv = open_csv(cfg.out);
        csv << "t_sym,scenario,M,mi_bits_per_use,air_bits_per_s,tau,param1,param2,clipped\n";
        csv << format_g9(cfg.t_sym) << ',' << scenario_name(cfg.scenario) << ',' << cir.memory
            << ',' << format_g9(mi.mi) << ',' << format_g9(air(mi.mi, cfg.t_sym)) << ','
            << format_g9(tau) << ',' << format_g9(param1) << ','
            << (std::isnan(param2) ? std::string() : format_g9(param2)) << ','
            << (mi.clipped ? 1 : 0) << '\n';
    }
    out << "mi = " << format_g9(mi.mi) << " bits/use (air = "
        << format_g9(air(mi.mi, cfg.t_sym)) << " bits/s, tau = " << format_g9(tau)
        << ", M = " << cir.memory << ", scenario = " << scenario_name(cfg.scenario) << ")"
        << (mi.clipped ? " [clipped at zero]" : "") << "\n";
    return 0;
}

int cmd_capacity(const RunConfig& cfg, std::ostream& out) {
    const CapacityResult r = capacity(cfg.scenario, cfg.params, cfg.t_sym, cfg.grid_step,
                                      search_settings(cfg), cfg.workers, cfg.memory_cap);
    if (!cfg.out.empty()) {
        std::ofstream csv = open_csv(cfg.out);
        write_sweep_csv(csv, scenario_name(cfg.scenario), {SweepPoint{cfg.t_sym, false, "", r}});
    }
    out << "capacity = " << format_g9(r.air) << " bits/s (mi = " << format_g9(r.mi)
        << " bits/use, tau = " << format_g9(r.tau) << ", param1 = " << format_g9(r.param1);
    if (!std::isnan(r.param2)) out << ", param2 = " << format_g9(r.param2);
    out << ", t_sym = " << format_g9(r.t_sym) << ", M = " << r.memory
        << ", scenario = " << scenario_name(cfg.scenario) << ")\n";
    return 0;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    const std::vector<SweepPoint> points =
        capacity_sweep(cfg.scenario, cfg.params, cfg.t_sym_min, cfg.t_sym_max, cfg.t_sym_step,
                       cfg.grid_step, search_settings(cfg), cfg.workers, cfg.memory_cap);
    if (!cfg.out.empty()) {
        std::ofstream csv = open_csv(cfg.out);
        write_sweep_csv(csv, scenario_name(cfg.scenario), points);
    }
    size_t skipped = 0;
    const SweepPoint* best = nullptr;
    for (const SweepPoint& pt : points) {
        if (pt.skipped) {
            ++skipped;
            continue;
        }
        if (!best || pt.result.air > best->result.air) best = &pt;
    }
    out << "sweep: " << points.size() << " points (" << skipped << " skipped), scenario = "
        << scenario_name(cfg.scenario);
    if (best)
        out << ", best = " << format_g9(best->result.air) << " bits/s at t_sym = "
            << format_g9(best->t_sym);
    out << "\n";
    return 0;
}

int cmd_surface(const RunConfig& cfg, std::ostream& out) {
    const Surface surface = air_surface(cfg.scenario, cfg.params, cfg.t_sym, cfg.grid_step,
                                        search_settings(cfg), cfg.workers, cfg.memory_cap);
    if (!cfg.out.empty()) {
        std::ofstream csv = open_csv(cfg.out);
        write_surface_csv(csv, surface);
    }
    out << "surface: " << surface.points.size() << " points, best air = "
        << format_g9(surface.best.air) << " bits/s at param1 = "
        << format_g9(surface.best.param1);
    if (!std::isnan(surface.best.param2))
        out << ", param2 = " << format_g9(surface.best.param2);
    out << " (t_sym = " << format_g9(cfg.t_sym) << ", scenario = "
        << scenario_name(cfg.scenario) << ")\n";
    return 0;
}

EmpiricalCounts run_stream(const RunConfig& cfg, const ChannelImpulseResponse& cir,
                           const Detector& det, SimConfig::Tail tail) {
    SimConfig sim;
    sim.n_symbols = cfg.n_symbols;
    sim.seed = cfg.seed;
    sim.time_resolution = cfg.time_resolution;
    sim.tail = tail;
    if (cfg.scenario.source == SourceKind::markov)
        return simulate_stream(cfg.params, cir, MarkovSource{cfg.p, cfg.q}, det, sim);
    return simulate_stream(cfg.params, cir, IndependentSource{cfg.lambda0}, det, sim);
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    const ChannelImpulseResponse cir = compute_cir(cfg.params, cfg.t_sym, cfg.memory_cap);
    const Detector det{resolve_tau(cfg, cir)};
    const SimConfig::Tail tail =
        cfg.tail_truncate ? SimConfig::Tail::truncate : SimConfig::Tail::full;
    const EmpiricalCounts counts = run_stream(cfg, cir, det, tail);

    uint64_t ones_sent = 0, ones_detected = 0;
    long double count_sum = 0.0;
    for (size_t i = 0; i < counts.sent.size(); ++i) {
        ones_sent += counts.sent[i];
        ones_detected += counts.detected[i];
        count_sum += counts.counts[i];
    }
    if (!cfg.out.empty()) {
        std::ofstream csv = open_csv(cfg.out);
        csv << "interval_index,s,count,s_hat\n";
        for (size_t i = 0; i < counts.sent.size(); ++i)
            csv << i << ',' << int(counts.sent[i]) << ',' << counts.counts[i] << ','
                << int(counts.detected[i]) << '\n';
    }
    out << "simulate: " << counts.sent.size() << " symbols, ones sent = " << ones_sent
        << ", ones detected = " << ones_detected << ", mean count = "
        << format_g9(double(count_sum / std::max<size_t>(counts.sent.size(), 1)))
        << ", tau = " << format_g9(det.threshold) << "\n";
    return 0;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
    if (cfg.n_symbols < 10000)
        throw std::invalid_argument(
            "validate: n_symbols must be >= 10000 for CI-based checks");
    const ChannelImpulseResponse cir = compute_cir(cfg.params, cfg.t_sym, cfg.memory_cap);
    const Detector det{resolve_tau(cfg, cir)};
    // Mirrors the analytic model (taps beyond M dropped) unless the config
    // explicitly asks for the full-tail oracle.
    const SimConfig::Tail tail = cfg.tail_set && !cfg.tail_truncate
                                     ? SimConfig::Tail::full
                                     : SimConfig::Tail::truncate;
    const EmpiricalCounts counts = run_stream(cfg, cir, det, tail);
    const bool markov = cfg.scenario.source == SourceKind::markov;
    int passed = 0, total = 0;
    auto report = [&](bool ok, const std::string& line) {
        ++total;
        passed += ok ? 1 : 0;
        out << (ok ? "pass: " : "FAIL: ") << line << "\n";
    };

    {  // source transition frequencies vs the configured parameters
        const auto& s = counts.sent;
        uint64_t n0 = 0, n01 = 0, n1 = 0, n10 = 0;
        for (size_t i = 1; i < s.size(); ++i) {
            if (s[i - 1] == 0) {
                ++n0;
                n01 += s[i];
            } else {
                ++n1;
                n10 += 1 - s[i];
            }
        }
        if (markov) {
            const double p_hat = n0 ? double(n01) / double(n0) : cfg.p;
            const double q_hat = n1 ? double(n10) / double(n1) : cfg.q;
            const double tol_p = 4.0 * std::sqrt(cfg.p * (1.0 - cfg.p) / std::max<uint64_t>(n0, 1));
            const double tol_q = 4.0 * std::sqrt(cfg.q * (1.0 - cfg.q) / std::max<uint64_t>(n1, 1));
            report(std::abs(p_hat - cfg.p) <= tol_p && std::abs(q_hat - cfg.q) <= tol_q,
                   "source transitions: p_hat = " + format_g9(p_hat) + " (p = " +
                       format_g9(cfg.p) + " +/- " + format_g9(tol_p) + "), q_hat = " +
                       format_g9(q_hat) + " (q = " + format_g9(cfg.q) + " +/- " +
                       format_g9(tol_q) + ")");
        } else {
            uint64_t zeros = 0;
            for (uint8_t b : s) zeros += 1 - b;
            const double l_hat = double(zeros) / double(s.size());
            const double tol =
                4.0 * std::sqrt(cfg.lambda0 * (1.0 - cfg.lambda0) / double(s.size()));
            report(std::abs(l_hat - cfg.lambda0) <= tol,
                   "source frequency: lambda0_hat = " + format_g9(l_hat) + " (lambda0 = " +
                       format_g9(cfg.lambda0) + " +/- " + format_g9(tol) + ")");
        }
    }

    const TransitionTable analytic = build_transition_table(cir, cfg.params, det);
    const EmpiricalTransitions empirical = empirical_transitions(counts, cir.memory);
    {  // every populated detection cell within its exact 3-sigma binomial band
        size_t populated = 0, failing = 0;
        std::ofstream csv;
        if (!cfg.out.empty()) {
            csv = open_csv(cfg.out);
            csv << "history,s,n,p1_hat,p1_analytic,pass\n";
        }
        for (size_t cell = 0; cell < empirical.n_cell.size(); ++cell) {
            const uint64_t n = empirical.n_cell[cell];
            if (n == 0) continue;
            ++populated;
            const auto w = uint32_t(cell / 2);
            const int s = int(cell % 2);
            const double p1 = analytic.entry(w, s, 1);
            const bool ok = binomial_ci_contains(n, empirical.n_one[cell], p1, kThreeSigmaLevel);
            failing += ok ? 0 : 1;
            if (csv.is_open())
                csv << history_bits(w, cir.memory) << ',' << s << ',' << n << ','
                    << format_g9(empirical.p1_hat(cell)) << ',' << format_g9(p1) << ','
                    << (ok ? 1 : 0) << '\n';
        }
        report(failing == 0, "detection cells: " + std::to_string(populated - failing) + "/" +
                                 std::to_string(populated) +
                                 " populated cells inside the 3-sigma binomial band");
    }

    {  // plug-in information vs the closed form
        const double plug_in =
            empirical_mi(counts, cfg.scenario.source, cfg.scenario.isi, cir.memory);
        MIResult analytic_mi;
        const bool aware = cfg.scenario.isi == IsiKnowledge::aware;
        if (markov) {
            const MarkovSource src{cfg.p, cfg.q};
            analytic_mi = aware ? mi_isia_markov(cir, cfg.params, det, src)
                                : mi_isiu_markov(cir, cfg.params, det, src);
        } else {
            const IndependentSource src{cfg.lambda0};
            analytic_mi = aware ? mi_isia_independent(cir, cfg.params, det, src)
                                : mi_isiu_independent(cir, cfg.params, det, src);
        }
        report(std::abs(plug_in - analytic_mi.raw) <= 0.05,
               "plug-in information: " + format_g9(plug_in) + " bits/use vs analytic " +
                   format_g9(analytic_mi.raw) + " (tolerance 0.05)");
    }

    {  // per-particle arrival fraction vs the geometric hit probability
        const size_t draws = std::min<uint64_t>(cfg.n_symbols, 100000);
        std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);  // decoupled sub-stream
        size_t finite = 0;
        for (size_t i = 0; i < draws; ++i)
            finite += sample_hitting_time(cfg.params, rng, cfg.time_resolution).has_value();
        const double frac = double(finite) / double(draws);
        const double expect = cfg.params.receiver_radius / cfg.params.distance;
        const double tol = 3.0 * std::sqrt(expect * (1.0 - expect) / double(draws));
        report(std::abs(frac - expect) <= tol,
               "arrival fraction: " + format_g9(frac) + " (expected " + format_g9(expect) +
                   " +/- " + format_g9(tol) + ")");
    }

    out << "validate: " << passed << "/" << total << " checks passed (t_sym = "
        << format_g9(cfg.t_sym) << ", M = " << cir.memory << ", tau = "
        << format_g9(det.threshold) << ", n_symbols = " << cfg.n_symbols << ", seed = "
        << cfg.seed << ")\n";
    return passed == total ? 0 : 1;
}

}  // namespace

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& out,
                std::ostream& err) {
    try {
        if (command == "cir") return cmd_cir(cfg, out);
        if (command == "memory") return cmd_memory(cfg, out);
        if (command == "transitions") return cmd_transitions(cfg, out);
        if (command == "mi") return cmd_mi(cfg, out);
        if (command == "capacity") return cmd_capacity(cfg, out);
        if (command == "sweep") return cmd_sweep(cfg, out);
        if (command == "surface") return cmd_surface(cfg, out);
        if (command == "simulate") return cmd_simulate(cfg, out);
        if (command == "validate") return cmd_validate(cfg, out);
        throw std::invalid_argument("unknown command '" + command + "'");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace mcair
