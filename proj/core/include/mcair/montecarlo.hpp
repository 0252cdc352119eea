#pragma once
// Particle-level stochastic simulator used as an independent oracle:
// first-hitting-time sampling, interval counting with reset, external
// noise, threshold detection, and empirical transition/MI estimates.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mcair/channel.hpp"
#include "mcair/detection.hpp"
#include "mcair/mutual_info.hpp"
#include "mcair/sources.hpp"

namespace mcair {

struct SimConfig {
    size_t n_symbols = 1'000'000;
    uint64_t seed = 1;
    double time_resolution = 1e-5;  // hitting-time inversion tolerance, <= 1e-4
    // full: particles from pulses older than M intervals are still binned
    // truthfully (the oracle measures the true channel). truncate: taps
    // beyond the effective memory are dropped, mirroring the analytic model.
    enum class Tail { full, truncate };
    Tail tail = Tail::full;
};

struct EmpiricalCounts {
    std::vector<int64_t> counts;    // noisy per-interval counts (may be < 0)
    std::vector<uint8_t> sent;      // transmitted symbols
    std::vector<uint8_t> detected;  // threshold decisions
};

// One particle's absorption time, or nullopt for the (1 - R/d) mass that
// never arrives. The closed-form CDF is inverted by bisection to within
// time_resolution.
std::optional<double> sample_hitting_time(const SystemParams& params, std::mt19937_64& rng,
                                          double time_resolution = 1e-5);

EmpiricalCounts simulate_stream(const SystemParams& params, const ChannelImpulseResponse& cir,
                                const MarkovSource& src, const Detector& det,
                                const SimConfig& cfg);
EmpiricalCounts simulate_stream(const SystemParams& params, const ChannelImpulseResponse& cir,
                                const IndependentSource& src, const Detector& det,
                                const SimConfig& cfg);

struct EmpiricalTransitions {
    int memory = 0;
    // index = history * 2 + s
    std::vector<uint64_t> n_cell;  // samples per (history, s)
    std::vector<uint64_t> n_one;   // of which detected as 1
    double p1_hat(size_t cell) const {
        return n_cell[cell] ? double(n_one[cell]) / double(n_cell[cell]) : 0.0;
    }
};

// Relative detection frequencies per (history, current symbol); the first
// M-1 stream positions carry incomplete histories and are excluded.
EmpiricalTransitions empirical_transitions(const EmpiricalCounts& counts, int memory);

// Plug-in estimate of the per-use information for the scenario: empirical
// entropy rate of the source minus the empirical conditional entropy of the
// current symbol given (history and) the detected symbol.
double empirical_mi(const EmpiricalCounts& counts, SourceKind source_kind,
                    IsiKnowledge isi, int memory);

// Exact two-sided binomial test: true when x successes out of n draws are
// consistent with success probability p at the given two-sided level (each
// tail compared against level / 2). n = 0 always passes.
bool binomial_ci_contains(uint64_t n, uint64_t x, double p, double two_sided_level);

namespace detail {
// Bin counts for one pulse of n_released particles across max_bins
// intervals (exact multinomial law via sequential binomials; the tail
// beyond sequential_bins is placed by per-particle time sampling).
std::vector<int64_t> sample_pulse_bins(const SystemParams& params, double t_sym,
                                       size_t max_bins, std::mt19937_64& rng);
// Inverse of the per-particle absorption CDF at mass u (0 < u < R/d).
double invert_hitting_cdf(const SystemParams& params, double u);
}  // namespace detail

}  // namespace mcair
