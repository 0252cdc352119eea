#include "mcair/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/special_functions/erf.hpp>

namespace mcair {

namespace {

void validate_sim_config(const SimConfig& cfg) {
    if (cfg.n_symbols < 1)
        throw std::invalid_argument("SimConfig: n_symbols must be >= 1");
    if (!(cfg.time_resolution > 0.0) || cfg.time_resolution > 1e-4)
        throw std::invalid_argument("SimConfig: time_resolution must lie in (0, 1e-4]");
}

// Per-particle absorption CDF F(t) = N(t) / N_T; its limit as t -> inf is R/d.
double hit_cdf(const SystemParams& params, double t) {
    return expected_cumulative_absorbed(params, t) / params.n_released;
}

// Bins 1..chain_bins get exact sequential-binomial counts; in full-tail mode
// the eventually-absorbed part of the remainder is placed by per-particle
// CDF inversion. Together this reproduces the law of binning n_released
// i.i.d. hitting times without drawing each one.
struct PulseSampler {
    const SystemParams& params;
    double t_sym;
    int64_t n_total;
    double total_mass;            // R/d
    std::vector<double> cdf;      // cdf[k] = F(k t_sym), k = 0..chain_bins
    std::vector<double> cond_p;   // cond_p[k] = P(bin k | not absorbed before)
    double late_p = 0.0;          // P(absorbed eventually | not in chain bins)
    bool tail = false;

    PulseSampler(const SystemParams& p, double t, size_t chain_bins, bool with_tail)
        : params(p), t_sym(t) {
        n_total = std::llround(p.n_released);
        total_mass = p.receiver_radius / p.distance;
        cdf.resize(chain_bins + 1);
        cond_p.resize(chain_bins + 1, 0.0);
        cdf[0] = 0.0;
        for (size_t k = 1; k <= chain_bins; ++k) {
            cdf[k] = hit_cdf(params, double(k) * t_sym);
            const double rem = 1.0 - cdf[k - 1];
            cond_p[k] = rem > 0.0 ? std::clamp((cdf[k] - cdf[k - 1]) / rem, 0.0, 1.0) : 0.0;
        }
        if (with_tail) {
            const double rem = 1.0 - cdf.back();
            late_p = rem > 0.0 ? std::clamp((total_mass - cdf.back()) / rem, 0.0, 1.0) : 0.0;
            tail = true;
        }
    }

    size_t chain_bins() const { return cdf.size() - 1; }

    // Adds one pulse transmitted in interval `origin` (0-based) to clean[];
    // bins beyond the stream end are absorbed but fall outside the record.
    void add_pulse(std::vector<int64_t>& clean, size_t origin, std::mt19937_64& rng) const {
        const size_t n = clean.size();
        int64_t remaining = n_total;
        const size_t horizon = n - origin;
        const size_t bins = std::min(chain_bins(), horizon);
        for (size_t k = 1; k <= bins && remaining > 0; ++k) {
            std::binomial_distribution<int64_t> draw(remaining, cond_p[k]);
            const int64_t hits = draw(rng);
            clean[origin + k - 1] += hits;
            remaining -= hits;
        }
        if (!tail || horizon <= chain_bins() || remaining <= 0) return;
        std::binomial_distribution<int64_t> draw(remaining, late_p);
        const int64_t n_late = draw(rng);
        std::uniform_real_distribution<double> mass(cdf.back(), total_mass);
        for (int64_t j = 0; j < n_late; ++j) {
            const double t = detail::invert_hitting_cdf(params, mass(rng));
            size_t k = size_t(std::floor(t / t_sym)) + 1;
            if (k <= chain_bins()) k = chain_bins() + 1;  // numeric boundary guard
            const size_t idx = origin + k - 1;
            if (idx < n) clean[idx] += 1;
        }
    }
};

EmpiricalCounts simulate_impl(const SystemParams& params, const ChannelImpulseResponse& cir,
                              std::vector<uint8_t> sent, const Detector& det,
                              const SimConfig& cfg, std::mt19937_64& rng) {
    const size_t n = sent.size();
    const bool truncate = cfg.tail == SimConfig::Tail::truncate;
    // In full mode 64 sequential bins cover all but a sub-percent sliver of
    // the eventually-absorbed mass; the remainder is sampled per particle.
    const size_t chain_bins = truncate ? size_t(cir.memory) : size_t(64);
    const PulseSampler sampler(params, cir.t_sym, chain_bins, !truncate);

    std::vector<int64_t> clean(n, 0);
    for (size_t i = 0; i < n; ++i)
        if (sent[i]) sampler.add_pulse(clean, i, rng);

    EmpiricalCounts out;
    out.sent = std::move(sent);
    out.counts.resize(n);
    out.detected.resize(n);
    std::normal_distribution<double> noise(params.noise_mean, params.noise_std);
    for (size_t i = 0; i < n; ++i) {
        out.counts[i] = clean[i] + std::llround(noise(rng));
        out.detected[i] = double(out.counts[i]) >= det.threshold ? 1 : 0;
    }
    return out;
}

// Plug-in conditional entropy H(S | key) from per-(key, s) counts, bits.
double conditional_entropy(const std::vector<uint64_t>& cell, uint64_t total) {
    if (total == 0) return 0.0;
    double h = 0.0;
    for (size_t key = 0; key < cell.size() / 2; ++key) {
        const uint64_t n0 = cell[key * 2], n1 = cell[key * 2 + 1];
        const uint64_t nk = n0 + n1;
        if (nk == 0) continue;
        for (uint64_t ns : {n0, n1})
            if (ns) h -= double(ns) / double(total) * std::log2(double(ns) / double(nk));
    }
    return h;
}

}  // namespace

std::optional<double> sample_hitting_time(const SystemParams& params, std::mt19937_64& rng,
                                          double time_resolution) {
    if (!(time_resolution > 0.0) || time_resolution > 1e-4)
        throw std::invalid_argument("sample_hitting_time: time_resolution must lie in (0, 1e-4]");
    const double total_mass = params.receiver_radius / params.distance;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) >= total_mass) return std::nullopt;
    const double target = unit(rng) * total_mass;
    double lo = 0.0, hi = 1.0;
    while (hit_cdf(params, hi) < target) {
        hi *= 2.0;
        if (hi > 1e30)
            throw std::runtime_error("sample_hitting_time: bracketing failed");
    }
    while (hi - lo > time_resolution) {
        const double mid = 0.5 * (lo + hi);
        (hit_cdf(params, mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

EmpiricalCounts simulate_stream(const SystemParams& params, const ChannelImpulseResponse& cir,
                                const MarkovSource& src, const Detector& det,
                                const SimConfig& cfg) {
    validate_sim_config(cfg);
    std::mt19937_64 rng(cfg.seed);
    return simulate_impl(params, cir, sample_sequence(src, cfg.n_symbols, rng), det, cfg, rng);
}

EmpiricalCounts simulate_stream(const SystemParams& params, const ChannelImpulseResponse& cir,
                                const IndependentSource& src, const Detector& det,
                                const SimConfig& cfg) {
    validate_sim_config(cfg);
    std::mt19937_64 rng(cfg.seed);
    return simulate_impl(params, cir, sample_sequence(src, cfg.n_symbols, rng), det, cfg, rng);
}

EmpiricalTransitions empirical_transitions(const EmpiricalCounts& counts, int memory) {
    if (memory < 1 || memory > 30)
        throw std::invalid_argument("empirical_transitions: memory must lie in [1, 30]");
    const auto& sent = counts.sent;
    const auto& detected = counts.detected;
    if (sent.size() != detected.size())
        throw std::invalid_argument("empirical_transitions: sent/detected length mismatch");
    const size_t n = sent.size();
    const size_t start = size_t(memory - 1);
    if (n <= start)
        throw std::invalid_argument("empirical_transitions: stream shorter than the memory");

    EmpiricalTransitions out;
    out.memory = memory;
    const size_t n_hist = size_t(1) << (memory - 1);
    out.n_cell.assign(n_hist * 2, 0);
    out.n_one.assign(n_hist * 2, 0);

    uint32_t hist = 0;
    for (size_t k = 0; k < start; ++k) hist |= uint32_t(sent[k]) << k;
    for (size_t i = start; i < n; ++i) {
        const size_t cell = size_t(hist) * 2 + sent[i];
        out.n_cell[cell] += 1;
        out.n_one[cell] += detected[i];
        if (memory > 1) hist = (hist >> 1) | (uint32_t(sent[i]) << (memory - 2));
    }
    return out;
}

double empirical_mi(const EmpiricalCounts& counts, SourceKind source_kind,
                    IsiKnowledge isi, int memory) {
    if (memory < 1 || memory > 30)
        throw std::invalid_argument("empirical_mi: memory must lie in [1, 30]");
    const auto& sent = counts.sent;
    const auto& detected = counts.detected;
    if (sent.size() != detected.size())
        throw std::invalid_argument("empirical_mi: sent/detected length mismatch");
    const size_t n = sent.size();
    const size_t start = size_t(memory - 1);
    if (n <= std::max<size_t>(start, 1))
        throw std::invalid_argument("empirical_mi: stream shorter than the memory");

    double h_rate = 0.0;
    if (source_kind == SourceKind::markov) {
        const size_t rstart = std::max<size_t>(start, 1);
        std::vector<uint64_t> bigram(4, 0);
        for (size_t i = rstart; i < n; ++i) bigram[size_t(sent[i - 1]) * 2 + sent[i]] += 1;
        h_rate = conditional_entropy(bigram, n - rstart);
    } else {
        uint64_t ones = 0;
        for (size_t i = start; i < n; ++i) ones += sent[i];
        h_rate = binary_entropy(1.0 - double(ones) / double(n - start));
    }

    const size_t n_hist = size_t(1) << (memory - 1);
    const size_t n_keys = isi == IsiKnowledge::aware ? n_hist * 2 : 2;
    std::vector<uint64_t> cell(n_keys * 2, 0);
    uint32_t hist = 0;
    for (size_t k = 0; k < start; ++k) hist |= uint32_t(sent[k]) << k;
    for (size_t i = start; i < n; ++i) {
        const size_t key = isi == IsiKnowledge::aware ? size_t(hist) * 2 + detected[i]
                                                      : size_t(detected[i]);
        cell[key * 2 + sent[i]] += 1;
        if (memory > 1) hist = (hist >> 1) | (uint32_t(sent[i]) << (memory - 2));
    }
    return h_rate - conditional_entropy(cell, n - start);
}

bool binomial_ci_contains(uint64_t n, uint64_t x, double p, double two_sided_level) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("binomial_ci_contains: p must lie in [0, 1]");
    if (!(two_sided_level > 0.0 && two_sided_level < 1.0))
        throw std::invalid_argument("binomial_ci_contains: level must lie in (0, 1)");
    if (x > n) throw std::invalid_argument("binomial_ci_contains: x exceeds n");
    if (n == 0) return true;
    const boost::math::binomial_distribution<double> dist(double(n), p);
    const double half = two_sided_level / 2.0;
    const double lower_tail = cdf(dist, double(x));  // P(X <= x)
    const double upper_tail =
        x == 0 ? 1.0 : cdf(complement(dist, double(x) - 1.0));  // P(X >= x)
    return lower_tail >= half && upper_tail >= half;
}

namespace detail {

std::vector<int64_t> sample_pulse_bins(const SystemParams& params, double t_sym,
                                       size_t max_bins, std::mt19937_64& rng) {
    if (max_bins == 0 || !(t_sym > 0.0))
        throw std::invalid_argument("sample_pulse_bins: need max_bins >= 1 and t_sym > 0");
    const size_t chain = std::min<size_t>(max_bins, 64);
    const PulseSampler sampler(params, t_sym, chain, max_bins > chain);
    std::vector<int64_t> bins(max_bins, 0);
    sampler.add_pulse(bins, 0, rng);
    return bins;
}

double invert_hitting_cdf(const SystemParams& params, double u) {
    const double total_mass = params.receiver_radius / params.distance;
    if (!(u > 0.0) || !(u < total_mass))
        throw std::domain_error("invert_hitting_cdf: u must lie in (0, R/d)");
    const double z = boost::math::erfc_inv(u / total_mass);
    const double gap = params.distance - params.receiver_radius;
    const double root = gap / (2.0 * z);
    return root * root / params.diffusion_coeff;
}

}  // namespace detail

}  // namespace mcair
