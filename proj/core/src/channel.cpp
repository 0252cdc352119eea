#include "mcair/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mcair {

namespace {

// Per-particle probability of absorption by time t: (R/d) erfc((d-R)/(2 sqrt(D t))).
// erfc is evaluated directly (never 1 - erf): the per-interval probabilities
// are differences of near-equal values for large arguments.
double hit_cdf(const SystemParams& params, double t) {
    if (t <= 0.0) return 0.0;  // exact limit; avoids erfc(inf) overflow paths
    const double arg = (params.distance - params.receiver_radius) /
                       (2.0 * std::sqrt(params.diffusion_coeff * t));
    return (params.receiver_radius / params.distance) * std::erfc(arg);
}

// Probability of absorption within a window [t, t + t_sym].
double window_probability(const SystemParams& params, double t_sym, double t) {
    return hit_cdf(params, t + t_sym) - hit_cdf(params, t);
}

}  // namespace

memory_overflow_error::memory_overflow_error(int required, int cap_)
    : std::runtime_error("effective memory M = " + std::to_string(required) +
                         " exceeds the configured cap " + std::to_string(cap_)),
      required_memory(required),
      cap(cap_) {}

void SystemParams::validate() const {
    if (!(n_released >= 1.0))
        throw std::invalid_argument("SystemParams: n_released must be >= 1");
    if (!(receiver_radius > 0.0))
        throw std::invalid_argument("SystemParams: receiver_radius must be > 0");
    if (!(distance > receiver_radius))
        throw std::invalid_argument("SystemParams: distance must exceed receiver_radius");
    if (!(diffusion_coeff > 0.0))
        throw std::invalid_argument("SystemParams: diffusion_coeff must be > 0");
    if (!(noise_std > 0.0))
        throw std::invalid_argument("SystemParams: noise_std must be > 0");
    if (!(alpha > 0.0 && alpha < receiver_radius / distance))
        throw std::invalid_argument(
            "SystemParams: alpha must satisfy 0 < alpha < receiver_radius/distance");
}

double expected_cumulative_absorbed(const SystemParams& params, double t) {
    params.validate();
    if (t < 0.0) throw std::domain_error("expected_cumulative_absorbed: t must be >= 0");
    return params.n_released * hit_cdf(params, t);
}

double hitting_probability(const SystemParams& params, double t_sym, int i) {
    params.validate();
    if (!(t_sym > 0.0)) throw std::invalid_argument("hitting_probability: t_sym must be > 0");
    if (i < 1) throw std::invalid_argument("hitting_probability: interval index must be >= 1");
    const double h = hit_cdf(params, double(i) * t_sym) - hit_cdf(params, double(i - 1) * t_sym);
    return std::max(h, 0.0);
}

MemoryResult effective_memory(const SystemParams& params, double t_sym, int memory_cap) {
    params.validate();
    if (!(t_sym > 0.0)) throw std::invalid_argument("effective_memory: t_sym must be > 0");
    if (memory_cap < 1) throw std::invalid_argument("effective_memory: memory cap must be >= 1");

    // Locate the peak of the window probability by a coarse geometric scan
    // t = t_sym * 2^k, then tighten with a golden-section pass so the
    // degenerate case (peak below alpha) is decided reliably.
    const double alpha = params.alpha;
    double scan_t = t_sym;
    while (scan_t > 1e-9) scan_t *= 0.5;  // start far below any peak location
    double peak_t = scan_t;
    double peak_w = window_probability(params, t_sym, scan_t);
    double hi = scan_t;
    double hi_w = peak_w;
    while (true) {
        hi *= 2.0;
        hi_w = window_probability(params, t_sym, hi);
        if (hi_w > peak_w) {
            peak_w = hi_w;
            peak_t = hi;
        }
        // Past the peak and below alpha: the decreasing branch is bracketed.
        if (hi > peak_t && hi_w < alpha) break;
        if (hi > 1e30)
            throw std::runtime_error("effective_memory: window probability never fell below alpha");
    }

    // Golden-section refinement of the peak over [peak_t/2, peak_t*2].
    {
        constexpr double kInvPhi = 0.6180339887498949;
        double a = peak_t * 0.5, b = std::min(peak_t * 2.0, hi);
        double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
        double f1 = window_probability(params, t_sym, x1);
        double f2 = window_probability(params, t_sym, x2);
        for (int it = 0; it < 80 && (b - a) > 1e-10 * (1.0 + b); ++it) {
            if (f1 >= f2) {
                b = x2; x2 = x1; f2 = f1;
                x1 = b - kInvPhi * (b - a);
                f1 = window_probability(params, t_sym, x1);
            } else {
                a = x1; x1 = x2; f1 = f2;
                x2 = a + kInvPhi * (b - a);
                f2 = window_probability(params, t_sym, x2);
            }
        }
        const double refined = std::max(f1, f2);
        if (refined > peak_w) {
            peak_w = refined;
            peak_t = f1 >= f2 ? x1 : x2;
        }
    }

    if (peak_w < alpha) {
        // The window never reaches alpha: no finite crossing, memory collapses.
        return {0.0, 1, true};
    }

    // Regula falsi on the decreasing branch, bracket [peak_t, hi], residual
    // target 1e-12 in probability (Illinois weighting prevents stagnation).
    double a = peak_t, b = hi;
    double fa = window_probability(params, t_sym, a) - alpha;
    double fb = window_probability(params, t_sym, b) - alpha;
    double root = a, froot = fa;
    bool converged = false;
    int last_side = 0;
    for (int it = 0; it < 200; ++it) {
        root = (a * fb - b * fa) / (fb - fa);
        froot = window_probability(params, t_sym, root) - alpha;
        if (std::abs(froot) <= 1e-12) {
            converged = true;
            break;
        }
        if (froot * fa > 0.0) {
            a = root;
            fa = froot;
            if (last_side == -1) fb *= 0.5;
            last_side = -1;
        } else {
            b = root;
            fb = froot;
            if (last_side == +1) fa *= 0.5;
            last_side = +1;
        }
    }
    if (!converged)
        throw std::runtime_error(
            "effective_memory: root refinement did not reach the 1e-12 residual in 200 iterations");

    const double t_alpha = root;
    const double m_real = std::ceil(t_alpha / t_sym);
    if (m_real > double(memory_cap)) {
        const int required = m_real > 2.0e9 ? std::numeric_limits<int>::max() : int(m_real);
        throw memory_overflow_error(required, memory_cap);
    }
    const int memory = std::max(1, int(m_real));
    return {t_alpha, memory, false};
}

ChannelImpulseResponse compute_cir(const SystemParams& params, double t_sym, int memory_cap) {
    const MemoryResult mem = effective_memory(params, t_sym, memory_cap);
    ChannelImpulseResponse cir;
    cir.t_sym = t_sym;
    cir.t_alpha = mem.t_alpha;
    cir.memory = mem.memory;
    cir.degenerate = mem.degenerate;
    cir.h.resize(size_t(mem.memory));
    for (int i = 1; i <= mem.memory; ++i)
        cir.h[size_t(i - 1)] = hitting_probability(params, t_sym, i);
    return cir;
}

GaussianValidity validate_gaussian(const SystemParams& params,
                                   const ChannelImpulseResponse& cir) {
    GaussianValidity report;
    report.ratio.reserve(cir.h.size());
    report.tap_ok.reserve(cir.h.size());
    report.all_ok = true;
    for (double h : cir.h) {
        const double ratio = params.n_released * h / (1.0 - h);
        const bool ok = ratio > 9.0;
        report.ratio.push_back(ratio);
        report.tap_ok.push_back(ok);
        report.all_ok = report.all_ok && ok;
    }
    return report;
}

}  // namespace mcair
