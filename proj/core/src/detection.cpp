#include "mcair/detection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcair {

double q_function(double z) {
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

ConditionalGaussian conditional_moments(const ChannelImpulseResponse& cir,
                                        const SystemParams& params,
                                        uint32_t history, int s) {
    const int memory = cir.memory;
    if (memory < 1 || cir.h.size() != size_t(memory))
        throw std::invalid_argument("conditional_moments: impulse response is inconsistent");
    if (memory > 1 && (history >> (memory - 1)) != 0)
        throw std::invalid_argument("conditional_moments: history wider than M - 1 bits");
    if (memory == 1 && history != 0)
        throw std::invalid_argument("conditional_moments: history wider than M - 1 bits");
    if (s != 0 && s != 1)
        throw std::invalid_argument("conditional_moments: s must be 0 or 1");

    double mean = params.noise_mean;
    double variance = params.noise_std * params.noise_std;
    if (s == 1) {
        mean += params.n_released * cir.h[0];
        variance += params.n_released * cir.h[0] * (1.0 - cir.h[0]);
    }
    // Tap j (2..M) carries the symbol s_{i-j+1}, stored at history bit M - j.
    for (int j = 2; j <= memory; ++j) {
        if ((history >> (memory - j)) & 1u) {
            const double h = cir.h[size_t(j - 1)];
            mean += params.n_released * h;
            variance += params.n_released * h * (1.0 - h);
        }
    }
    return {mean, variance};
}

double transition_probability(const ChannelImpulseResponse& cir,
                              const SystemParams& params, const Detector& det,
                              uint32_t history, int s, int s_hat) {
    if (s_hat != 0 && s_hat != 1)
        throw std::invalid_argument("transition_probability: s_hat must be 0 or 1");
    const ConditionalGaussian g = conditional_moments(cir, params, history, s);
    const double p1 = std::clamp(
        q_function((det.threshold - g.mean) / std::sqrt(g.variance)), 0.0, 1.0);
    return s_hat ? p1 : 1.0 - p1;
}

TransitionTable build_transition_table(const ChannelImpulseResponse& cir,
                                       const SystemParams& params,
                                       const Detector& det) {
    const int memory = cir.memory;
    if (memory < 1 || memory > 30)
        throw std::invalid_argument("build_transition_table: memory out of range");
    const size_t n = size_t(1) << (memory - 1);
    TransitionTable table;
    table.memory = memory;
    table.p1_given_s0.resize(n);
    table.p1_given_s1.resize(n);
    for (size_t omega = 0; omega < n; ++omega) {
        table.p1_given_s0[omega] =
            transition_probability(cir, params, det, uint32_t(omega), 0, 1);
        table.p1_given_s1[omega] =
            transition_probability(cir, params, det, uint32_t(omega), 1, 1);
    }
    return table;
}

}  // namespace mcair
