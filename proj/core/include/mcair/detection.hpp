#pragma once
// Conditional Gaussian statistics of the received count and the transition
// probabilities of the memoryless threshold detector.
//
// History encoding: an (M-1)-bit word over the symbols s_{i-M+1}..s_{i-1}.
// The least-significant bit is the oldest symbol s_{i-M+1}; bit (M-2) is
// the most recent past symbol s_{i-1}. Tap j (2 <= j <= M) therefore reads
// history bit (M-j).

#include <cstdint>
#include <vector>

#include "mcair/channel.hpp"

namespace mcair {

struct ConditionalGaussian {
    double mean = 0.0;
    double variance = 0.0;
};

struct Detector {
    double threshold = 0.0;  // decide 1 iff count >= threshold
};

// Q(z) = P(N(0,1) >= z) = erfc(z / sqrt(2)) / 2.
double q_function(double z);

// Mean/variance of the count in the current interval given the past M-1
// symbols (history word) and the current symbol s.
ConditionalGaussian conditional_moments(const ChannelImpulseResponse& cir,
                                        const SystemParams& params,
                                        uint32_t history, int s);

// P(s_hat | history, s) for the threshold rule under the Gaussian model.
double transition_probability(const ChannelImpulseResponse& cir,
                              const SystemParams& params, const Detector& det,
                              uint32_t history, int s, int s_hat);

// P(s_hat = 1 | history, s) tabulated over all 2^(M-1) histories.
struct TransitionTable {
    int memory = 0;
    std::vector<double> p1_given_s0;  // index = history word
    std::vector<double> p1_given_s1;

    size_t histories() const { return p1_given_s0.size(); }
    double entry(uint32_t history, int s, int s_hat) const {
        double p1 = s ? p1_given_s1[history] : p1_given_s0[history];
        return s_hat ? p1 : 1.0 - p1;
    }
};

TransitionTable build_transition_table(const ChannelImpulseResponse& cir,
                                       const SystemParams& params,
                                       const Detector& det);

}  // namespace mcair
