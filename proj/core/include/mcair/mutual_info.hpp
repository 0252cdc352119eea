#pragma once
// The four closed-form per-use information quantities of the threshold-
// detected channel: {Markov, independent} x {ISI-aware, ISI-unaware}.
//
// Aware: source entropy rate minus H(S_i | past M-1 symbols, S_hat_i),
// marginalized over the stationary history law. Unaware: entropy rate
// minus H(S_i | S_hat_i) of the history-marginalized joint; this bound can
// go negative and is clipped at zero (the flag records when that happened).

#include <cstdint>

#include "mcair/channel.hpp"
#include "mcair/detection.hpp"
#include "mcair/sources.hpp"

namespace mcair {

enum class SourceKind { markov, independent };
enum class IsiKnowledge { aware, unaware };

struct Scenario {
    SourceKind source = SourceKind::markov;
    IsiKnowledge isi = IsiKnowledge::aware;
};

struct MIResult {
    double mi = 0.0;       // bits per channel use, after {.}^+ clipping
    double raw = 0.0;      // pre-clip value (diagnostic)
    bool clipped = false;  // true iff raw < 0
};

MIResult mi_isia_markov(const ChannelImpulseResponse& cir, const SystemParams& params,
                        const Detector& det, const MarkovSource& src);
MIResult mi_isiu_markov(const ChannelImpulseResponse& cir, const SystemParams& params,
                        const Detector& det, const MarkovSource& src);
MIResult mi_isia_independent(const ChannelImpulseResponse& cir, const SystemParams& params,
                             const Detector& det, const IndependentSource& src);
MIResult mi_isiu_independent(const ChannelImpulseResponse& cir, const SystemParams& params,
                             const Detector& det, const IndependentSource& src);

// P(s | history, s_hat) by Bayes inversion of the transition table with the
// source's one-step prior. Conditioning events of probability zero return 0
// (such terms are skipped by the entropy sums and never consumed elsewhere).
double posterior_given_history(const TransitionTable& table, const MarkovSource& src,
                               uint32_t history, int s_hat, int s);
double posterior_given_history(const TransitionTable& table, const IndependentSource& src,
                               uint32_t history, int s_hat, int s);

}  // namespace mcair
