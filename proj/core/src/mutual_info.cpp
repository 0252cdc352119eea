#include "mcair/mutual_info.hpp"

#include <algorithm>
#include <stdexcept>

#include "kernel.hpp"

namespace mcair {

namespace {

MIResult clip(double raw) {
    return {std::max(raw, 0.0), raw, raw < 0.0};
}

template <class Source>
MIResult evaluate(const ChannelImpulseResponse& cir, const SystemParams& params,
                  const Detector& det, const Source& src, IsiKnowledge isi) {
    detail::HistoryKernel kernel(cir, params);
    kernel.set_source(src);
    detail::TauTable table;
    kernel.fill_tau_table(det.threshold, table);
    const double raw = isi == IsiKnowledge::aware ? kernel.mi_aware_raw(table)
                                                  : kernel.mi_unaware_raw(table);
    return clip(raw);
}

// P(s = 1 | s_{i-1} = last bit of the history); the empty history (M = 1)
// falls back to the stationary / marginal law.
double one_step_prior(int memory, uint32_t history, const MarkovSource& src) {
    if (memory >= 2) {
        const unsigned last = (history >> (memory - 2)) & 1u;
        return last ? 1.0 - src.q : src.p;
    }
    return stationary_distribution(src).pi1;
}

double one_step_prior(int memory, uint32_t history, const IndependentSource& src) {
    (void)memory;
    (void)history;
    return 1.0 - src.lambda0;
}

template <class Source>
double posterior(const TransitionTable& table, const Source& src, uint32_t history,
                 int s_hat, int s) {
    if (history >= table.histories())
        throw std::invalid_argument("posterior_given_history: history wider than M - 1 bits");
    if ((s_hat != 0 && s_hat != 1) || (s != 0 && s != 1))
        throw std::invalid_argument("posterior_given_history: s and s_hat must be 0 or 1");
    const double c1 = one_step_prior(table.memory, history, src);
    const double joint0 = table.entry(history, 0, s_hat) * (1.0 - c1);
    const double joint1 = table.entry(history, 1, s_hat) * c1;
    const double den = joint0 + joint1;
    if (den <= 0.0) return 0.0;  // impossible conditioning event
    return (s ? joint1 : joint0) / den;
}

}  // namespace

MIResult mi_isia_markov(const ChannelImpulseResponse& cir, const SystemParams& params,
                        const Detector& det, const MarkovSource& src) {
    return evaluate(cir, params, det, src, IsiKnowledge::aware);
}

MIResult mi_isiu_markov(const ChannelImpulseResponse& cir, const SystemParams& params,
                        const Detector& det, const MarkovSource& src) {
    return evaluate(cir, params, det, src, IsiKnowledge::unaware);
}

MIResult mi_isia_independent(const ChannelImpulseResponse& cir, const SystemParams& params,
                             const Detector& det, const IndependentSource& src) {
    return evaluate(cir, params, det, src, IsiKnowledge::aware);
}

MIResult mi_isiu_independent(const ChannelImpulseResponse& cir, const SystemParams& params,
                             const Detector& det, const IndependentSource& src) {
    return evaluate(cir, params, det, src, IsiKnowledge::unaware);
}

double posterior_given_history(const TransitionTable& table, const MarkovSource& src,
                               uint32_t history, int s_hat, int s) {
    return posterior(table, src, history, s_hat, s);
}

double posterior_given_history(const TransitionTable& table, const IndependentSource& src,
                               uint32_t history, int s_hat, int s) {
    return posterior(table, src, history, s_hat, s);
}

}  // namespace mcair
