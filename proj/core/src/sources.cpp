#include "mcair/sources.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcair {

namespace {

// log of a probability factor; -inf encodes an exactly-impossible factor,
// which exp() maps back to an exact 0.
double log_or_neg_inf(double value) {
    return value > 0.0 ? std::log(value) : -std::numeric_limits<double>::infinity();
}

}  // namespace

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("binary_entropy: argument must lie in [0, 1]");
    double acc = 0.0;
    if (x > 0.0) acc -= x * std::log2(x);
    if (x < 1.0) acc -= (1.0 - x) * std::log2(1.0 - x);
    return acc;
}

StationaryDist stationary_distribution(const MarkovSource& src) {
    if (!(src.p >= 0.0 && src.p <= 1.0 && src.q >= 0.0 && src.q <= 1.0))
        throw std::invalid_argument("stationary_distribution: p and q must lie in [0, 1]");
    if (src.p + src.q <= 0.0)
        throw std::invalid_argument(
            "stationary_distribution: p + q must be > 0 (p = q = 0 has no unique stationary law)");
    return {src.q / (src.p + src.q), src.p / (src.p + src.q)};
}

double entropy_rate_markov(const MarkovSource& src) {
    const StationaryDist st = stationary_distribution(src);
    return st.pi0 * binary_entropy(src.p) + st.pi1 * binary_entropy(src.q);
}

double sequence_probability(const MarkovSource& src, std::span<const uint8_t> seq) {
    if (seq.empty())
        throw std::invalid_argument("sequence_probability: sequence must be non-empty");
    const StationaryDist st = stationary_distribution(src);
    double log_p = log_or_neg_inf(seq[0] ? st.pi1 : st.pi0);
    for (size_t i = 1; i < seq.size(); ++i) {
        const double step = seq[i - 1] ? (seq[i] ? 1.0 - src.q : src.q)
                                       : (seq[i] ? src.p : 1.0 - src.p);
        log_p += log_or_neg_inf(step);
    }
    return std::exp(log_p);
}

double sequence_probability(const IndependentSource& src, std::span<const uint8_t> seq) {
    if (seq.empty())
        throw std::invalid_argument("sequence_probability: sequence must be non-empty");
    if (!(src.lambda0 >= 0.0 && src.lambda0 <= 1.0))
        throw std::invalid_argument("sequence_probability: lambda0 must lie in [0, 1]");
    size_t ones = 0;
    for (uint8_t b : seq) ones += b ? 1 : 0;
    const size_t zeros = seq.size() - ones;
    double log_p = 0.0;
    if (zeros > 0) log_p += double(zeros) * log_or_neg_inf(src.lambda0);
    if (ones > 0) log_p += double(ones) * log_or_neg_inf(1.0 - src.lambda0);
    return std::exp(log_p);
}

std::vector<uint8_t> sample_sequence(const MarkovSource& src, size_t n, std::mt19937_64& rng) {
    if (n == 0)
        throw std::invalid_argument("sample_sequence: length must be >= 1");
    const StationaryDist st = stationary_distribution(src);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<uint8_t> seq(n);
    seq[0] = unit(rng) < st.pi1 ? 1 : 0;
    for (size_t i = 1; i < n; ++i) {
        const double p1 = seq[i - 1] ? 1.0 - src.q : src.p;
        seq[i] = unit(rng) < p1 ? 1 : 0;
    }
    return seq;
}

std::vector<uint8_t> sample_sequence(const IndependentSource& src, size_t n,
                                     std::mt19937_64& rng) {
    if (n == 0)
        throw std::invalid_argument("sample_sequence: length must be >= 1");
    if (!(src.lambda0 >= 0.0 && src.lambda0 <= 1.0))
        throw std::invalid_argument("sample_sequence: lambda0 must lie in [0, 1]");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<uint8_t> seq(n);
    const double lambda1 = 1.0 - src.lambda0;
    for (size_t i = 0; i < n; ++i) seq[i] = unit(rng) < lambda1 ? 1 : 0;
    return seq;
}

}  // namespace mcair
