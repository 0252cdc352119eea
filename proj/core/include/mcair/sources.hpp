#pragma once
// Binary sources: first-order Markov chain and independent (Bernoulli),
// with stationary law, entropy rate, sequence probabilities, and sampling.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace mcair {

struct MarkovSource {
    double p = 0.5;  // P(1 | previous 0)
    double q = 0.5;  // P(0 | previous 1)
};

struct IndependentSource {
    double lambda0 = 0.5;  // P(0)
};

struct StationaryDist {
    double pi0 = 0.5;
    double pi1 = 0.5;
};

// -x log2 x - (1-x) log2(1-x), with 0 log 0 = 0. Throws on x outside [0,1].
double binary_entropy(double x);

// pi0 = q/(p+q), pi1 = p/(p+q). Throws when p = q = 0 (two absorbing states).
StationaryDist stationary_distribution(const MarkovSource& src);

// pi0 H2(p) + pi1 H2(q), bits per symbol.
double entropy_rate_markov(const MarkovSource& src);

// Probability of a bit sequence whose first symbol follows the stationary
// law. Computed in the log domain so grid-extreme parameters do not
// underflow for long sequences.
double sequence_probability(const MarkovSource& src, std::span<const uint8_t> seq);
double sequence_probability(const IndependentSource& src, std::span<const uint8_t> seq);

// First symbol from the stationary law (Markov) or Bernoulli(1 - lambda0).
std::vector<uint8_t> sample_sequence(const MarkovSource& src, size_t n, std::mt19937_64& rng);
std::vector<uint8_t> sample_sequence(const IndependentSource& src, size_t n, std::mt19937_64& rng);

}  // namespace mcair
