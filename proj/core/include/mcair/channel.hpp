#pragma once
// Diffusion-channel physics: cumulative absorption curve, per-interval
// hitting probabilities, effective memory length, Gaussian validity.

#include <stdexcept>
#include <string>
#include <vector>

namespace mcair {

// Physical constants of the link plus external-noise moments.
// Lengths in um, diffusion in um^2/s, times in s, counts dimensionless.
struct SystemParams {
    double n_released = 1e4;       // molecules released per "1" pulse
    double receiver_radius = 1.0;  // absorbing sphere radius
    double distance = 10.0;        // transmitter to receiver center
    double diffusion_coeff = 79.4;
    double noise_mean = 50.0;      // external molecule count, mean
    double noise_std = 50.0;       // external molecule count, std (> 0)
    double alpha = 1e-3;           // negligible-hitting threshold

    // Throws std::invalid_argument naming the violated invariant.
    void validate() const;
};

// h_1..h_M for one symbol interval choice, with the memory solve metadata.
struct ChannelImpulseResponse {
    double t_sym = 0.0;
    double t_alpha = 0.0;
    int memory = 0;                // M = ceil(t_alpha / t_sym)
    bool degenerate = false;       // window never reaches alpha even at peak
    std::vector<double> h;         // h[i-1] = per-interval hit probability
};

struct MemoryResult {
    double t_alpha = 0.0;
    int memory = 0;
    bool degenerate = false;
};

// Thrown when the memory length needed exceeds the configured cap.
struct memory_overflow_error : std::runtime_error {
    int required_memory;
    int cap;
    memory_overflow_error(int required, int cap_);
};

inline constexpr int kDefaultMemoryCap = 22;

// Expected cumulative number of absorbed particles by time t for one pulse
// of params.n_released particles. Exact 0 at t = 0; throws on t < 0.
double expected_cumulative_absorbed(const SystemParams& params, double t);

// Probability that one particle is absorbed within the i-th interval
// (i >= 1) of width t_sym.
double hitting_probability(const SystemParams& params, double t_sym, int i);

// Solves for the time t_alpha past which the per-interval hit probability
// stays below params.alpha (root on the decreasing branch of the window
// probability, residual <= 1e-12), and M = ceil(t_alpha / t_sym).
// Degenerate channels (peak below alpha) report memory = 1 with the flag.
MemoryResult effective_memory(const SystemParams& params, double t_sym,
                              int memory_cap = kDefaultMemoryCap);

ChannelImpulseResponse compute_cir(const SystemParams& params, double t_sym,
                                   int memory_cap = kDefaultMemoryCap);

// Per-tap check that the Gaussian approximation of the binomial count is
// sound: n_released * h / (1 - h) must exceed 9.
struct GaussianValidity {
    std::vector<double> ratio;   // n_released * h_i / (1 - h_i)
    std::vector<bool> tap_ok;    // ratio > 9
    bool all_ok = false;
};

GaussianValidity validate_gaussian(const SystemParams& params,
                                   const ChannelImpulseResponse& cir);

}  // namespace mcair
