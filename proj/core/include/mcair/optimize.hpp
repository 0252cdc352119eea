#pragma once
// Brute-force maximization: MI over the detector threshold, then AIR over
// the input-distribution grid; capacity curves and AIR surfaces.

#include <string>
#include <vector>

#include "mcair/channel.hpp"
#include "mcair/mutual_info.hpp"

namespace mcair {

// Threshold search policy: coarse scan of [lo, hi], then refine_rounds
// passes that shrink the span by 0.2 around the incumbent, same step count.
struct ThresholdSearch {
    double lo = 0.0;
    double hi = 0.0;
    int coarse_steps = 256;  // >= 16
    int refine_rounds = 3;
};

// Step counts only; lo/hi derived from the channel per search bounds below.
struct SearchSettings {
    int coarse_steps = 256;
    int refine_rounds = 3;
};

// lo = mu_E - 4 sigma_E; hi = mu_E + N_T sum(h) + 4 sqrt(sigma_E^2 +
// N_T sum(h(1-h))): spans the support of every conditional Gaussian.
ThresholdSearch default_threshold_search(const ChannelImpulseResponse& cir,
                                         const SystemParams& params,
                                         const SearchSettings& settings = {});

struct ThresholdResult {
    double tau = 0.0;
    MIResult mi;
};

struct CapacityResult {
    double air = 0.0;      // bits/s
    double mi = 0.0;       // bits/use
    double t_sym = 0.0;
    double tau = 0.0;
    double param1 = 0.0;   // p (Markov) or lambda0 (independent)
    double param2 = 0.0;   // q (Markov); NaN for independent
    int memory = 0;
    bool clipped = false;
};

double air(double mi, double t_sym);

// Best tau on the coarse+refined grids; ties toward the smallest tau.
ThresholdResult optimize_threshold(IsiKnowledge isi, const ChannelImpulseResponse& cir,
                                   const SystemParams& params, const MarkovSource& src,
                                   const ThresholdSearch& search);
ThresholdResult optimize_threshold(IsiKnowledge isi, const ChannelImpulseResponse& cir,
                                   const SystemParams& params, const IndependentSource& src,
                                   const ThresholdSearch& search);

// Exhaustive scan over the input grid {step, 2 step, ..., 1 - step} (squared
// for Markov), each point threshold-optimized; lexicographic tie-break
// toward smaller parameters. Deterministic for any worker count.
CapacityResult capacity(const Scenario& scenario, const SystemParams& params,
                        double t_sym, double grid_step,
                        const SearchSettings& settings = {}, int workers = 1,
                        int memory_cap = kDefaultMemoryCap);

struct SweepPoint {
    double t_sym = 0.0;
    bool skipped = false;   // memory overflow at this t_sym
    std::string error;      // reason when skipped
    CapacityResult result;  // valid when !skipped
};

std::vector<SweepPoint> capacity_sweep(const Scenario& scenario, const SystemParams& params,
                                       double t_min, double t_max, double t_step,
                                       double grid_step, const SearchSettings& settings = {},
                                       int workers = 1, int memory_cap = kDefaultMemoryCap);

struct SurfacePoint {
    double param1 = 0.0;
    double param2 = 0.0;  // NaN for independent sources
    double tau = 0.0;
    double air = 0.0;
    double mi = 0.0;
};

struct Surface {
    std::vector<SurfacePoint> points;  // row-major, ascending param1 then param2
    CapacityResult best;
};

Surface air_surface(const Scenario& scenario, const SystemParams& params, double t_sym,
                    double grid_step, const SearchSettings& settings = {}, int workers = 1,
                    int memory_cap = kDefaultMemoryCap);

}  // namespace mcair
