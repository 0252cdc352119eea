#include "mcair/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <variant>

#include "kernel.hpp"

namespace mcair {

namespace {

constexpr size_t kTableCacheBytes = size_t(768) << 20;

// All thresholds evaluated during a search lie on one lattice
// lo + key * delta_fine with delta_fine = (hi - lo) / ((steps - 1) * 5^rounds):
// the coarse pass uses keys k * 5^rounds and each refinement round shrinks
// the span by exactly 0.2 around the incumbent with the same step count, so
// round r steps by 5^(rounds - r). Keying tables by the integer lattice index
// lets every grid point of a capacity scan share them.
struct TauLattice {
    double lo = 0.0;
    double delta_fine = 0.0;
    int steps = 0;
    int rounds = 0;
    int64_t coarse_stride = 1;  // 5^rounds

    TauLattice(const ThresholdSearch& search) {
        if (!(search.lo < search.hi))
            throw std::invalid_argument("ThresholdSearch: lo must be below hi");
        if (search.coarse_steps < 16)
            throw std::invalid_argument("ThresholdSearch: coarse_steps must be >= 16");
        if (search.refine_rounds < 0)
            throw std::invalid_argument("ThresholdSearch: refine_rounds must be >= 0");
        lo = search.lo;
        steps = search.coarse_steps;
        rounds = search.refine_rounds;
        for (int r = 0; r < rounds; ++r) coarse_stride *= 5;
        delta_fine = (search.hi - search.lo) / (double(steps - 1) * double(coarse_stride));
    }

    double tau_at(int64_t key) const { return lo + double(key) * delta_fine; }
};

struct TableCache {
    std::vector<detail::TauTable> coarse;  // pinned, index = coarse step
    std::unordered_map<int64_t, detail::TauTable> refined;
    size_t refined_bytes = 0;

    detail::TauTable& get(const detail::HistoryKernel& kernel, const TauLattice& lattice,
                          int64_t key) {
        if (key >= 0 && key % lattice.coarse_stride == 0) {
            const int64_t slot = key / lattice.coarse_stride;
            if (slot < int64_t(lattice.steps)) {
                if (coarse.empty()) coarse.resize(size_t(lattice.steps));
                detail::TauTable& table = coarse[size_t(slot)];
                if (!table.filled()) kernel.fill_tau_table(lattice.tau_at(key), table);
                return table;
            }
        }
        auto it = refined.find(key);
        if (it != refined.end()) return it->second;
        // A full cache only costs rebuild time; values are unaffected.
        if (refined_bytes > kTableCacheBytes) {
            refined.clear();
            refined_bytes = 0;
        }
        detail::TauTable& table = refined[key];
        kernel.fill_tau_table(lattice.tau_at(key), table);
        refined_bytes += table.bytes();
        return table;
    }
};

struct SearchOutcome {
    int64_t key = 0;
    double tau = 0.0;
    double mi = -std::numeric_limits<double>::infinity();
    double raw = 0.0;
};

// Coarse scan plus refinement rounds; ties go to the smaller threshold.
SearchOutcome search_threshold(detail::HistoryKernel& kernel, const TauLattice& lattice,
                               TableCache& cache, IsiKnowledge isi) {
    SearchOutcome best;
    auto eval = [&](int64_t key) {
        const double tau = lattice.tau_at(key);
        const detail::TauTable& table = cache.get(kernel, lattice, key);
        const double raw = isi == IsiKnowledge::aware ? kernel.mi_aware_raw(table)
                                                      : kernel.mi_unaware_raw(table);
        const double mi = std::max(raw, 0.0);
        if (mi > best.mi || (mi == best.mi && tau < best.tau)) best = {key, tau, mi, raw};
    };
    for (int k = 0; k < lattice.steps; ++k) eval(int64_t(k) * lattice.coarse_stride);
    int64_t stride = lattice.coarse_stride;
    for (int r = 1; r <= lattice.rounds; ++r) {
        stride /= 5;
        const int64_t center = best.key;
        for (int k = 0; k < lattice.steps; ++k)
            eval(center + (int64_t(k) - lattice.steps / 2) * stride);
    }
    return best;
}

using SourceParams = std::variant<MarkovSource, IndependentSource>;

void apply_source(detail::HistoryKernel& kernel, const SourceParams& src) {
    std::visit([&](const auto& s) { kernel.set_source(s); }, src);
}

struct PointResult {
    double air = -std::numeric_limits<double>::infinity();
    double mi = 0.0;
    double tau = 0.0;
    double raw = 0.0;
    bool clipped = false;
};

PointResult evaluate_point(detail::HistoryKernel& kernel, const TauLattice& lattice,
                           TableCache& cache, IsiKnowledge isi, const SourceParams& src,
                           double t_sym) {
    apply_source(kernel, src);
    const SearchOutcome out = search_threshold(kernel, lattice, cache, isi);
    return {out.mi / t_sym, out.mi, out.tau, out.raw, out.raw < 0.0};
}

std::vector<double> probability_grid(double grid_step) {
    if (!(grid_step > 0.0 && grid_step < 1.0))
        throw std::invalid_argument("capacity: grid_step must lie in (0, 1)");
    const int count = int(std::lround(1.0 / grid_step)) - 1;
    if (count < 1)
        throw std::invalid_argument("capacity: grid_step leaves no interior grid points");
    std::vector<double> grid(size_t(count), 0.0);
    for (int k = 1; k <= count; ++k) grid[size_t(k - 1)] = double(k) * grid_step;
    return grid;
}

struct GridScan {
    std::vector<SourceParams> sources;
    std::vector<double> param1, param2;  // param2 = NaN for independent
    std::vector<double> entropy_bound;   // source entropy rate per point
};

GridScan make_grid(SourceKind kind, double grid_step) {
    const std::vector<double> grid = probability_grid(grid_step);
    GridScan scan;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (kind == SourceKind::markov) {
        scan.sources.reserve(grid.size() * grid.size());
        for (double p : grid)
            for (double q : grid) {
                scan.sources.emplace_back(MarkovSource{p, q});
                scan.param1.push_back(p);
                scan.param2.push_back(q);
                scan.entropy_bound.push_back(entropy_rate_markov({p, q}));
            }
    } else {
        scan.sources.reserve(grid.size());
        for (double lambda0 : grid) {
            scan.sources.emplace_back(IndependentSource{lambda0});
            scan.param1.push_back(lambda0);
            scan.param2.push_back(nan);
            scan.entropy_bound.push_back(binary_entropy(lambda0));
        }
    }
    return scan;
}

// Contiguous chunks in scan order keep the lexicographic tie-break (smaller
// parameters win) intact when the per-worker bests are merged in order.
std::vector<std::pair<size_t, size_t>> chunk_ranges(size_t total, int workers) {
    const size_t w = size_t(std::max(workers, 1));
    std::vector<std::pair<size_t, size_t>> ranges;
    const size_t base = total / w, extra = total % w;
    size_t begin = 0;
    for (size_t i = 0; i < w && begin < total; ++i) {
        const size_t len = base + (i < extra ? 1 : 0);
        ranges.emplace_back(begin, std::min(begin + len, total));
        begin += len;
    }
    return ranges;
}

}  // namespace

double air(double mi, double t_sym) {
    if (!(t_sym > 0.0)) throw std::invalid_argument("air: t_sym must be > 0");
    return mi / t_sym;
}

ThresholdSearch default_threshold_search(const ChannelImpulseResponse& cir,
                                         const SystemParams& params,
                                         const SearchSettings& settings) {
    double sum_h = 0.0, sum_hv = 0.0;
    for (double h : cir.h) {
        sum_h += h;
        sum_hv += h * (1.0 - h);
    }
    ThresholdSearch search;
    search.lo = params.noise_mean - 4.0 * params.noise_std;
    search.hi = params.noise_mean + params.n_released * sum_h +
                4.0 * std::sqrt(params.noise_std * params.noise_std +
                                params.n_released * sum_hv);
    search.coarse_steps = settings.coarse_steps;
    search.refine_rounds = settings.refine_rounds;
    return search;
}

namespace {

ThresholdResult optimize_threshold_impl(IsiKnowledge isi, const ChannelImpulseResponse& cir,
                                        const SystemParams& params, const SourceParams& src,
                                        const ThresholdSearch& search) {
    detail::HistoryKernel kernel(cir, params);
    apply_source(kernel, src);
    const TauLattice lattice(search);
    TableCache cache;
    const SearchOutcome out = search_threshold(kernel, lattice, cache, isi);
    return {out.tau, {out.mi, out.raw, out.raw < 0.0}};
}

}  // namespace

ThresholdResult optimize_threshold(IsiKnowledge isi, const ChannelImpulseResponse& cir,
                                   const SystemParams& params, const MarkovSource& src,
                                   const ThresholdSearch& search) {
    return optimize_threshold_impl(isi, cir, params, SourceParams{src}, search);
}

ThresholdResult optimize_threshold(IsiKnowledge isi, const ChannelImpulseResponse& cir,
                                   const SystemParams& params, const IndependentSource& src,
                                   const ThresholdSearch& search) {
    return optimize_threshold_impl(isi, cir, params, SourceParams{src}, search);
}

CapacityResult capacity(const Scenario& scenario, const SystemParams& params, double t_sym,
                        double grid_step, const SearchSettings& settings, int workers,
                        int memory_cap) {
    const ChannelImpulseResponse cir = compute_cir(params, t_sym, memory_cap);
    const ThresholdSearch base = default_threshold_search(cir, params, settings);
    const TauLattice lattice(base);
    const GridScan scan = make_grid(scenario.source, grid_step);
    const auto ranges = chunk_ranges(scan.sources.size(), workers);

    struct Candidate {
        size_t index = 0;
        PointResult point;
        bool valid = false;
    };
    std::vector<Candidate> bests(ranges.size());

    auto run_chunk = [&](size_t chunk) {
        detail::HistoryKernel kernel(cir, params);
        TableCache cache;
        Candidate best;
        for (size_t i = ranges[chunk].first; i < ranges[chunk].second; ++i) {
            // MI never exceeds the source entropy rate, so points whose rate
            // bound cannot beat the incumbent are skipped outright (strict
            // inequality keeps exact ties evaluated and the tie-break exact).
            if (best.valid && scan.entropy_bound[i] / t_sym < best.point.air) continue;
            const PointResult point =
                evaluate_point(kernel, lattice, cache, scenario.isi, scan.sources[i], t_sym);
            if (!best.valid || point.air > best.point.air) {
                best = {i, point, true};
            }
        }
        bests[chunk] = best;
    };

    if (ranges.size() <= 1) {
        if (!ranges.empty()) run_chunk(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(ranges.size());
        for (size_t c = 0; c < ranges.size(); ++c) pool.emplace_back(run_chunk, c);
        for (auto& t : pool) t.join();
    }

    Candidate winner;
    for (const Candidate& c : bests)
        if (c.valid && (!winner.valid || c.point.air > winner.point.air)) winner = c;
    if (!winner.valid) throw std::runtime_error("capacity: empty parameter grid");

    CapacityResult result;
    result.air = winner.point.air;
    result.mi = winner.point.mi;
    result.t_sym = t_sym;
    result.tau = winner.point.tau;
    result.param1 = scan.param1[winner.index];
    result.param2 = scan.param2[winner.index];
    result.memory = cir.memory;
    result.clipped = winner.point.clipped;
    return result;
}

std::vector<SweepPoint> capacity_sweep(const Scenario& scenario, const SystemParams& params,
                                       double t_min, double t_max, double t_step,
                                       double grid_step, const SearchSettings& settings,
                                       int workers, int memory_cap) {
    if (!(t_min > 0.0) || !(t_step > 0.0) || !(t_max >= t_min))
        throw std::invalid_argument("capacity_sweep: require 0 < t_min <= t_max and t_step > 0");
    std::vector<SweepPoint> points;
    for (int k = 0;; ++k) {
        const double t_sym = t_min + double(k) * t_step;
        if (t_sym > t_max + 1e-9 * t_step) break;
        SweepPoint point;
        point.t_sym = t_sym;
        try {
            point.result = capacity(scenario, params, t_sym, grid_step, settings, workers,
                                    memory_cap);
        } catch (const memory_overflow_error& e) {
            point.skipped = true;
            point.error = e.what();
        }
        points.push_back(std::move(point));
    }
    return points;
}

Surface air_surface(const Scenario& scenario, const SystemParams& params, double t_sym,
                    double grid_step, const SearchSettings& settings, int workers,
                    int memory_cap) {
    const ChannelImpulseResponse cir = compute_cir(params, t_sym, memory_cap);
    const ThresholdSearch base = default_threshold_search(cir, params, settings);
    const TauLattice lattice(base);
    const GridScan scan = make_grid(scenario.source, grid_step);
    const auto ranges = chunk_ranges(scan.sources.size(), workers);

    Surface surface;
    surface.points.resize(scan.sources.size());
    std::vector<char> point_clipped(scan.sources.size(), 0);

    auto run_chunk = [&](size_t chunk) {
        detail::HistoryKernel kernel(cir, params);
        TableCache cache;
        for (size_t i = ranges[chunk].first; i < ranges[chunk].second; ++i) {
            const PointResult point =
                evaluate_point(kernel, lattice, cache, scenario.isi, scan.sources[i], t_sym);
            surface.points[i] =
                {scan.param1[i], scan.param2[i], point.tau, point.air, point.mi};
            point_clipped[i] = point.clipped ? 1 : 0;
        }
    };

    if (ranges.size() <= 1) {
        if (!ranges.empty()) run_chunk(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(ranges.size());
        for (size_t c = 0; c < ranges.size(); ++c) pool.emplace_back(run_chunk, c);
        for (auto& t : pool) t.join();
    }

    size_t best_index = 0;
    for (size_t i = 1; i < surface.points.size(); ++i)
        if (surface.points[i].air > surface.points[best_index].air) best_index = i;
    const SurfacePoint& bp = surface.points[best_index];
    surface.best = {bp.air,    bp.mi,     t_sym,      bp.tau,
                    bp.param1, bp.param2, cir.memory, point_clipped[best_index] != 0};
    return surface;
}

}  // namespace mcair
