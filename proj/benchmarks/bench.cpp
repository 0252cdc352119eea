// Microbenchmarks for the hot paths: tau-table fills, per-use information
// evaluation, threshold optimization, and the particle simulator.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "kernel.hpp"
#include "mcair/channel.hpp"
#include "mcair/montecarlo.hpp"
#include "mcair/optimize.hpp"

namespace {

const mcair::SystemParams kParams{};

// Benchmark arg = symbol interval in hundredths of a second; smaller
// intervals mean longer channel memory and exponentially more histories.
double t_sym_of(const benchmark::State& state) { return double(state.range(0)) / 100.0; }

void BM_FillTauTable(benchmark::State& state) {
    const auto cir = mcair::compute_cir(kParams, t_sym_of(state));
    mcair::detail::HistoryKernel kernel(cir, kParams);
    const auto search = mcair::default_threshold_search(cir, kParams);
    mcair::detail::TauTable table;
    double tau = search.lo;
    for (auto _ : state) {
        kernel.fill_tau_table(tau, table);
        benchmark::DoNotOptimize(table.u.data());
        tau += 1.0;
        if (tau > search.hi) tau = search.lo;
    }
    state.SetLabel("M=" + std::to_string(cir.memory));
    state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(kernel.histories()));
}
BENCHMARK(BM_FillTauTable)->Arg(100)->Arg(50)->Arg(40)->Arg(30);

void BM_MiAwareRaw(benchmark::State& state) {
    const auto cir = mcair::compute_cir(kParams, t_sym_of(state));
    mcair::detail::HistoryKernel kernel(cir, kParams);
    kernel.set_source(mcair::MarkovSource{0.45, 0.77});
    const auto search = mcair::default_threshold_search(cir, kParams);
    mcair::detail::TauTable table;
    kernel.fill_tau_table(0.5 * (search.lo + search.hi), table);
    for (auto _ : state) benchmark::DoNotOptimize(kernel.mi_aware_raw(table));
    state.SetLabel("M=" + std::to_string(cir.memory));
    state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(kernel.histories()));
}
BENCHMARK(BM_MiAwareRaw)->Arg(100)->Arg(50)->Arg(40)->Arg(30);

void BM_MiUnawareRaw(benchmark::State& state) {
    const auto cir = mcair::compute_cir(kParams, t_sym_of(state));
    mcair::detail::HistoryKernel kernel(cir, kParams);
    kernel.set_source(mcair::MarkovSource{0.45, 0.77});
    const auto search = mcair::default_threshold_search(cir, kParams);
    mcair::detail::TauTable table;
    kernel.fill_tau_table(0.5 * (search.lo + search.hi), table);
    for (auto _ : state) benchmark::DoNotOptimize(kernel.mi_unaware_raw(table));
    state.SetLabel("M=" + std::to_string(cir.memory));
    state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(kernel.histories()));
}
BENCHMARK(BM_MiUnawareRaw)->Arg(100)->Arg(50)->Arg(40)->Arg(30);

void BM_OptimizeThreshold(benchmark::State& state) {
    const auto cir = mcair::compute_cir(kParams, t_sym_of(state));
    const auto search = mcair::default_threshold_search(cir, kParams);
    const mcair::MarkovSource src{0.45, 0.77};
    for (auto _ : state) {
        auto r = mcair::optimize_threshold(mcair::IsiKnowledge::aware, cir, kParams, src,
                                           search);
        benchmark::DoNotOptimize(r.tau);
    }
    state.SetLabel("M=" + std::to_string(cir.memory));
}
BENCHMARK(BM_OptimizeThreshold)->Arg(100)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_EffectiveMemory(benchmark::State& state) {
    for (auto _ : state) {
        auto r = mcair::effective_memory(kParams, t_sym_of(state));
        benchmark::DoNotOptimize(r.t_alpha);
    }
}
BENCHMARK(BM_EffectiveMemory)->Arg(100)->Arg(20);

void BM_PairwiseSum(benchmark::State& state) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const size_t n = size_t(state.range(0));
    std::vector<double> data(n);
    for (double& v : data) v = uni(rng);
    std::vector<double> buf(n);
    for (auto _ : state) {
        buf = data;
        benchmark::DoNotOptimize(mcair::detail::pairwise_sum(buf.data(), buf.size()));
    }
    state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(n));
}
BENCHMARK(BM_PairwiseSum)->Arg(1 << 10)->Arg(1 << 16);

void BM_SamplePulseBins(benchmark::State& state) {
    std::mt19937_64 rng(7);
    for (auto _ : state) {
        auto bins = mcair::detail::sample_pulse_bins(kParams, 1.0, size_t(state.range(0)), rng);
        benchmark::DoNotOptimize(bins.data());
    }
}
BENCHMARK(BM_SamplePulseBins)->Arg(9)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_SimulateStream(benchmark::State& state) {
    const auto cir = mcair::compute_cir(kParams, 1.0);
    const mcair::MarkovSource src{0.5, 0.5};
    const mcair::Detector det{287.0};
    mcair::SimConfig cfg;
    cfg.n_symbols = 2000;
    cfg.seed = 1;
    cfg.tail = state.range(0) ? mcair::SimConfig::Tail::truncate : mcair::SimConfig::Tail::full;
    for (auto _ : state) {
        auto run = mcair::simulate_stream(kParams, cir, src, det, cfg);
        benchmark::DoNotOptimize(run.counts.data());
        cfg.seed += 1;
    }
    state.SetLabel(state.range(0) ? "truncate" : "full");
    state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(cfg.n_symbols));
}
BENCHMARK(BM_SimulateStream)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
