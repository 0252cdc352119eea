#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mcair/channel.hpp"

using namespace mcair;

namespace {

const SystemParams kDefaults{};  // N_T = 1e4, R = 1, d = 10, D = 79.4

// Independent window probability used to cross-check the memory solve.
double ref_cdf(double t) {
    if (t <= 0.0) return 0.0;
    return 0.1 * std::erfc(9.0 / (2.0 * std::sqrt(79.4 * t)));
}
double ref_window(double t, double t_sym) { return ref_cdf(t + t_sym) - ref_cdf(t); }

}  // namespace

TEST_CASE("cumulative absorption matches high-precision reference values") {
    CHECK(expected_cumulative_absorbed(kDefaults, 0.0) == 0.0);
    CHECK(expected_cumulative_absorbed(kDefaults, 0.5) ==
          doctest::Approx(312.48316254124071).epsilon(1e-12));
    CHECK(expected_cumulative_absorbed(kDefaults, 1.0) ==
          doctest::Approx(475.10614564652342).epsilon(1e-12));
    CHECK(expected_cumulative_absorbed(kDefaults, 2.0) ==
          doctest::Approx(613.54994643497741).epsilon(1e-12));
    CHECK(expected_cumulative_absorbed(kDefaults, 9.0) ==
          doctest::Approx(811.83048690688173).epsilon(1e-12));
    CHECK_THROWS_AS(expected_cumulative_absorbed(kDefaults, -0.1), std::domain_error);
}

TEST_CASE("cumulative absorption is monotone and bounded by the geometric mass") {
    double prev = 0.0;
    for (double t = 0.1; t < 50.0; t *= 1.7) {
        const double cur = expected_cumulative_absorbed(kDefaults, t);
        CHECK(cur > prev);
        CHECK(cur < kDefaults.n_released * 0.1);  // N_T * R / d
        prev = cur;
    }
}

TEST_CASE("per-interval hitting probabilities match reference values") {
    CHECK(hitting_probability(kDefaults, 2.0, 1) ==
          doctest::Approx(0.061354994643497741).epsilon(1e-12));
    CHECK(hitting_probability(kDefaults, 2.0, 2) ==
          doctest::Approx(0.010746858949053651).epsilon(1e-12));
    CHECK(hitting_probability(kDefaults, 1.0, 1) ==
          doctest::Approx(0.047510614564652342).epsilon(1e-12));
    CHECK(hitting_probability(kDefaults, 0.5, 1) ==
          doctest::Approx(0.031248316254124071).epsilon(1e-12));
}

TEST_CASE("hitting probabilities telescope to the cumulative curve") {
    const double t_sym = 0.7;
    double sum = 0.0;
    for (int i = 1; i <= 12; ++i) sum += hitting_probability(kDefaults, t_sym, i);
    const double direct =
        expected_cumulative_absorbed(kDefaults, 12 * t_sym) / kDefaults.n_released;
    CHECK(sum == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("effective memory matches high-precision roots") {
    struct Case {
        double t_sym, t_alpha;
        int memory;
    };
    const Case cases[] = {
        {0.2, 2.9167409706152089, 15},
        {0.5, 5.4585152823970226, 11},
        {1.0, 8.668181987453668, 9},
        {2.0, 13.665387172449059, 7},
    };
    for (const Case& c : cases) {
        const MemoryResult mem = effective_memory(kDefaults, c.t_sym);
        CHECK(mem.memory == c.memory);
        CHECK_FALSE(mem.degenerate);
        CHECK(mem.t_alpha == doctest::Approx(c.t_alpha).epsilon(1e-7));
    }
}

TEST_CASE("memory across the sweep grid matches the reference table") {
    const std::pair<double, int> table[] = {
        {0.20, 15}, {0.25, 14}, {0.30, 13}, {0.35, 13}, {0.40, 12},
        {0.45, 12}, {0.50, 11}, {0.55, 11}, {0.60, 11}, {0.65, 11},
        {0.70, 10}, {1.00, 9},  {1.50, 8},  {2.00, 7},
    };
    for (const auto& [t_sym, m] : table)
        CHECK(effective_memory(kDefaults, t_sym).memory == m);
}

TEST_CASE("t_alpha is the downward crossing of the window probability") {
    for (double t_sym : {0.3, 0.8, 1.3}) {
        const MemoryResult mem = effective_memory(kDefaults, t_sym);
        CHECK(std::abs(ref_window(mem.t_alpha, t_sym) - kDefaults.alpha) < 1e-9);
        CHECK(ref_window(mem.t_alpha + 0.5, t_sym) < kDefaults.alpha);
        CHECK(ref_window(mem.t_alpha - 0.5, t_sym) > kDefaults.alpha);
    }
}

TEST_CASE("t_alpha agrees with a dense forward scan") {
    const double t_sym = 1.0;
    const MemoryResult mem = effective_memory(kDefaults, t_sym);
    // last grid time at which the window still reaches alpha
    double last_above = 0.0;
    for (double t = 1e-4; t < mem.t_alpha + 1.0; t += 1e-4)
        if (ref_window(t, t_sym) >= kDefaults.alpha) last_above = t;
    CHECK(std::abs(last_above - mem.t_alpha) <= 2e-4);
}

TEST_CASE("degenerate channel: window peak below alpha reports memory 1") {
    SystemParams params = kDefaults;
    params.alpha = 0.09;  // window peak is ~0.0337 at t_sym = 0.5
    const MemoryResult mem = effective_memory(params, 0.5);
    CHECK(mem.memory == 1);
    CHECK(mem.degenerate);
}

TEST_CASE("memory overflow reports the required length and the cap") {
    SystemParams params = kDefaults;
    params.alpha = 1e-5;
    try {
        effective_memory(params, 0.1);
        FAIL("expected memory_overflow_error");
    } catch (const memory_overflow_error& e) {
        CHECK(e.required_memory == 431);
        CHECK(e.cap == kDefaultMemoryCap);
        CHECK(std::string(e.what()).find("431") != std::string::npos);
    }
    // a raised cap admits the same channel
    CHECK(effective_memory(params, 1.0, 250).memory == 201);
}

TEST_CASE("compute_cir assembles taps consistent with the memory solve") {
    const ChannelImpulseResponse cir = compute_cir(kDefaults, 1.0);
    CHECK(cir.memory == 9);
    CHECK(cir.h.size() == 9);
    CHECK(cir.t_sym == 1.0);
    double sum = 0.0;
    for (int i = 0; i < cir.memory; ++i) {
        CHECK(cir.h[size_t(i)] > 0.0);
        CHECK(cir.h[size_t(i)] ==
              doctest::Approx(hitting_probability(kDefaults, 1.0, i + 1)).epsilon(1e-15));
        sum += cir.h[size_t(i)];
    }
    CHECK(sum < 0.1);
    CHECK(cir.h[0] == doctest::Approx(0.047510614564652342).epsilon(1e-12));
}

TEST_CASE("gaussian validity ratio and flags") {
    const ChannelImpulseResponse cir = compute_cir(kDefaults, 1.0);
    const GaussianValidity validity = validate_gaussian(kDefaults, cir);
    REQUIRE(validity.ratio.size() == cir.h.size());
    for (size_t i = 0; i < cir.h.size(); ++i) {
        const double expect = kDefaults.n_released * cir.h[i] / (1.0 - cir.h[i]);
        CHECK(validity.ratio[i] == doctest::Approx(expect).epsilon(1e-14));
        CHECK(validity.tap_ok[i] == (validity.ratio[i] > 9.0));
    }
    CHECK(validity.all_ok);  // every tap of the t_sym = 1 channel clears 9
}

TEST_CASE("system parameter invariants are enforced") {
    SystemParams bad = kDefaults;
    bad.distance = 0.5;  // d <= R
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = kDefaults;
    bad.alpha = 0.2;  // alpha >= R/d
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = kDefaults;
    bad.noise_std = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = kDefaults;
    bad.diffusion_coeff = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = kDefaults;
    bad.n_released = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_NOTHROW(kDefaults.validate());
}

TEST_CASE("invalid t_sym and memory caps are rejected") {
    CHECK_THROWS(compute_cir(kDefaults, 0.0));
    CHECK_THROWS(compute_cir(kDefaults, -1.0));
    CHECK_THROWS(effective_memory(kDefaults, 1.0, 0));
}
