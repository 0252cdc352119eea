#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "mcair/detection.hpp"

using namespace mcair;

namespace {

const SystemParams kDefaults{};

// t_alpha = 2.5 with t_sym = 1 gives memory 3 = ceil(2.5 / 1).
ChannelImpulseResponse synthetic_cir() {
    return {1.0, 2.5, 3, false, {0.05, 0.02, 0.004}};
}

}  // namespace

TEST_CASE("q function reference values and symmetry") {
    CHECK(q_function(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(q_function(1.959964) == doctest::Approx(0.024999999096442404).epsilon(1e-12));
    for (double z : {0.3, 1.0, 2.5})
        CHECK(q_function(-z) == doctest::Approx(1.0 - q_function(z)).epsilon(1e-13));
    CHECK(q_function(10.0) < 1e-20);  // far tail stays positive via erfc
    CHECK(q_function(10.0) > 0.0);
}

TEST_CASE("conditional moments accumulate active taps") {
    const ChannelImpulseResponse cir = synthetic_cir();
    const double nt = kDefaults.n_released;

    // no history, s = 0: noise only
    ConditionalGaussian g = conditional_moments(cir, kDefaults, 0u, 0);
    CHECK(g.mean == doctest::Approx(50.0).epsilon(1e-15));
    CHECK(g.variance == doctest::Approx(2500.0).epsilon(1e-15));

    // s = 1 adds tap 1
    g = conditional_moments(cir, kDefaults, 0u, 1);
    CHECK(g.mean == doctest::Approx(50.0 + nt * 0.05).epsilon(1e-15));
    CHECK(g.variance == doctest::Approx(2500.0 + nt * 0.05 * 0.95).epsilon(1e-15));

    // history bit 0 = oldest symbol s_{i-2} -> tap 3; bit 1 = s_{i-1} -> tap 2
    g = conditional_moments(cir, kDefaults, 0b01u, 1);
    CHECK(g.mean == doctest::Approx(50.0 + nt * (0.05 + 0.004)).epsilon(1e-15));
    CHECK(g.variance ==
          doctest::Approx(2500.0 + nt * (0.05 * 0.95 + 0.004 * 0.996)).epsilon(1e-15));

    g = conditional_moments(cir, kDefaults, 0b10u, 0);
    CHECK(g.mean == doctest::Approx(50.0 + nt * 0.02).epsilon(1e-15));

    g = conditional_moments(cir, kDefaults, 0b11u, 1);
    CHECK(g.mean == doctest::Approx(50.0 + nt * (0.05 + 0.02 + 0.004)).epsilon(1e-15));
}

TEST_CASE("conditional moments reject malformed arguments") {
    const ChannelImpulseResponse cir = synthetic_cir();
    CHECK_THROWS_AS(conditional_moments(cir, kDefaults, 4u, 0), std::invalid_argument);
    CHECK_THROWS_AS(conditional_moments(cir, kDefaults, 0u, 2), std::invalid_argument);
    CHECK_THROWS_AS(conditional_moments(cir, kDefaults, 0u, -1), std::invalid_argument);
    ChannelImpulseResponse bad = cir;
    bad.h.pop_back();  // taps no longer match the declared memory
    CHECK_THROWS_AS(conditional_moments(bad, kDefaults, 0u, 0), std::invalid_argument);
}

TEST_CASE("current pulse dominates at the mean level; probabilities ordered below mean0") {
    const ChannelImpulseResponse cir = synthetic_cir();
    for (uint32_t w = 0; w < 4; ++w) {
        const ConditionalGaussian g0 = conditional_moments(cir, kDefaults, w, 0);
        const ConditionalGaussian g1 = conditional_moments(cir, kDefaults, w, 1);
        CHECK(g1.mean > g0.mean);
        CHECK(g1.variance > g0.variance);
        for (double tau : {-20.0, 10.0, g0.mean}) {
            if (tau > g0.mean) continue;
            const Detector det{tau};
            CHECK(transition_probability(cir, kDefaults, det, w, 1, 1) >=
                  transition_probability(cir, kDefaults, det, w, 0, 1));
        }
    }
}

TEST_CASE("transition probabilities are normalized and in range") {
    const ChannelImpulseResponse cir = synthetic_cir();
    for (double tau : {-50.0, 60.0, 300.0, 900.0, 1e7})
        for (uint32_t w = 0; w < 4; ++w)
            for (int s = 0; s <= 1; ++s) {
                const Detector det{tau};
                const double p0 = transition_probability(cir, kDefaults, det, w, s, 0);
                const double p1 = transition_probability(cir, kDefaults, det, w, s, 1);
                CHECK(p0 >= 0.0);
                CHECK(p1 >= 0.0);
                CHECK(p0 + p1 == doctest::Approx(1.0).epsilon(1e-15));
            }
}

TEST_CASE("noise-only cell is the plain gaussian tail") {
    // all-zero history, s = 0: P(shat = 1) = Q((tau - mu_E) / sigma_E)
    const ChannelImpulseResponse cir = synthetic_cir();
    const double tau = 50.0 + 50.0 * 1.959964;
    const Detector det{tau};
    CHECK(transition_probability(cir, kDefaults, det, 0u, 0, 1) ==
          doctest::Approx(0.024999999096442404).epsilon(1e-12));
}

TEST_CASE("transition table matches per-entry evaluation on a real channel") {
    const ChannelImpulseResponse cir = compute_cir(kDefaults, 1.0);
    REQUIRE(cir.memory == 9);
    const Detector det{150.0};
    const TransitionTable table = build_transition_table(cir, kDefaults, det);
    REQUIRE(table.histories() == 256);
    REQUIRE(table.memory == 9);
    for (uint32_t w = 0; w < 256; ++w) {
        CHECK(table.p1_given_s0[w] ==
              doctest::Approx(transition_probability(cir, kDefaults, det, w, 0, 1))
                  .epsilon(1e-15));
        CHECK(table.p1_given_s1[w] ==
              doctest::Approx(transition_probability(cir, kDefaults, det, w, 1, 1))
                  .epsilon(1e-15));
        CHECK(table.entry(w, 0, 0) + table.entry(w, 0, 1) ==
              doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("more interfering history never lowers the count mean") {
    const ChannelImpulseResponse cir = compute_cir(kDefaults, 1.0);
    for (uint32_t w = 0; w < 256; ++w)
        for (int bit = 0; bit < 8; ++bit) {
            const uint32_t with_bit = w | (1u << bit);
            if (with_bit == w) continue;
            CHECK(conditional_moments(cir, kDefaults, with_bit, 0).mean >=
                  conditional_moments(cir, kDefaults, w, 0).mean);
        }
}

TEST_CASE("memory-1 channel has a single empty history") {
    const ChannelImpulseResponse cir{2.0, 1.5, 1, false, {0.06}};
    const TransitionTable table = build_transition_table(cir, kDefaults, Detector{200.0});
    CHECK(table.histories() == 1);
    const ConditionalGaussian g1 = conditional_moments(cir, kDefaults, 0u, 1);
    CHECK(g1.mean == doctest::Approx(50.0 + 1e4 * 0.06).epsilon(1e-15));
}
