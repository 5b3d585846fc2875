#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "rendezvous/env_model.hpp"
#include "rendezvous/sim_engine.hpp"
#include "stat_helpers.hpp"

namespace rendezvous {
namespace {

using testing::within_binomial_sigmas;

TEST(SampleInitial, AllOpenWhenProbabilityIsOne) {
    Engine rng(1);
    EXPECT_EQ(sample_initial(1.0, 5, rng), ChannelVector({1, 1, 1, 1, 1}));
}

TEST(SampleInitial, PerBitFrequencyMatchesP) {
    Engine rng(2);
    constexpr std::uint64_t draws = 100'000;
    std::vector<std::uint64_t> open(20, 0);
    for (std::uint64_t i = 0; i < draws; ++i) {
        const auto v = sample_initial(0.6, 20, rng);
        for (ChannelId c = 1; c <= 20; ++c) open[c - 1] += v.is_open(c);
    }
    for (auto hits : open) EXPECT_TRUE(within_binomial_sigmas(hits, draws, 0.6)) << hits;
}

TEST(SampleInitial, FairCoinSingleChannel) {
    Engine rng(3);
    std::uint64_t hits = 0;
    for (int i = 0; i < 100'000; ++i) hits += sample_initial(0.5, 1, rng).is_open(1);
    EXPECT_TRUE(within_binomial_sigmas(hits, 100'000, 0.5));
}

TEST(SampleInitial, RejectsProbabilityOutsideUnitInterval) {
    Engine rng(4);
    for (double p : {0.0, -0.1, 1.5, std::numeric_limits<double>::quiet_NaN()}) {
        EXPECT_THROW(sample_initial(p, 3, rng), std::invalid_argument) << p;
    }
}

TEST(Evolve, ZeroLambdaIsIdentity) {
    Engine rng(5);
    for (double p : {0.1, 0.5, 0.9, 1.0}) {
        const auto s = sample_initial(0.5, 30, rng);
        EXPECT_EQ(evolve(s, p, 0.0, rng), s);
    }
}

TEST(Evolve, SemiStableFlipsEveryBit) {
    Engine rng(6);
    EXPECT_EQ(evolve(ChannelVector({1, 0, 1}), 0.5, 2.0, rng), ChannelVector({0, 1, 0}));
}

TEST(Evolve, SemiStableHasPeriodTwo) {
    Engine rng(7);
    for (int i = 0; i < 100; ++i) {
        const auto s = sample_initial(0.5, 16, rng);
        const auto once = evolve(s, 0.5, 2.0, rng);
        EXPECT_EQ(once, flip(s));
        EXPECT_EQ(evolve(once, 0.5, 2.0, rng), s);
    }
}

TEST(Evolve, UnitLambdaForgetsThePreviousState) {
    Engine rng(8);
    constexpr std::uint64_t draws = 100'000;
    for (bool start_open : {false, true}) {
        const ChannelVector s(1, start_open);
        std::uint64_t hits = 0;
        for (std::uint64_t i = 0; i < draws; ++i) hits += evolve(s, 0.7, 1.0, rng).is_open(1);
        EXPECT_TRUE(within_binomial_sigmas(hits, draws, 0.7)) << "start_open=" << start_open << " hits=" << hits;
    }
}

TEST(Evolve, UnitLambdaIndependenceChiSquare) {
    // 2x2 contingency table of (previous bit, next bit) under lambda = 1.
    Engine rng(9);
    const double p = 0.6;
    std::uint64_t table[2][2] = {{0, 0}, {0, 0}};
    for (int i = 0; i < 20'000; ++i) {
        const auto prev = sample_initial(p, 10, rng);
        const auto next = evolve(prev, p, 1.0, rng);
        for (ChannelId c = 1; c <= 10; ++c) ++table[prev.is_open(c)][next.is_open(c)];
    }
    double total = 0;
    double row[2] = {0, 0};
    double col[2] = {0, 0};
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            total += static_cast<double>(table[r][c]);
            row[r] += static_cast<double>(table[r][c]);
            col[c] += static_cast<double>(table[r][c]);
        }
    double stat = 0.0;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            const double e = row[r] * col[c] / total;
            stat += (static_cast<double>(table[r][c]) - e) * (static_cast<double>(table[r][c]) - e) / e;
        }
    EXPECT_LT(stat, testing::chi_square_critical(1.0));
}

TEST(Evolve, StationaryMarginalIsPreserved) {
    Engine rng(10);
    for (double p : {0.3, 0.6, 0.9}) {
        for (double lambda : {0.1, 0.5, 1.0, max_dynamic_factor(p)}) {
            std::uint64_t hits = 0;
            std::uint64_t bits = 0;
            for (int run = 0; run < 500; ++run) {
                auto s = sample_initial(p, 200, rng);
                for (int t = 0; t < 100; ++t) s = evolve(s, p, lambda, rng);
                hits += s.open_count();
                bits += s.size();
            }
            EXPECT_TRUE(within_binomial_sigmas(hits, bits, p)) << "p=" << p << " lambda=" << lambda;
        }
    }
}

TEST(Evolve, RejectsDynamicFactorAboveItsRange) {
    Engine rng(11);
    const ChannelVector s(4, true);
    EXPECT_THROW(evolve(s, 0.7, 1.5, rng), std::invalid_argument);
    EXPECT_THROW(evolve(s, 0.5, -0.1, rng), std::invalid_argument);
    EXPECT_NO_THROW(evolve(s, 0.5, 2.0, rng));
}

TEST(Flip, AlternatingMarginalSwapsPAndOneMinusP) {
    Engine rng(12);
    std::uint64_t hits = 0;
    for (int i = 0; i < 5'000; ++i) hits += flip(sample_initial(0.8, 20, rng)).open_count();
    EXPECT_TRUE(within_binomial_sigmas(hits, 100'000, 0.2));
}

TEST(EnvSpec, DynamicFactorLimits) {
    EnvSpec env{.n = 4, .p_a = 0.6, .p_b = 0.6, .lambda_a = 1.0 / 0.6, .lambda_b = 0.0};
    EXPECT_NO_THROW(env.validate());
    env.lambda_a = 1.7;
    EXPECT_THROW(env.validate(), std::invalid_argument);

    EnvSpec full{.n = 2, .p_a = 1.0, .p_b = 1.0, .lambda_a = 1.0, .lambda_b = 0.0};
    EXPECT_NO_THROW(full.validate());
    EXPECT_DOUBLE_EQ(full.a0(), 0.0);
    full.lambda_a = 1.2;
    EXPECT_THROW(full.validate(), std::invalid_argument);
}

TEST(EnvSpec, TransitionRatesStayInUnitInterval) {
    for (double p : {0.05, 0.25, 0.5, 0.75, 0.95, 1.0}) {
        for (int k = 0; k <= 20; ++k) {
            const double lambda = max_dynamic_factor(p) * k / 20.0;
            EnvSpec env{.n = 1, .p_a = p, .p_b = p, .lambda_a = lambda, .lambda_b = lambda};
            ASSERT_NO_THROW(env.validate());
            for (double rate : {env.a0(), env.a1(), env.b0(), env.b1()}) {
                EXPECT_GE(rate, 0.0);
                EXPECT_LE(rate, 1.0);
            }
            // Balance: p(1 - a0) + (1 - p) a1 = p.
            EXPECT_NEAR(p * (1 - env.a0()) + (1 - p) * env.a1(), p, 1e-12);
        }
    }
}

TEST(EnvSpec, RejectsBadParameters) {
    EXPECT_THROW((EnvSpec{.n = 0}).validate(), std::invalid_argument);
    EXPECT_THROW((EnvSpec{.n = 2, .p_a = 0.0}).validate(), std::invalid_argument);
    EXPECT_THROW((EnvSpec{.n = 2, .intruder_q = 0.0}).validate(), std::invalid_argument);
}

TEST(ApplyIntruder, BitwiseDefinition) {
    const ChannelVector s{1, 1, 0};
    EXPECT_EQ(apply_intruder(s, IntruderMask::none(3)), s);
    EXPECT_EQ(apply_intruder(s, IntruderMask{ChannelVector(3, true)}), ChannelVector(3, false));
    EXPECT_EQ(apply_intruder(s, IntruderMask{ChannelVector{0, 1, 0}}), ChannelVector({1, 0, 0}));
    EXPECT_THROW(apply_intruder(s, IntruderMask::none(4)), std::logic_error);
}

TEST(IntruderMask, NoIntruderDrawsNothing) {
    Engine rng(13);
    Engine before = rng;
    const auto mask = sample_intruder_mask(10, 1.0, rng);
    EXPECT_EQ(mask.blocked, ChannelVector(10, false));
    EXPECT_EQ(rng, before);
}

TEST(IntruderMask, BlockedFrequencyIsOneMinusQ) {
    Engine rng(14);
    std::uint64_t blocked = 0;
    for (int i = 0; i < 10'000; ++i) blocked += sample_intruder_mask(10, 0.75, rng).blocked.open_count();
    EXPECT_TRUE(within_binomial_sigmas(blocked, 100'000, 0.25));
}

TEST(SampleStablePair, AllOpenNeedsNoRejection) {
    Engine rng(15);
    const auto pair = sample_stable_pair(EnvSpec{.n = 3, .p_a = 1.0, .p_b = 1.0}, rng);
    EXPECT_EQ(pair.alice, ChannelVector({1, 1, 1}));
    EXPECT_EQ(pair.bob, ChannelVector({1, 1, 1}));
    EXPECT_EQ(pair.rejections, 0U);
}

TEST(SampleStablePair, AlwaysSharesAChannel) {
    Engine rng(16);
    const EnvSpec env{.n = 20, .p_a = 0.6, .p_b = 0.6};
    for (int i = 0; i < 10'000; ++i) {
        const auto pair = sample_stable_pair(env, rng);
        ASSERT_TRUE(first_common_open(pair.alice, pair.bob).has_value());
    }
}

TEST(SampleStablePair, AcceptanceRateMatchesExactProbability) {
    // Two independent channels: P(common) = 1 - (1 - p_a p_b)^2 = 0.4375.
    Engine rng(17);
    const EnvSpec env{.n = 2, .p_a = 0.5, .p_b = 0.5};
    std::uint64_t accepted = 0;
    std::uint64_t attempts = 0;
    while (attempts < 100'000) {
        attempts += sample_stable_pair(env, rng).rejections + 1;
        ++accepted;
    }
    EXPECT_TRUE(within_binomial_sigmas(accepted, attempts, 0.4375)) << accepted << "/" << attempts;
}

TEST(SampleStablePair, MaskIsAppliedToBothNodes) {
    Engine rng(18);
    const EnvSpec env{.n = 12, .p_a = 0.8, .p_b = 0.8, .intruder_q = 0.5};
    for (int i = 0; i < 2'000; ++i) {
        const auto pair = sample_stable_pair(env, rng);
        for (ChannelId c = 1; c <= env.n; ++c) {
            if (pair.mask.is_blocked(c)) {
                EXPECT_FALSE(pair.alice.is_open(c));
                EXPECT_FALSE(pair.bob.is_open(c));
            }
        }
        EXPECT_TRUE(first_common_open(pair.alice, pair.bob).has_value());
    }
}

TEST(SampleStablePair, GivesUpAfterTheRejectionCap) {
    Engine rng(19);
    const EnvSpec env{.n = 1, .p_a = 0.001, .p_b = 0.001};
    EXPECT_THROW(sample_stable_pair(env, rng, 1'000), RejectionCapExceeded);
}

TEST(SampleStablePair, RequiresStableEnvironment) {
    Engine rng(20);
    EXPECT_THROW(sample_stable_pair(EnvSpec{.n = 3, .p_a = 0.5, .p_b = 0.5, .lambda_a = 1.0}, rng),
                 std::invalid_argument);
}

}  // namespace
}  // namespace rendezvous
