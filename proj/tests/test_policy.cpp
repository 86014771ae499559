#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "hetbandit/policy.hpp"

using namespace hetbandit;

namespace {

PolicyParams unit_params(std::size_t n, PolicyMode mode = PolicyMode::heterogeneous) {
  return PolicyParams{1.01, mode, std::vector<double>(n, 1.0)};
}

// Belief where every option has been observed once with the given reward.
AgentBelief seeded_belief(const std::vector<double>& rewards, double bias) {
  AgentBelief b(rewards.size(), bias);
  for (std::size_t i = 0; i < rewards.size(); ++i) b.record_own(i, rewards[i]);
  return b;
}

}  // namespace

TEST(Uncertainty, ZeroAtFirstStep) {
  for (std::size_t n : {1, 5, 100}) EXPECT_EQ(uncertainty(1.0, 0.3, 1.01, 1, n), 0.0);
}

TEST(Uncertainty, HandEvaluatedAtLogTEqualOne) {
  // t = e is not an integer; evaluate via the t-free form with log t = 1.
  // C = sqrt(2 * 2.01 / 2) = sqrt(2.01)
  const double scale = 2.0 * 1.0 * 2.01 * 1.0;
  EXPECT_NEAR(std::sqrt(scale / 2.0), 1.41774468787578252, 1e-15);
  // Same quantity through the public function: divide out log t at t = 1000.
  const double c = uncertainty(1.0, 0.0, 1.01, 1000, 2);
  EXPECT_NEAR(c / std::sqrt(std::log(1000.0)), 1.41774468787578252, 1e-14);
}

TEST(Uncertainty, BiasScalesBySquareRoot) {
  const double base = uncertainty(1.3, 0.0, 1.5, 50, 7);
  EXPECT_NEAR(uncertainty(1.3, 1.0, 1.5, 50, 7), std::numbers::sqrt2 * base, 1e-13);
}

TEST(Uncertainty, Monotonicity) {
  double prev = uncertainty(1.0, 0.2, 1.01, 100, 1);
  for (std::size_t n = 2; n < 200; ++n) {
    const double c = uncertainty(1.0, 0.2, 1.01, 100, n);
    EXPECT_LT(c, prev);
    prev = c;
  }
  EXPECT_LE(uncertainty(1.0, 0.1, 1.01, 100, 5), uncertainty(1.0, 0.2, 1.01, 100, 5));
  EXPECT_LE(uncertainty(1.0, 0.1, 1.01, 100, 5), uncertainty(1.0, 0.1, 2.0, 100, 5));
  EXPECT_LE(uncertainty(1.0, 0.1, 1.01, 100, 5), uncertainty(1.0, 0.1, 1.01, 101, 5));
  EXPECT_LT(uncertainty(1.0, 0.0, 1.01, 100, 1'000'000), 1e-2);
}

TEST(Uncertainty, RejectsZeroObservations) {
  EXPECT_THROW(uncertainty(1.0, 0.0, 1.01, 5, 0), DomainError);
}

TEST(UcbIndex, FirstStepIsTheEstimate) {
  AgentBelief b(3, 0.0);
  b.record_own(1, 5.0);
  EXPECT_EQ(ucb_index(b, unit_params(3), 1, 1), 5.0);
}

TEST(UcbIndex, HeterogeneousExceedsHomogeneousWithPositiveBias) {
  AgentBelief b(2, 0.7);
  b.record_own(0, 1.0);
  b.record_received(0, 2.0);
  for (std::size_t t = 2; t < 50; ++t) {
    EXPECT_GT(ucb_index(b, unit_params(2, PolicyMode::heterogeneous), 0, t),
              ucb_index(b, unit_params(2, PolicyMode::homogeneous), 0, t));
  }
}

TEST(UcbIndex, ScriptedValue) {
  AgentBelief b(1 + 1, 0.0);
  for (int i = 0; i < 100; ++i) b.record_own(0, 10.0);
  // 10 + sqrt(2 * 2.01 * ln 1000 / 100), 30-digit reference
  EXPECT_NEAR(ucb_index(b, unit_params(2), 0, 1000), 10.5269646688489484581, 1e-13);
}

TEST(UcbIndex, RequiresAnObservation) {
  AgentBelief b(2, 0.0);
  EXPECT_THROW(ucb_index(b, unit_params(2), 0, 3), DomainError);
}

TEST(ChooseOption, ForcedRoundRobinIgnoresBeliefs) {
  AgentBelief b(10, 0.5);
  b.record_received(7, 1e9);
  RandomStream rng(1);
  for (std::size_t t = 1; t <= 10; ++t) EXPECT_EQ(choose_option(b, unit_params(10), t, rng), t - 1);
  EXPECT_EQ(choose_option(b, unit_params(10), 3, rng), 2u);
  EXPECT_EQ(rng.draws(), 0u);
}

TEST(ChooseOption, DominantOptionWithoutRandomness) {
  const auto b = seeded_belief({0.0, 0.0, 50.0, 0.0}, 0.0);
  RandomStream rng(1);
  EXPECT_EQ(choose_option(b, unit_params(4), 20, rng), 2u);
  EXPECT_EQ(rng.draws(), 0u);
}

TEST(ChooseOption, TiesBrokenUniformly) {
  const auto b = seeded_belief({3.0, 7.0, 1.0, 7.0}, 0.0);
  int first = 0;
  const int calls = 10000;
  for (int r = 0; r < calls; ++r) {
    RandomStream rng(trial_seed(99, r));
    const auto c = choose_option(b, unit_params(4), 10, rng);
    ASSERT_TRUE(c == 1 || c == 3);
    EXPECT_EQ(rng.draws(), 1u);
    if (c == 1) ++first;
  }
  EXPECT_NEAR(static_cast<double>(first) / calls, 0.5, 0.02);
}

TEST(ChooseOption, ModesAgreeWhenBiasIsZero) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> noise(10.0, 1.0);
  AgentBelief b(6, 0.0);
  for (int i = 0; i < 60; ++i) {
    const std::size_t opt = gen() % 6;
    if (i % 3 == 0) b.record_received(opt, noise(gen)); else b.record_own(opt, noise(gen));
  }
  for (std::size_t t = 7; t < 500; ++t) {
    RandomStream r1(t), r2(t);
    EXPECT_EQ(choose_option(b, unit_params(6, PolicyMode::heterogeneous), t, r1),
              choose_option(b, unit_params(6, PolicyMode::homogeneous), t, r2));
    EXPECT_EQ(r1.draws(), r2.draws());
  }
}

TEST(SelectArgmax, ShiftInvariance) {
  // Integer-valued scores keep the shift exact, so ties stay ties.
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> q(8), shifted(8);
    for (std::size_t i = 0; i < 8; ++i) q[i] = static_cast<double>(gen() % 4);
    const double c = static_cast<double>(gen() % 1000) - 500.0;
    for (std::size_t i = 0; i < 8; ++i) shifted[i] = q[i] + c;
    RandomStream a(trial), b(trial);
    EXPECT_EQ(select_argmax(q, a), select_argmax(shifted, b));
  }
}

TEST(AgentBelief, RecordOwn) {
  AgentBelief b(3, 0.0);
  b.record_own(2, 0.7);
  EXPECT_EQ(b.own_pulls(2), 1u);
  EXPECT_EQ(b.observations(2), 1u);
  EXPECT_EQ(b.reward_sum(2), 0.7);
  b.record_own(1, 1.0);
  b.record_own(1, 0.0);
  EXPECT_EQ(b.estimate(1), 0.5);
}

TEST(AgentBelief, RecordReceived) {
  AgentBelief b(2, 0.0);
  b.record_received(1, 9.5);
  EXPECT_EQ(b.own_pulls(1), 0u);
  EXPECT_EQ(b.observations(1), 1u);
  EXPECT_EQ(b.estimate(1), 9.5);

  AgentBelief c(2, 0.0);
  c.record_own(0, 10.0);
  c.record_received(0, 12.0);
  EXPECT_EQ(c.estimate(0), 11.0);
  EXPECT_EQ(c.own_pulls(0), 1u);
  EXPECT_EQ(c.observations(0), 2u);

  const AgentBelief untouched(2, 0.3);
  EXPECT_EQ(untouched, AgentBelief(2, 0.3));
}

TEST(AgentBelief, InterleavedRecordsKeepCountingIdentity) {
  std::mt19937_64 gen(5);
  AgentBelief b(4, 0.0);
  std::vector<std::size_t> received(4, 0);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t opt = gen() % 4;
    if (gen() % 2) {
      b.record_own(opt, 1.0);
    } else {
      b.record_received(opt, 1.0);
      ++received[opt];
    }
  }
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(b.observations(i), b.own_pulls(i) + received[i]);
    EXPECT_GE(b.observations(i), b.own_pulls(i));
  }
}

TEST(AgentBelief, EstimateUndefinedWithoutObservations) {
  AgentBelief b(2, 0.0);
  EXPECT_FALSE(b.has_estimate(0));
  EXPECT_THROW(b.estimate(0), DomainError);
  EXPECT_THROW(b.record_own(2, 1.0), DomainError);
}

TEST(PolicyParams, RejectsXiAtMostOne) {
  EXPECT_THROW((PolicyParams{1.0, PolicyMode::heterogeneous, {1.0}}.validate()), DomainError);
  EXPECT_NO_THROW((PolicyParams{1.0001, PolicyMode::heterogeneous, {1.0}}.validate()));
}
