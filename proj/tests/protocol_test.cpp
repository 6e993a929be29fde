#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "support/stats.hpp"
#include "vcausal/errors.hpp"
#include "vcausal/protocol.hpp"

namespace {

using namespace vcausal::protocol;
using vcausal::derive_substream;
using vcausal::DomainError;
using vcausal::ModelSourceConflict;
using vcausal::Stream;
using vcausal::testing::binomial_sigma;

ProtocolConfig reachable_geometry(std::uint64_t trials = 1000) {
  return {1.0, 0.0, 0.4, 3.0, trials};
}

ProtocolConfig slow_geometry(std::uint64_t trials = 1000) {
  return {1.0, 0.0, 0.4, 2.0, trials};
}

// Enumerates the outcome tree of a single trial (no sampling) to get
// P(Bob == Charlie).
double enumerated_agreement(double p, InfluenceModel model, bool alice, bool in_time) {
  double agree = 0;
  // Product branch: all parties carry the hidden lambda.
  for (int lambda = 0; lambda < 2; ++lambda) agree += (1 - p) * 0.5;
  // Entangled branch.
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        const double w = p * 0.125;
        bool eq;
        if (alice && in_time) {
          eq = true;  // both copy Alice
        } else if (model == InfluenceModel::AgreementVariant) {
          eq = true;  // one shared draw
        } else {
          eq = b == c;
        }
        agree += eq ? w : 0;
      }
    }
  }
  return agree;
}

TEST(Reachable, Examples) {
  EXPECT_TRUE(reachable({1.0, 0.0, 0.4, 3.0, 1}));
  EXPECT_FALSE(reachable({1.0, 0.0, 0.4, 2.0, 1}));
  EXPECT_FALSE(reachable({1.0, 0.0, 1.5, 3.0, 1}));
  EXPECT_FALSE(reachable({1.0, 1.0, 2.0, 3.0, 1}));  // l / dt == 1: light-like, not space-like
}

TEST(Reachable, InvalidConfig) {
  EXPECT_THROW(reachable({0.0, 0.0, 0.4, 3.0, 1}), DomainError);
  EXPECT_THROW(reachable({1.0, 0.4, 0.4, 3.0, 1}), DomainError);
  EXPECT_THROW(reachable({1.0, 0.0, 0.4, 1.0, 1}), DomainError);
  EXPECT_THROW(reachable({1.0, 0.0, 0.4, 3.0, 0}), DomainError);
}

TEST(RunTrial, LocalOnlyWithEntanglementIsRefused) {
  Stream rng = derive_substream(1, 0);
  EXPECT_THROW(run_trial(reachable_geometry(), {0.5}, InfluenceModel::LocalOnly, true, rng),
               ModelSourceConflict);
  EXPECT_NO_THROW(run_trial(reachable_geometry(), {0.0}, InfluenceModel::LocalOnly, true, rng));
  EXPECT_THROW(run_trial(reachable_geometry(), {1.5}, InfluenceModel::FiniteSpeedVCausal, true, rng),
               DomainError);
}

TEST(RunTrial, AliceForcesLabWhenReachable) {
  Stream rng = derive_substream(2, 0);
  for (int i = 0; i < 1000; ++i) {
    const auto r = run_trial(reachable_geometry(), {1.0}, InfluenceModel::FiniteSpeedVCausal, true, rng);
    ASSERT_TRUE(r.alice.has_value());
    ASSERT_TRUE(r.entangled);
    ASSERT_EQ(r.bob, *r.alice);
    ASSERT_EQ(r.charlie, *r.alice);
  }
}

TEST(RunTrial, AliceAbsentLeavesNoRecord) {
  Stream rng = derive_substream(3, 0);
  const auto r = run_trial(reachable_geometry(), {1.0}, InfluenceModel::FiniteSpeedVCausal, false, rng);
  EXPECT_FALSE(r.alice.has_value());
}

TEST(RunBlock, Examples) {
  Stream rng = derive_substream(4, 0);
  EXPECT_EQ(run_block(reachable_geometry(), {1.0}, InfluenceModel::FiniteSpeedVCausal, true, rng).agreements,
            1000u);
  const auto off = run_block(reachable_geometry(), {1.0}, InfluenceModel::FiniteSpeedVCausal, false, rng);
  EXPECT_NEAR(static_cast<double>(off.agreements), 500.0, 50.0);
  EXPECT_EQ(run_block(reachable_geometry(), {1.0}, InfluenceModel::AgreementVariant, false, rng).agreements,
            1000u);
  for (bool alice : {false, true}) {
    EXPECT_EQ(run_block(reachable_geometry(), {0.0}, InfluenceModel::LocalOnly, alice, rng).agreements,
              1000u);
  }
}

TEST(RunBlock, SlowInfluenceNeverArrives) {
  Stream rng = derive_substream(5, 0);
  const auto s = run_block(slow_geometry(100000), {1.0}, InfluenceModel::FiniteSpeedVCausal, true, rng);
  EXPECT_NEAR(s.agreement_rate, 0.5, 4 * binomial_sigma(0.5, s.trials));
  EXPECT_EQ(s.alice_measured, s.trials);
}

TEST(RunBlock, StatsInvariants) {
  Stream rng = derive_substream(6, 0);
  for (double p : {0.0, 0.3, 1.0}) {
    const auto s = run_block(reachable_geometry(777), {p}, InfluenceModel::FiniteSpeedVCausal, false, rng);
    EXPECT_EQ(s.trials, 777u);
    EXPECT_LE(s.agreements, s.trials);
    EXPECT_DOUBLE_EQ(s.agreement_rate, double(s.agreements) / double(s.trials));
  }
}

TEST(RunBlock, MarginalFairness) {
  constexpr std::uint64_t n = 100000;
  const double sigma = binomial_sigma(0.5, n);
  std::uint64_t idx = 0;
  for (auto model : {InfluenceModel::FiniteSpeedVCausal, InfluenceModel::AgreementVariant}) {
    for (bool alice : {false, true}) {
      for (const auto& geom : {reachable_geometry(n), slow_geometry(n)}) {
        Stream rng = derive_substream(7, idx++);
        const auto s = run_block(geom, {1.0}, model, alice, rng);
        EXPECT_NEAR(double(s.bob_horizontal) / n, 0.5, 4 * sigma);
        EXPECT_NEAR(double(s.charlie_horizontal) / n, 0.5, 4 * sigma);
        if (alice) EXPECT_NEAR(double(s.alice_horizontal) / n, 0.5, 4 * sigma);
      }
    }
  }
}

TEST(ExpectedAgreement, MatchesEnumeratedTree) {
  for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    for (auto model : {InfluenceModel::FiniteSpeedVCausal, InfluenceModel::AgreementVariant}) {
      for (bool alice : {false, true}) {
        for (const auto& geom : {reachable_geometry(), slow_geometry()}) {
          EXPECT_NEAR(expected_agreement_rate(geom, {p}, model, alice),
                      enumerated_agreement(p, model, alice, reachable(geom)), 1e-15);
        }
      }
    }
  }
  EXPECT_NEAR(expected_agreement_rate(reachable_geometry(), {0.5}, InfluenceModel::FiniteSpeedVCausal,
                                      false),
              0.75, 1e-15);
}

TEST(ExpectedAgreement, SampledAgainstClosedForm) {
  constexpr std::uint64_t n = 100000;
  std::uint64_t idx = 0;
  for (double p : {0.25, 0.5, 0.75}) {
    Stream rng = derive_substream(8, idx++);
    const auto s = run_block(reachable_geometry(n), {p}, InfluenceModel::FiniteSpeedVCausal, false, rng);
    const double expected = 1 - p / 2;
    EXPECT_NEAR(s.agreement_rate, expected, 4 * binomial_sigma(expected, n)) << p;
  }
}

TEST(InferDecision, Examples) {
  BlockStats s{1000, 1000, 1.0};
  const auto full = infer_decision(s);
  EXPECT_TRUE(full.inferred);
  EXPECT_NEAR(full.error_bound, std::exp(-125.0), 1e-70);

  s = {1000, 503, 0.503};
  EXPECT_FALSE(infer_decision(s).inferred);
  s = {1000, 750, 0.75};
  EXPECT_TRUE(infer_decision(s, 0.75).inferred);
}

TEST(InferDecision, ThresholdDomain) {
  const BlockStats s{10, 5, 0.5};
  EXPECT_THROW(infer_decision(s, 0.5), DomainError);
  EXPECT_THROW(infer_decision(s, 1.01), DomainError);
  EXPECT_NO_THROW(infer_decision(s, 1.0));
  EXPECT_THROW(infer_decision(BlockStats{}, 0.75), DomainError);
}

std::vector<bool> alternating(std::size_t n) {
  std::vector<bool> d;
  for (std::size_t i = 0; i < n; ++i) d.push_back(i % 2 == 0);
  return d;
}

TEST(Signaling, FiniteSpeedReachableIsPerfect) {
  const auto d = alternating(20);
  const auto rep = signaling_experiment(reachable_geometry(), {1.0}, InfluenceModel::FiniteSpeedVCausal,
                                        std::vector<bool>(d), 7);
  EXPECT_DOUBLE_EQ(rep.accuracy, 1.0);
  EXPECT_EQ(rep.blocks.size(), 20u);
  EXPECT_LT(20 * rep.error_bound, 1e-50);
}

TEST(Signaling, AgreementVariantAlwaysInfersMeasurement) {
  const auto d = alternating(20);
  const auto rep = signaling_experiment(reachable_geometry(), {1.0}, InfluenceModel::AgreementVariant,
                                        std::vector<bool>(d), 7);
  for (const auto& b : rep.blocks) EXPECT_TRUE(b.inferred);
  EXPECT_DOUBLE_EQ(rep.accuracy, 0.5);
}

TEST(Signaling, UnreachableBlocksLookUnmeasured) {
  const auto d = alternating(20);
  const auto rep = signaling_experiment(slow_geometry(), {1.0}, InfluenceModel::FiniteSpeedVCausal,
                                        std::vector<bool>(d), 7);
  for (const auto& b : rep.blocks) EXPECT_FALSE(b.inferred);
  EXPECT_DOUBLE_EQ(rep.accuracy, 0.5);
}

TEST(Signaling, AgreementVariantNeverSignals) {
  using vcausal::testing::normal_two_sided_p;
  using vcausal::testing::two_proportion_z;
  for (double p : {1.0, 0.6}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Stream a = derive_substream(seed, 0), b = derive_substream(seed, 1);
      const auto on = run_block(reachable_geometry(2000), {p}, InfluenceModel::AgreementVariant, true, a);
      const auto off = run_block(reachable_geometry(2000), {p}, InfluenceModel::AgreementVariant, false, b);
      const double z = two_proportion_z(on.agreements, on.trials, off.agreements, off.trials);
      EXPECT_GE(normal_two_sided_p(z), 0.001);
    }
  }
}

TEST(Signaling, Deterministic) {
  const auto d = alternating(6);
  const auto a = signaling_experiment(slow_geometry(), {0.7}, InfluenceModel::FiniteSpeedVCausal,
                                      std::vector<bool>(d), 1234);
  const auto b = signaling_experiment(slow_geometry(), {0.7}, InfluenceModel::FiniteSpeedVCausal,
                                      std::vector<bool>(d), 1234);
  ASSERT_EQ(a.blocks.size(), b.blocks.size());
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    EXPECT_EQ(a.blocks[i].stats.agreements, b.blocks[i].stats.agreements);
    EXPECT_EQ(a.blocks[i].stats.bob_horizontal, b.blocks[i].stats.bob_horizontal);
  }
}

TEST(Signaling, EmptyDecisions) {
  EXPECT_THROW(signaling_experiment(reachable_geometry(), {1.0}, InfluenceModel::FiniteSpeedVCausal,
                                    std::vector<bool>{}, 1),
               DomainError);
}

}  // namespace
