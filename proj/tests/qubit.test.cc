// Copyright 2026 The qkdsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qkdsim/qubit.h"

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"
#include "test_util.h"

namespace qkdsim {
namespace {

using qkdsim::testing::kBreidbartInterceptError;
using qkdsim::testing::kBreidbartSuccess;
using qkdsim::testing::oracle_p0;

constexpr double kPi = std::numbers::pi;

TEST(Bb84State, CanonicalStates) {
  const QubitState z0 = bb84_state(0, BasisLabel::kZ);
  EXPECT_EQ(z0.amp0, std::complex<double>(1.0, 0.0));
  EXPECT_EQ(z0.amp1, std::complex<double>(0.0, 0.0));
  const QubitState x1 = bb84_state(1, BasisLabel::kX);
  EXPECT_NEAR(x1.amp0.real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(x1.amp1.real(), -1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(
      overlap_probability(bb84_state(0, BasisLabel::kZ),
                          bb84_state(0, BasisLabel::kX)),
      0.5, 1e-12);
  EXPECT_THROW(bb84_state(2, BasisLabel::kZ), std::invalid_argument);
  EXPECT_THROW(bb84_state(0, BasisLabel::kBreidbart), std::invalid_argument);
}

TEST(BornProbability, Eigenstate) {
  const BornProbabilities p =
      born_probability(bb84_state(0, BasisLabel::kZ), MeasBasis::z());
  EXPECT_DOUBLE_EQ(p.p0, 1.0);
  EXPECT_DOUBLE_EQ(p.p1, 0.0);
}

TEST(BornProbability, BreidbartGivesCosSquaredPiOver8) {
  const BornProbabilities p =
      born_probability(bb84_state(0, BasisLabel::kZ), MeasBasis::breidbart());
  EXPECT_NEAR(p.p0, kBreidbartSuccess, 1e-12);
  EXPECT_NEAR(p.p1, 1.0 - kBreidbartSuccess, 1e-12);
}

TEST(BornProbability, ConjugateBases) {
  const BornProbabilities p =
      born_probability(bb84_state(0, BasisLabel::kX), MeasBasis::z());
  EXPECT_NEAR(p.p0, 0.5, 1e-12);
  EXPECT_NEAR(p.p1, 0.5, 1e-12);
}

TEST(BornProbability, RejectsUnnormalizedState) {
  QubitState bad;
  bad.amp0 = {0.9, 0.0};
  bad.amp1 = {0.0, 0.0};
  EXPECT_THROW(born_probability(bad, MeasBasis::z()), std::invalid_argument);
}

TEST(BornProbability, SumsToOneOnRandomStates) {
  RngStream rng(11, 0, "test.born");
  for (int i = 0; i < 1000; ++i) {
    const double theta = rng.uniform(0.0, kPi);
    const double rel_phase = rng.uniform(0.0, 2.0 * kPi);
    QubitState state;
    state.amp0 = {std::cos(theta), 0.0};
    state.amp1 = std::sin(theta) *
                 std::complex<double>(std::cos(rel_phase), std::sin(rel_phase));
    const MeasBasis basis = MeasBasis::custom(rng.uniform(0.0, kPi));
    const BornProbabilities p = born_probability(state, basis);
    EXPECT_NEAR(p.p0 + p.p1, 1.0, 1e-12);
    EXPECT_GE(p.p0, 0.0);
    EXPECT_LE(p.p0, 1.0);
    EXPECT_NEAR(p.p0, oracle_p0(state.amp0, state.amp1, basis.angle), 1e-12);
  }
}

TEST(MeasureAndResend, EigenstateIsFixed) {
  RngStream rng(12, 0, "test.meas");
  for (int i = 0; i < 100; ++i) {
    const MeasureResult result =
        measure_and_resend(bb84_state(0, BasisLabel::kZ), MeasBasis::z(), rng);
    ASSERT_EQ(result.outcome, 0);
    EXPECT_NEAR(overlap_probability(result.resent,
                                    bb84_state(0, BasisLabel::kZ)),
                1.0, 1e-12);
  }
}

TEST(MeasureAndResend, FrequenciesMatchBornRule) {
  // Chi-square goodness of fit at the 99% level, 1e6 trials.
  RngStream rng(13, 0, "test.meas.freq");
  const MeasBasis basis = MeasBasis::breidbart();
  const QubitState state = bb84_state(0, BasisLabel::kZ);
  const std::int64_t n = 1000000;
  std::int64_t ones = 0;
  for (std::int64_t i = 0; i < n; ++i)
    ones += measure_and_resend(state, basis, rng).outcome;
  const double p1 = 1.0 - kBreidbartSuccess;
  const double expected_ones = p1 * static_cast<double>(n);
  const double expected_zeros = static_cast<double>(n) - expected_ones;
  const double observed_ones = static_cast<double>(ones);
  const double observed_zeros = static_cast<double>(n - ones);
  const double chi2 =
      (observed_ones - expected_ones) * (observed_ones - expected_ones) /
          expected_ones +
      (observed_zeros - expected_zeros) * (observed_zeros - expected_zeros) /
          expected_zeros;
  EXPECT_LT(chi2, qkdsim::testing::chi_square_critical_99(1));
  // Also within 4 standard errors of the analytic frequency.
  const double sigma = std::sqrt(p1 * (1.0 - p1) / static_cast<double>(n));
  EXPECT_WITHIN_SIGMAS(observed_ones / static_cast<double>(n), p1, sigma, 4);
}

// Brute-force composition: intercept in the intermediate basis, then measure
// in the sender's basis. The disturbance probability is 1/4 per attacked and
// checked qubit (not 3/4): sum over Eve's outcomes of
// P(outcome) * P(receiver flips).
TEST(MeasureAndResend, BreidbartInterceptDisturbanceIsOneQuarter) {
  double oracle = 0.0;
  for (int outcome = 0; outcome < 2; ++outcome) {
    const double angle = kPi / 8.0 + (outcome == 1 ? kPi / 2.0 : 0.0);
    const double p_outcome = oracle_p0(1.0, 0.0, angle);
    const double p_flip = 1.0 - oracle_p0(std::cos(angle), std::sin(angle), 0.0);
    oracle += p_outcome * p_flip;
  }
  ASSERT_NEAR(oracle, kBreidbartInterceptError, 1e-12);

  RngStream rng(14, 0, "test.intercept");
  const std::int64_t n = 1000000;
  std::int64_t flips = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const MeasureResult eve = measure_and_resend(
        bb84_state(0, BasisLabel::kZ), MeasBasis::breidbart(), rng);
    const MeasureResult babe = measure_and_resend(eve.resent, MeasBasis::z(), rng);
    flips += babe.outcome;
  }
  const double sigma = std::sqrt(0.25 * 0.75 / static_cast<double>(n));
  EXPECT_WITHIN_SIGMAS(static_cast<double>(flips) / static_cast<double>(n),
                       kBreidbartInterceptError, sigma, 4);
}

TEST(OptimalDeletionAdvantage, NoBudgetRecoversBreidbart) {
  const DeletionAdvantage best =
      optimal_deletion_advantage(bb84_ensemble(), 0.0, 720);
  EXPECT_NEAR(best.success_prob, kBreidbartSuccess, 1e-9);
  EXPECT_NEAR(best.best_basis_angle, kPi / 8.0, 1e-12);
  EXPECT_NEAR(best.expected_keep_fraction, 1.0, 1e-12);
}

TEST(OptimalDeletionAdvantage, MatchesDirectMaximizationAtZeroBudget) {
  // Independent maximization over the same angle grid, keep-all rule.
  double oracle = 0.0;
  const auto ensemble = bb84_ensemble();
  for (int gi = 0; gi < 720; ++gi) {
    const double angle = kPi * gi / 720.0;
    double success = 0.0;
    for (int outcome = 0; outcome < 2; ++outcome) {
      const double basis_angle = angle + (outcome == 1 ? kPi / 2.0 : 0.0);
      double joint[2] = {0.0, 0.0};
      for (const LabeledState& member : ensemble)
        joint[member.bit] += member.prior * oracle_p0(member.state.amp0,
                                                      member.state.amp1,
                                                      basis_angle);
      success += std::max(joint[0], joint[1]);
    }
    oracle = std::max(oracle, success);
  }
  const DeletionAdvantage best =
      optimal_deletion_advantage(bb84_ensemble(), 0.0, 720);
  EXPECT_NEAR(best.success_prob, oracle, 1e-12);
}

TEST(OptimalDeletionAdvantage, SingleKnownStateIsCertain) {
  const std::vector<LabeledState> one = {
      {bb84_state(1, BasisLabel::kX), 1.0, 1}};
  for (double budget : {0.0, 0.3, 0.9}) {
    const DeletionAdvantage best = optimal_deletion_advantage(one, budget, 90);
    EXPECT_NEAR(best.success_prob, 1.0, 1e-12);
  }
}

TEST(OptimalDeletionAdvantage, NondecreasingInBudget) {
  double previous = -1.0;
  for (double budget : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
    const DeletionAdvantage best =
        optimal_deletion_advantage(bb84_ensemble(), budget, 180);
    EXPECT_GE(best.success_prob, previous - 1e-12);
    previous = best.success_prob;
  }
}

TEST(OptimalDeletionAdvantage, PostselectionHelpsAsymmetricEnsembles) {
  // |0> vs |+>: discarding the ambiguous outcome allows an unambiguous
  // identification once the budget is large enough.
  const std::vector<LabeledState> pair = {
      {bb84_state(0, BasisLabel::kZ), 0.5, 0},
      {bb84_state(0, BasisLabel::kX), 0.5, 1},
  };
  const DeletionAdvantage keep_all = optimal_deletion_advantage(pair, 0.0, 720);
  const DeletionAdvantage postselect =
      optimal_deletion_advantage(pair, 0.8, 720);
  EXPECT_NEAR(keep_all.success_prob, kBreidbartSuccess, 1e-9);
  EXPECT_GT(postselect.success_prob, 0.999);
  EXPECT_GE(postselect.expected_keep_fraction, 0.2 - 1e-9);
}

TEST(OptimalDeletionAdvantage, Preconditions) {
  EXPECT_THROW(optimal_deletion_advantage({}, 0.0, 10), std::invalid_argument);
  EXPECT_THROW(optimal_deletion_advantage(bb84_ensemble(), 1.0, 10),
               std::invalid_argument);
  EXPECT_THROW(optimal_deletion_advantage(bb84_ensemble(), -0.1, 10),
               std::invalid_argument);
  std::vector<LabeledState> bad = bb84_ensemble();
  bad[0].prior = 0.5;
  EXPECT_THROW(optimal_deletion_advantage(bad, 0.0, 10),
               std::invalid_argument);
}

TEST(OutcomeStats, UniformEnsembleOutcomesAreEquiprobable) {
  for (double angle : {0.0, kPi / 8.0, kPi / 5.0, kPi / 3.0}) {
    const OutcomeStats stats =
        outcome_stats(bb84_ensemble(), MeasBasis::custom(angle));
    EXPECT_NEAR(stats.prob[0], 0.5, 1e-12);
    EXPECT_NEAR(stats.prob[1], 0.5, 1e-12);
  }
}

}  // namespace
}  // namespace qkdsim
