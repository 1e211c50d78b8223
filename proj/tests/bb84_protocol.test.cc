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

#include "qkdsim/bb84_protocol.h"

#include <cmath>

#include "gtest/gtest.h"
#include "test_util.h"

namespace qkdsim {
namespace {

using qkdsim::testing::kBreidbartSuccess;

Bb84Config prs_config() {
  Bb84Config config;
  config.n_sent = 400000;
  config.eta = 0.1;
  config.attack_fraction = 0.08;
  config.attack_basis = MeasBasis::breidbart();
  config.deletion_policy = DeletionPolicy::kDeleteBitOne;
  config.check_fraction = 0.1;
  config.qber_threshold = 0.11;
  config.intrinsic_error = 0.0;
  return config;
}

TEST(Bb84Config, Validation) {
  Bb84Config config = prs_config();
  config.eta = 0.0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config = prs_config();
  config.attack_fraction = 1.5;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config = prs_config();
  config.n_sent = 0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
}

TEST(RunSession, ConservationBookkeeping) {
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    Bb84Config config = prs_config();
    config.n_sent = 20000;
    RngStream rng(50, trial, "bb84.conserve");
    const SessionTranscript transcript = run_session(config, rng);
    EXPECT_EQ(transcript.n_deleted + transcript.n_lost + transcript.n_arrived,
              config.n_sent);
    std::int64_t deleted = 0, lost = 0, arrived = 0, sifted = 0;
    for (const QubitRecord& record : transcript.qubits) {
      deleted += record.deleted ? 1 : 0;
      lost += record.lost ? 1 : 0;
      arrived += record.arrived ? 1 : 0;
      EXPECT_EQ((record.deleted ? 1 : 0) + (record.lost ? 1 : 0) +
                    (record.arrived ? 1 : 0),
                1);
    }
    for (std::int64_t position : transcript.sifted_positions) {
      EXPECT_TRUE(transcript.qubits[static_cast<std::size_t>(position)].arrived);
      ++sifted;
    }
    EXPECT_EQ(deleted, transcript.n_deleted);
    EXPECT_EQ(lost, transcript.n_lost);
    EXPECT_EQ(arrived, transcript.n_arrived);
    EXPECT_EQ(static_cast<std::int64_t>(transcript.checked_positions.size()) +
                  static_cast<std::int64_t>(transcript.key_bits.size()),
              sifted);
  }
}

TEST(RunSession, NoAttackNoNoiseIsClean) {
  Bb84Config config = prs_config();
  config.attack_fraction = 0.0;
  config.n_sent = 100000;
  RngStream rng(51, 0, "bb84.clean");
  const SessionTranscript transcript = run_session(config, rng);
  EXPECT_DOUBLE_EQ(transcript.qber_observed, 0.0);
  EXPECT_FALSE(transcript.aborted);
  const KeyBiasReport bias = key_bias_report({&transcript, 1});
  EXPECT_LE(std::abs(bias.bias_sigmas), 3.0);
}

TEST(RunSession, SiftingKeepsHalfWithoutLoss) {
  Bb84Config config = prs_config();
  config.eta = 1.0;
  config.attack_fraction = 1.0;
  config.deletion_policy = DeletionPolicy::kNone;
  config.qber_threshold = 1.0;  // keep the session alive under full attack
  config.n_sent = 100000;
  RngStream rng(52, 0, "bb84.sift");
  const SessionTranscript transcript = run_session(config, rng);
  const double sifted_fraction =
      static_cast<double>(transcript.sifted_positions.size()) /
      static_cast<double>(config.n_sent);
  const double sigma = std::sqrt(0.25 / static_cast<double>(config.n_sent));
  EXPECT_WITHIN_SIGMAS(sifted_fraction, 0.5, sigma, 4);
}

TEST(EstimateQber, PlantedDisagreements) {
  SessionTranscript transcript;
  transcript.sifted_adam_bits.assign(100, 0);
  transcript.sifted_babe_bits.assign(100, 0);
  for (int i = 0; i < 10; ++i) transcript.sifted_babe_bits[i * 10] = 1;
  transcript.sifted_positions.resize(100);
  RngStream rng(53, 0, "bb84.qber");
  EXPECT_DOUBLE_EQ(estimate_qber(transcript, 1.0, rng), 0.10);
  EXPECT_EQ(transcript.key_bits.size(), 0u);
  EXPECT_EQ(transcript.checked_positions.size(), 100u);
}

TEST(EstimateQber, AllAgreeGivesZeroAndRemovesCheckBits) {
  SessionTranscript transcript;
  transcript.sifted_adam_bits.assign(200, 1);
  transcript.sifted_babe_bits.assign(200, 1);
  transcript.sifted_positions.resize(200);
  RngStream rng(54, 0, "bb84.qber0");
  EXPECT_DOUBLE_EQ(estimate_qber(transcript, 0.25, rng), 0.0);
  EXPECT_EQ(transcript.checked_positions.size(), 50u);
  EXPECT_EQ(transcript.key_bits.size(), 150u);
}

TEST(EstimateQber, RejectsEmptySift) {
  SessionTranscript transcript;
  RngStream rng(55, 0, "bb84.qber.empty");
  EXPECT_THROW(estimate_qber(transcript, 0.5, rng), std::invalid_argument);
}

TEST(EstimateQber, ConvergesToTruePerBitError) {
  Bb84Config config = prs_config();
  config.attack_fraction = 0.0;
  config.intrinsic_error = 0.05;
  config.n_sent = 4000;
  config.check_fraction = 0.5;
  double total_checked = 0.0;
  double total_errors = 0.0;
  for (std::uint64_t session = 0; session < 200; ++session) {
    RngStream rng(56, session, "bb84.converge");
    const SessionTranscript transcript = run_session(config, rng);
    const double checked =
        static_cast<double>(transcript.checked_positions.size());
    total_checked += checked;
    total_errors += transcript.qber_observed * checked;
  }
  const double pooled = total_errors / total_checked;
  const double sigma = std::sqrt(0.05 * 0.95 / total_checked);
  EXPECT_WITHIN_SIGMAS(pooled, 0.05, sigma, 4);
}

TEST(KeyBias, DeletionBiasMatchesCompositionOracle) {
  // Composition oracle: attacked-kept qubits reach the sifted key at rate
  // g = (f/2) / (f/2 + (1-f) eta); their sender bit posterior is cos^2(pi/8).
  const double f = 0.08;
  const double eta = 0.1;
  const double g = (f / 2.0) / (f / 2.0 + (1.0 - f) * eta);
  const double oracle_zero_fraction = 0.5 * (1.0 - g) + g * kBreidbartSuccess;
  ASSERT_NEAR(oracle_zero_fraction, 0.6071373910888708, 1e-12);

  Bb84Config config = prs_config();
  RngStream rng(57, 0, "bb84.bias");
  const SessionTranscript transcript = run_session(config, rng);
  EXPECT_FALSE(transcript.aborted);
  const KeyBiasReport bias = key_bias_report({&transcript, 1});
  EXPECT_GT(bias.pooled_bits, 10000);
  const double sigma =
      0.5 / std::sqrt(static_cast<double>(bias.pooled_bits));
  EXPECT_WITHIN_SIGMAS(bias.zero_fraction, oracle_zero_fraction, sigma, 4);
  EXPECT_GT(bias.bias_sigmas, 10.0);

  // QBER composition: g * 1/4, well below the 0.11 abort threshold.
  EXPECT_WITHIN_SIGMAS(
      transcript.qber_observed, g * 0.25,
      std::sqrt(g * 0.25 * (1 - g * 0.25) /
                static_cast<double>(transcript.checked_positions.size())),
      4);
}

TEST(KeyBias, InterceptionAloneDoesNotBias) {
  // Forwarding both outcomes keeps the key unbiased even though the
  // amplified disturbance would trip the QBER check; disable the abort to
  // isolate the bias question.
  Bb84Config config = prs_config();
  config.deletion_policy = DeletionPolicy::kNone;
  config.qber_threshold = 1.0;
  RngStream rng(58, 0, "bb84.nobias");
  const SessionTranscript transcript = run_session(config, rng);
  const KeyBiasReport bias = key_bias_report({&transcript, 1});
  EXPECT_LE(std::abs(bias.bias_sigmas), 4.0);
}

TEST(KeyBias, NoDeletionHeadroomCollapsesBias) {
  // Without loss the deletions would be visible, so Eve forwards everything;
  // the bias disappears.
  Bb84Config config = prs_config();
  config.eta = 1.0;
  config.attack_fraction = 0.5;
  config.deletion_policy = DeletionPolicy::kNone;
  config.qber_threshold = 1.0;
  config.n_sent = 200000;
  RngStream rng(59, 0, "bb84.headroom");
  const SessionTranscript transcript = run_session(config, rng);
  const KeyBiasReport bias = key_bias_report({&transcript, 1});
  EXPECT_LE(std::abs(bias.bias_sigmas), 4.0);
}

TEST(KeyBias, RejectsAllAborted) {
  SessionTranscript aborted;
  aborted.aborted = true;
  EXPECT_THROW(key_bias_report({&aborted, 1}), std::invalid_argument);
  EXPECT_THROW(key_bias_from_counts(0, 0), std::invalid_argument);
}

TEST(MaxAttackFraction, Examples) {
  EXPECT_DOUBLE_EQ(max_attack_fraction(0.02, 0.25), 0.08);
  EXPECT_DOUBLE_EQ(max_attack_fraction(0.0, 0.25), 0.0);
  EXPECT_DOUBLE_EQ(max_attack_fraction(0.5, 0.25), 1.0);
  EXPECT_THROW(max_attack_fraction(0.02, 0.0), std::invalid_argument);
}

TEST(Bb84Analytic, BreidbartPerAttackedErrorIsOneQuarter) {
  const Bb84Analytic analytic = bb84_analytic(prs_config());
  EXPECT_NEAR(analytic.per_attacked_error, 0.25, 1e-12);
  EXPECT_NEAR(analytic.keep_prob, 0.5, 1e-12);
  EXPECT_NEAR(analytic.attacked_fraction_of_sifted, 0.30303030303030304,
              1e-12);
  EXPECT_NEAR(analytic.expected_zero_fraction, 0.6071373910888708, 1e-12);
}

TEST(Bb84Analytic, SessionMatchesExpectedQber) {
  Bb84Config config = prs_config();
  config.intrinsic_error = 0.01;
  config.n_sent = 100000;
  const Bb84Analytic analytic = bb84_analytic(config);
  double total_checked = 0.0, total_errors = 0.0;
  for (std::uint64_t session = 0; session < 20; ++session) {
    RngStream rng(60, session, "bb84.expqber");
    const SessionTranscript transcript = run_session(config, rng);
    const double checked =
        static_cast<double>(transcript.checked_positions.size());
    total_checked += checked;
    total_errors += transcript.qber_observed * checked;
  }
  const double pooled = total_errors / total_checked;
  const double sigma = std::sqrt(analytic.expected_qber *
                                 (1.0 - analytic.expected_qber) /
                                 total_checked);
  EXPECT_WITHIN_SIGMAS(pooled, analytic.expected_qber, sigma, 4);
}

TEST(DeletionPolicy, LowConfidenceThresholdGatesKeeps) {
  // The uniform four-state ensemble gives every outcome the same posterior
  // confidence, so the threshold either keeps everything or deletes
  // everything attacked.
  Bb84Config config = prs_config();
  config.deletion_policy = DeletionPolicy::kDeleteLowConfidence;
  config.n_sent = 50000;

  config.confidence_threshold = 0.8;  // below cos^2(pi/8): keep all
  EXPECT_NEAR(bb84_analytic(config).keep_prob, 1.0, 1e-12);
  config.qber_threshold = 1.0;
  RngStream keep_rng(63, 0, "bb84.lowconf.keep");
  const SessionTranscript kept = run_session(config, keep_rng);
  std::int64_t attacked_deleted = 0;
  for (const QubitRecord& record : kept.qubits)
    attacked_deleted += record.attacked && record.deleted ? 1 : 0;
  EXPECT_EQ(attacked_deleted, 0);

  config.confidence_threshold = 0.9;  // above cos^2(pi/8): delete all
  EXPECT_NEAR(bb84_analytic(config).keep_prob, 0.0, 1e-12);
  RngStream delete_rng(63, 1, "bb84.lowconf.delete");
  const SessionTranscript deleted = run_session(config, delete_rng);
  for (const QubitRecord& record : deleted.qubits)
    EXPECT_FALSE(record.attacked && record.arrived);
}

TEST(Throughput, MatchingHoldsArrivalRateNearNoAttackRate) {
  Bb84Config config = prs_config();
  config.attack_fraction = 0.3;
  config.match_throughput = true;
  config.n_sent = 200000;
  double arrived = 0.0;
  for (std::uint64_t session = 0; session < 5; ++session) {
    RngStream rng(61, session, "bb84.throughput");
    arrived += static_cast<double>(run_session(config, rng).n_arrived);
  }
  const double rate = arrived / (5.0 * static_cast<double>(config.n_sent));
  EXPECT_NEAR(rate, config.eta, 0.05 * config.eta);
}

TEST(AbortRate, TunedAttackerStaysMostlyUndetected) {
  // Eve picks f from the QBER budget (threshold minus intrinsic minus
  // margin) and matches throughput; sessions should rarely abort.
  Bb84Config config = prs_config();
  config.intrinsic_error = 0.01;
  config.match_throughput = true;
  config.attack_fraction = max_attack_fraction(0.11 - 0.01 - 0.01, 0.25);
  config.n_sent = 100000;
  int aborts = 0;
  for (std::uint64_t session = 0; session < 30; ++session) {
    RngStream rng(62, session, "bb84.abort");
    aborts += run_session(config, rng).aborted ? 1 : 0;
  }
  EXPECT_LT(aborts, 15);
}

}  // namespace
}  // namespace qkdsim
