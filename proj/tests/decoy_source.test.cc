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

#include "qkdsim/decoy_source.h"

#include <cmath>

#include "gtest/gtest.h"
#include "qkdsim/stats.h"
#include "test_util.h"

namespace qkdsim {
namespace {

using qkdsim::testing::kHelstrom1v0;
using qkdsim::testing::kLrSuccess1v0K09;
using qkdsim::testing::kPoissonGe2At05;

DecoyScheme two_level_scheme() {
  DecoyScheme scheme;
  scheme.levels = {{0.5, 0.5}, {0.1, 0.5}};
  scheme.signal_index = 0;
  return scheme;
}

TEST(DecoyScheme, Validation) {
  DecoyScheme scheme = two_level_scheme();
  scheme.levels[1].probability = 0.6;
  EXPECT_THROW(scheme.validate(), std::invalid_argument);
  scheme = two_level_scheme();
  scheme.levels[1].s = 0.5;
  EXPECT_THROW(scheme.validate(), std::invalid_argument);
  scheme = two_level_scheme();
  scheme.signal_index = 5;
  EXPECT_THROW(scheme.validate(), std::invalid_argument);
}

TEST(EmitPulse, VacuumLevelNeverYieldsPhotons) {
  DecoyScheme scheme;
  scheme.levels = {{0.0, 0.5}, {1.0, 0.5}};
  RngStream rng(70, 0, "decoy.vacuum");
  for (int i = 0; i < 2000; ++i) {
    PulseRecord pulse = emit_pulse(scheme, rng);
    if (pulse.s_level == 0.0) {
      EXPECT_EQ(realize_photon_count(pulse, rng), 0);
      EXPECT_DOUBLE_EQ(std::norm(pulse.amplitude), 0.0);
    }
  }
}

TEST(EmitPulse, PoissonMeanAndMultiPhotonTail) {
  DecoyScheme scheme;
  scheme.levels = {{1.0, 0.5}, {0.5, 0.5}};
  RngStream rng(71, 0, "decoy.mean");
  const std::int64_t n = 400000;
  double sum_s1 = 0.0;
  std::int64_t count_s1 = 0;
  std::int64_t multi_s05 = 0;
  std::int64_t count_s05 = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    PulseRecord pulse = emit_pulse(scheme, rng);
    EXPECT_NEAR(std::norm(pulse.amplitude), pulse.s_level, 1e-9);
    EXPECT_GE(pulse.phase, 0.0);
    EXPECT_LT(pulse.phase, 2.0 * std::numbers::pi);
    const std::int64_t photons = realize_photon_count(pulse, rng);
    if (pulse.s_level == 1.0) {
      sum_s1 += static_cast<double>(photons);
      ++count_s1;
    } else {
      multi_s05 += photons >= 2 ? 1 : 0;
      ++count_s05;
    }
  }
  EXPECT_WITHIN_SIGMAS(sum_s1 / count_s1, 1.0, std::sqrt(1.0 / count_s1), 4);
  const double tail = static_cast<double>(multi_s05) / count_s05;
  EXPECT_WITHIN_SIGMAS(
      tail, kPoissonGe2At05,
      std::sqrt(kPoissonGe2At05 * (1 - kPoissonGe2At05) / count_s05), 4);
}

TEST(PnsSplit, SplitsOnlyMultiPhotonPulses) {
  PulseRecord pulse;
  pulse.s_level = 0.5;
  pulse.realized_n = 0;
  pulse.forwarded_n = 0;
  PulseRecord untouched = pns_split(pulse);
  EXPECT_FALSE(untouched.tagged);
  EXPECT_EQ(*untouched.forwarded_n, 0);

  pulse.realized_n = 3;
  pulse.forwarded_n = 3;
  PulseRecord split = pns_split(pulse);
  EXPECT_TRUE(split.tagged);
  EXPECT_TRUE(split.lossless_forward);
  EXPECT_EQ(split.eve_split_photons, 1);
  EXPECT_EQ(*split.forwarded_n, 2);

  PulseRecord unsampled;
  EXPECT_THROW(pns_split(unsampled), std::invalid_argument);
}

TEST(PnsSplit, TaggedFractionMatchesPoissonTail) {
  DecoyScheme scheme;
  scheme.levels = {{0.5, 1.0}};
  RngStream rng(72, 0, "decoy.tagfrac");
  const std::int64_t n = 300000;
  std::int64_t tagged = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    PulseRecord pulse = emit_pulse(scheme, rng);
    realize_photon_count(pulse, rng);
    tagged += pns_split(pulse).tagged ? 1 : 0;
  }
  const double fraction = static_cast<double>(tagged) / n;
  EXPECT_WITHIN_SIGMAS(
      fraction, kPoissonGe2At05,
      std::sqrt(kPoissonGe2At05 * (1 - kPoissonGe2At05) / n), 4);
}

TEST(CoherentSplit, EnergyConservation) {
  RngStream rng(73, 0, "decoy.energy");
  for (int i = 0; i < 100000; ++i) {
    PulseRecord pulse;
    pulse.s_level = rng.uniform(0.0, 3.0);
    pulse.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double r = std::sqrt(pulse.s_level);
    pulse.amplitude = {r * std::cos(pulse.phase), r * std::sin(pulse.phase)};
    const PulseRecord split = coherent_split(pulse, rng.uniform01());
    const double energy = std::norm(split.eve_split_amplitude) +
                          std::norm(split.forwarded_amplitude);
    ASSERT_NEAR(energy, pulse.s_level, 1e-12);
  }
}

TEST(CoherentSplit, EdgeProportions) {
  PulseRecord pulse;
  pulse.s_level = 1.0;
  pulse.amplitude = {1.0, 0.0};
  const PulseRecord vacuum_tap = coherent_split(pulse, 0.0);
  EXPECT_DOUBLE_EQ(std::norm(vacuum_tap.eve_split_amplitude), 0.0);
  EXPECT_DOUBLE_EQ(std::norm(vacuum_tap.forwarded_amplitude), 1.0);
  const PulseRecord strong_tap = coherent_split(pulse, 0.9);
  EXPECT_NEAR(std::norm(strong_tap.eve_split_amplitude), 0.9, 1e-12);
  EXPECT_NEAR(std::norm(strong_tap.forwarded_amplitude), 0.1, 1e-12);
  EXPECT_THROW(coherent_split(pulse, 1.5), std::invalid_argument);
}

// Both routes to the split-arm count (binomial thinning of a realized count,
// or direct Poisson on the arm energy) must give Poisson(kappa * S).
TEST(SplitArmCount, ThinningGivesPoissonStatistics) {
  const double s = 2.0;
  const double kappa = 0.35;
  for (bool realize_first : {true, false}) {
    RngStream rng(74, realize_first ? 0 : 1, "decoy.thinning");
    const std::int64_t n = 200000;
    std::vector<std::int64_t> histogram(30, 0);
    for (std::int64_t i = 0; i < n; ++i) {
      PulseRecord pulse;
      pulse.s_level = s;
      pulse.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double r = std::sqrt(s);
      pulse.amplitude = {r * std::cos(pulse.phase), r * std::sin(pulse.phase)};
      if (realize_first) realize_photon_count(pulse, rng);
      PulseRecord split = coherent_split(pulse, kappa);
      const std::int64_t count = split_arm_count(split, rng);
      if (count < static_cast<std::int64_t>(histogram.size()))
        ++histogram[static_cast<std::size_t>(count)];
      if (realize_first)
        EXPECT_EQ(*split.forwarded_n + split.eve_split_photons,
                  *split.realized_n);
    }
    // Chi-square against Poisson(0.7), tail bins merged at expected < 10.
    const double mean = kappa * s;
    double chi2 = 0.0;
    int bins = 0;
    double tail_expected = static_cast<double>(n);
    std::int64_t tail_observed = n;
    for (std::size_t k = 0; k < histogram.size(); ++k) {
      const double expected = poisson_pmf(static_cast<std::int64_t>(k), mean) *
                              static_cast<double>(n);
      if (expected < 10.0) break;
      chi2 += std::pow(static_cast<double>(histogram[k]) - expected, 2) /
              expected;
      tail_expected -= expected;
      tail_observed -= histogram[k];
      ++bins;
    }
    if (tail_expected > 0.0) {
      chi2 += std::pow(static_cast<double>(tail_observed) - tail_expected, 2) /
              tail_expected;
      ++bins;
    }
    EXPECT_LT(chi2, qkdsim::testing::chi_square_critical_99(bins - 1))
        << "route realize_first=" << realize_first;
  }
}

TEST(DiscriminateLevels, SignalVersusVacuum) {
  RngStream rng(75, 0, "decoy.disc");
  const DiscriminationResult result =
      discriminate_levels_poisson(0.9, 1.0, 0.0, 0.5, 200000, rng);
  EXPECT_NEAR(result.analytic_success, kLrSuccess1v0K09, 1e-12);
  EXPECT_WITHIN_SIGMAS(result.mc_success, result.analytic_success,
                       result.std_error, 4);
}

TEST(DiscriminateLevels, IndistinguishableLevelsGuessThePrior) {
  RngStream rng(76, 0, "decoy.disc.eq");
  const DiscriminationResult result =
      discriminate_levels_poisson(0.9, 0.7, 0.7, 0.5, 20000, rng);
  EXPECT_NEAR(result.analytic_success, 0.5, 1e-12);
  EXPECT_WITHIN_SIGMAS(result.mc_success, 0.5, result.std_error, 4);
}

TEST(DiscriminateLevels, SuccessNondecreasingInKappa) {
  double previous = 0.0;
  for (double kappa = 0.1; kappa <= 1.0 + 1e-9; kappa += 0.1) {
    const double success = poisson_lr_success_analytic(kappa * 1.0,
                                                       kappa * 0.0, 0.5);
    EXPECT_GE(success, previous - 1e-12);
    previous = success;
  }
}

TEST(DiscriminateLevels, LikelihoodRatioBeatsFixedThresholds) {
  const double kappa = 0.7;
  const double mean_a = kappa * 1.0;
  const double mean_b = kappa * 0.3;
  const double lr = poisson_lr_success_analytic(mean_a, mean_b, 0.5);
  for (std::int64_t threshold = 0; threshold <= 10; ++threshold) {
    // Guess the larger level when count >= threshold.
    double tail_a = 0.0, tail_b = 0.0;
    for (std::int64_t k = threshold; k <= 60; ++k) {
      tail_a += poisson_pmf(k, mean_a);
      tail_b += poisson_pmf(k, mean_b);
    }
    const double success = 0.5 * tail_a + 0.5 * (1.0 - tail_b);
    EXPECT_LE(success, lr + 1e-12);
  }
}

TEST(HelstromError, KnownValues) {
  EXPECT_DOUBLE_EQ(helstrom_error({1.0, 0.0}, {1.0, 0.0}, 0.5), 0.5);
  EXPECT_NEAR(helstrom_error({1.0, 0.0}, {0.0, 0.0}, 0.5), kHelstrom1v0, 1e-12);
  EXPECT_LT(helstrom_error({6.0, 0.0}, {0.0, 0.0}, 0.5), 1e-9);
}

TEST(HelstromError, QuantumBoundDominatesCounting) {
  for (double kappa : {0.3, 0.6, 0.9}) {
    for (double s_a : {0.5, 1.0, 2.0}) {
      for (double s_b : {0.0, 0.1}) {
        const double counting_error =
            1.0 - poisson_lr_success_analytic(kappa * s_a, kappa * s_b, 0.5);
        const double quantum = helstrom_error(
            {std::sqrt(kappa * s_a), 0.0}, {std::sqrt(kappa * s_b), 0.0}, 0.5);
        EXPECT_LE(quantum, counting_error + 1e-12);
      }
    }
  }
}

TEST(Transmit, ResolvesArrivals) {
  RngStream rng(77, 0, "decoy.transmit");
  PulseRecord pulse;
  pulse.s_level = 1.0;
  pulse.realized_n = 5;
  pulse.forwarded_n = 5;
  pulse.lossless_forward = true;
  transmit(pulse, 0.1, rng);
  EXPECT_EQ(*pulse.received_n, 5);
  pulse.deleted = true;
  transmit(pulse, 0.1, rng);
  EXPECT_EQ(*pulse.received_n, 0);
}

TEST(YieldCheck, RejectsSingleLevel) {
  DecoyScheme scheme;
  scheme.levels = {{0.5, 1.0}};
  EXPECT_THROW(decoy_yield_check({}, scheme, 0.25, 5.0),
               std::invalid_argument);
}

TEST(YieldCheck, VacuumLevelYieldIsAlwaysZero) {
  DecoyScheme scheme;
  scheme.levels = {{0.5, 0.5}, {0.0, 0.5}};
  PnsAttackParams attack;
  attack.enabled = true;
  const auto records = run_decoy_ensemble(scheme, 0.25, attack, 20000, 78, 0);
  for (const PulseRecord& pulse : records) {
    if (pulse.s_level == 0.0) EXPECT_EQ(pulse.received_n.value_or(0), 0);
  }
}

TEST(YieldCheck, FalseAlarmWithinNominalRate) {
  const DecoyScheme scheme = two_level_scheme();
  const double eta = 0.25;
  const double tolerance = 3.0;
  const int ensembles = 300;
  const std::int64_t pulses = 20000;
  int alarms = 0;
  double nominal = 0.0;
  for (int e = 0; e < ensembles; ++e) {
    const auto records = run_decoy_ensemble(
        scheme, eta, PnsAttackParams{}, pulses, 79,
        static_cast<std::uint64_t>(e) * static_cast<std::uint64_t>(pulses));
    const YieldCheckResult check =
        decoy_yield_check(records, scheme, eta, tolerance);
    alarms += check.alarm ? 1 : 0;
    nominal = check.nominal_false_alarm;
  }
  const double rate = static_cast<double>(alarms) / ensembles;
  const double sigma = std::sqrt(nominal * (1.0 - nominal) / ensembles);
  EXPECT_LE(rate, nominal + 3.0 * sigma);
}

TEST(YieldCheck, NaivePnsRaisesAlarm) {
  DecoyScheme scheme;
  scheme.levels = {{0.5, 0.5}, {0.1, 0.5}};
  const double eta = 0.25;
  PnsAttackParams attack;
  attack.enabled = true;
  attack.attack_prob = 1.0;
  attack.block_single_prob = pns_rate_matching_block_prob(scheme, eta, 1.0);
  int alarms = 0;
  const int ensembles = 60;
  for (int e = 0; e < ensembles; ++e) {
    const auto records = run_decoy_ensemble(
        scheme, eta, attack, 100000, 80,
        static_cast<std::uint64_t>(e) * 100000ull);
    alarms += decoy_yield_check(records, scheme, eta, 5.0).alarm ? 1 : 0;
  }
  EXPECT_GT(static_cast<double>(alarms) / ensembles, 0.95);
}

TEST(YieldCheck, AlarmRateMonotoneInAttackAggressiveness) {
  const DecoyScheme scheme = two_level_scheme();
  const double eta = 0.25;
  const int ensembles = 40;
  const std::int64_t pulses = 10000;
  double previous_rate = -1.0;
  for (double aggressiveness : {0.0, 0.05, 0.2, 0.6, 1.0}) {
    PnsAttackParams attack;
    attack.enabled = true;
    attack.attack_prob = aggressiveness;
    attack.block_single_prob = 0.0;
    int alarms = 0;
    for (int e = 0; e < ensembles; ++e) {
      // Same seeds across aggressiveness values (common random numbers).
      const auto records = run_decoy_ensemble(
          scheme, eta, attack, pulses, 81,
          static_cast<std::uint64_t>(e) * static_cast<std::uint64_t>(pulses));
      alarms += decoy_yield_check(records, scheme, eta, 5.0).alarm ? 1 : 0;
    }
    const double rate = static_cast<double>(alarms) / ensembles;
    EXPECT_GE(rate, previous_rate - 1e-12);
    previous_rate = rate;
  }
  EXPECT_DOUBLE_EQ(previous_rate, 1.0);
}

TEST(TaggedFraction, BreachConditionFromPoissonArithmetic) {
  // P(n>=2 | S=0.5) = 0.0902 exceeds eta * P(n=1 | S=0.5) = 0.00303 at
  // eta = 0.01: the multi-photon supply covers the single-photon throughput.
  DecoyScheme scheme;
  scheme.levels = {{0.5, 1.0}};
  PnsAttackParams attack;
  attack.enabled = true;
  const auto records = run_decoy_ensemble(scheme, 0.01, attack, 200000, 82, 0);
  const TaggedFractionResult result = tagged_fraction(records, 0.01);
  EXPECT_TRUE(result.supply_exceeds_single_throughput);
  // Analytic tagged share of arrivals: P(n>=2) / (P(n>=2) + eta P(n=1)).
  const double p1 = 0.5 * std::exp(-0.5);
  const double expected =
      kPoissonGe2At05 / (kPoissonGe2At05 + 0.01 * p1);
  const double arrivals = kPoissonGe2At05 + 0.01 * p1;
  const double sigma =
      std::sqrt(expected * (1.0 - expected) / (200000.0 * arrivals));
  EXPECT_WITHIN_SIGMAS(result.fraction, expected, sigma, 4);
}

TEST(TaggedFraction, VanishesForWeakSourceWithoutLoss) {
  DecoyScheme scheme;
  scheme.levels = {{0.05, 1.0}};
  PnsAttackParams attack;
  attack.enabled = true;
  const auto records = run_decoy_ensemble(scheme, 1.0, attack, 100000, 83, 0);
  const TaggedFractionResult result = tagged_fraction(records, 1.0);
  EXPECT_LT(result.fraction, 0.05);
  EXPECT_FALSE(result.supply_exceeds_single_throughput);
}

TEST(RunDecoyEnsemble, DeterministicForFixedSeeds) {
  const DecoyScheme scheme = two_level_scheme();
  PnsAttackParams attack;
  attack.enabled = true;
  attack.block_single_prob = 0.3;
  const auto a = run_decoy_ensemble(scheme, 0.25, attack, 5000, 84, 0);
  const auto b = run_decoy_ensemble(scheme, 0.25, attack, 5000, 84, 0);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].received_n.value_or(-1), b[i].received_n.value_or(-1));
    EXPECT_EQ(a[i].tagged, b[i].tagged);
  }
}

}  // namespace
}  // namespace qkdsim
