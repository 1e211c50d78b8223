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

#ifndef QKDSIM_DECOY_SOURCE_H
#define QKDSIM_DECOY_SOURCE_H

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qkdsim/rng.h"

namespace qkdsim {

/// One source emission. A pulse carries both descriptions the source admits:
/// the definite-but-unknown-phase amplitude sqrt(S) e^{i phi}, which splits
/// deterministically on a beamsplitter, and the realized photon count, which
/// splits binomially. `realized_n` is sampled on demand.
struct PulseRecord {
  double s_level = 0.0;
  int level_index = 0;
  double phase = 0.0;
  std::complex<double> amplitude{0.0, 0.0};

  std::optional<std::int64_t> realized_n;

  std::int64_t eve_split_photons = 0;
  std::complex<double> eve_split_amplitude{0.0, 0.0};
  std::optional<std::int64_t> forwarded_n;
  std::complex<double> forwarded_amplitude{0.0, 0.0};

  bool lossless_forward = false;
  bool deleted = false;
  bool tagged = false;

  std::optional<std::int64_t> received_n;  // photons reaching the receiver
};

struct DecoyLevel {
  double s = 0.0;            // mean photon number
  double probability = 0.0;  // emission probability
};

struct DecoyScheme {
  std::vector<DecoyLevel> levels;
  int signal_index = 0;

  void validate() const;
};

/// Poisson pmf and the multi-photon tail P(n >= 2) = 1 - e^-S (1 + S).
double poisson_pmf(std::int64_t k, double mean);
double poisson_tail_ge2(double mean);

/// Samples a level and a uniform phase; the amplitude is set, the photon
/// count is left unsampled.
PulseRecord emit_pulse(const DecoyScheme& scheme, RngStream& rng);

/// Samples (once) the source photon count, Poisson(S).
std::int64_t realize_photon_count(PulseRecord& pulse, RngStream& rng);

/// Photon-number splitting: on a multi-photon pulse Eve removes one photon
/// and forwards the rest losslessly; single-photon and vacuum pulses pass
/// through untouched (still subject to downstream loss). Requires the count
/// to be realized.
PulseRecord pns_split(const PulseRecord& pulse);

/// Deterministic amplitude split: Eve's arm gets sqrt(kappa) of the
/// amplitude, the forwarded arm sqrt(1-kappa); energy is conserved exactly.
PulseRecord coherent_split(const PulseRecord& pulse, double kappa);

/// Photon count on Eve's split arm. If the source count was already
/// realized, the arm count is a binomial thinning of it; otherwise it is
/// drawn Poisson(|eve amplitude|^2). Either route yields Poisson(kappa * S)
/// marginally.
std::int64_t split_arm_count(PulseRecord& pulse, RngStream& rng);

/// Success probability of the likelihood-ratio photon-counting rule between
/// Poisson(mean_a) and Poisson(mean_b) with prior_a on the first.
double poisson_lr_success_analytic(double mean_a, double mean_b,
                                   double prior_a);

struct DiscriminationResult {
  double mc_success = 0.0;
  double analytic_success = 0.0;
  double std_error = 0.0;
  std::int64_t n_trials = 0;
};

/// Monte Carlo S-level discrimination from a kappa split arm, with the
/// analytic value computed alongside. Indistinguishable levels (s_a == s_b)
/// give the larger prior.
DiscriminationResult discriminate_levels_poisson(double kappa, double s_a,
                                                 double s_b, double prior_a,
                                                 std::int64_t n_trials,
                                                 RngStream& rng);

/// Minimum error probability for discriminating two pure coherent states
/// with amplitudes alpha and beta:
/// (1 - sqrt(1 - 4 p_a p_b exp(-|alpha-beta|^2))) / 2.
double helstrom_error(std::complex<double> alpha, std::complex<double> beta,
                      double prior_a = 0.5);

/// Channel transmission: resolves the received photon count. Deleted pulses
/// never arrive; lossless-forwarded photons all arrive; everything else is
/// thinned binomially with survival probability eta.
void transmit(PulseRecord& pulse, double eta, RngStream& rng);

/// No-attack arrival probability of a Poisson-S pulse through loss eta.
double expected_yield(double s, double eta);

struct PnsAttackParams {
  bool enabled = false;
  double attack_prob = 1.0;        // fraction of multi-photon pulses split
  double block_single_prob = 0.0;  // fraction of single-photon pulses deleted
};

/// Arrival probability of a Poisson-S pulse when the attack is active:
/// split multi-photon pulses arrive with certainty, unblocked singles pass
/// through loss.
double expected_yield_under_attack(double s, double eta,
                                   const PnsAttackParams& attack);

/// Single-photon blocking probability that matches the total arrival rate to
/// the no-attack rate, clamped to [0,1] when the multi-photon supply alone
/// already exceeds it.
double pns_rate_matching_block_prob(const DecoyScheme& scheme, double eta,
                                    double attack_prob);

/// Emits, optionally attacks, and transmits an ensemble. Every pulse owns a
/// dedicated substream (seed, pulse_index_base + i, site_label), so a pulse's
/// draws are reproducible independently of ensemble size, thread count, and
/// attack parameters.
std::vector<PulseRecord> run_decoy_ensemble(const DecoyScheme& scheme,
                                            double eta,
                                            const PnsAttackParams& attack,
                                            std::int64_t n_pulses,
                                            std::uint64_t master_seed,
                                            std::uint64_t pulse_index_base,
                                            std::string_view site_label =
                                                "decoy.pulse");

struct LevelYield {
  double s = 0.0;
  std::int64_t pulses = 0;
  std::int64_t arrivals = 0;
  double yield = 0.0;
  double expected = 0.0;
  double sigma = 0.0;
  double deviation_sigmas = 0.0;
};

struct YieldCheckResult {
  std::vector<LevelYield> levels;
  bool alarm = false;
  double nominal_false_alarm = 0.0;
};

/// Compares per-level arrival yields against the known-loss model
/// y(S) = 1 - e^{-eta S} and raises the alarm when any level deviates by
/// more than tolerance_sigmas binomial standard deviations. Rejects schemes
/// with fewer than two levels.
YieldCheckResult decoy_yield_check(std::span<const PulseRecord> records,
                                   const DecoyScheme& scheme, double eta,
                                   double tolerance_sigmas);

struct TaggedFractionResult {
  double fraction = 0.0;         // tagged share of arrivals
  double multi_fraction = 0.0;   // source P(n >= 2) estimate
  double single_fraction = 0.0;  // source P(n = 1) estimate
  bool supply_exceeds_single_throughput = false;
};

/// Tagged share of the receiver's arrivals, plus whether the multi-photon
/// supply covers the expected single-photon throughput eta * P(n = 1).
TaggedFractionResult tagged_fraction(std::span<const PulseRecord> records,
                                     double eta);

}  // namespace qkdsim

#endif  // QKDSIM_DECOY_SOURCE_H
