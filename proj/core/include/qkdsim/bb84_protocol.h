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

#ifndef QKDSIM_BB84_PROTOCOL_H
#define QKDSIM_BB84_PROTOCOL_H

#include <cstdint>
#include <span>
#include <vector>

#include "qkdsim/qubit.h"
#include "qkdsim/rng.h"

namespace qkdsim {

enum class DeletionPolicy { kNone, kDeleteBitOne, kDeleteLowConfidence };

struct Bb84Config {
  std::int64_t n_sent = 0;
  double eta = 1.0;               // channel transmittance for unattacked qubits
  double attack_fraction = 0.0;   // fraction of qubits Eve intercepts
  MeasBasis attack_basis = MeasBasis::breidbart();
  DeletionPolicy deletion_policy = DeletionPolicy::kNone;
  double confidence_threshold = 0.85;  // for kDeleteLowConfidence
  double check_fraction = 0.1;
  double qber_threshold = 0.11;
  double intrinsic_error = 0.0;
  // When set, Eve thins her kept qubits so the receiver's arrival rate
  // matches the no-attack rate in expectation (deletions hide inside loss).
  bool match_throughput = false;

  void validate() const;
};

/// Per-qubit transcript row. Bases: 0 = Z, 1 = X.
struct QubitRecord {
  std::uint8_t adam_bit = 0;
  std::uint8_t adam_basis = 0;
  bool attacked = false;
  std::uint8_t eve_outcome = 0;
  bool deleted = false;  // removed by Eve (policy or throughput thinning)
  bool lost = false;     // absorbed by the channel
  bool arrived = false;
  std::uint8_t babe_basis = 0;
  std::uint8_t babe_bit = 0;
};

struct SessionTranscript {
  std::vector<QubitRecord> qubits;
  std::vector<std::int64_t> sifted_positions;  // indices into `qubits`
  std::vector<std::uint8_t> sifted_adam_bits;
  std::vector<std::uint8_t> sifted_babe_bits;
  std::vector<std::int64_t> checked_positions;  // indices into sifted arrays
  std::vector<std::uint8_t> key_bits;  // sender bits, check positions removed
  double qber_observed = 0.0;
  bool aborted = false;

  std::int64_t n_deleted = 0;
  std::int64_t n_lost = 0;
  std::int64_t n_arrived = 0;
  std::int64_t n_attacked = 0;
  std::int64_t n_attacked_kept_sifted = 0;
};

/// Runs one session: random signals, partial intercept-resend with the
/// configured deletion policy, loss, measurement, sifting, and QBER check.
/// Kept attacked qubits are forwarded losslessly.
SessionTranscript run_session(const Bb84Config& config, RngStream& rng);

/// Selects floor(check_fraction * n_sifted) check positions at random,
/// computes the disagreement fraction, and removes the checked bits from the
/// key. Rejects transcripts with an empty sifted key. Zero check bits yield
/// a QBER of 0 (no evidence).
double estimate_qber(SessionTranscript& transcript, double check_fraction,
                     RngStream& rng);

struct KeyBiasReport {
  double zero_fraction = 0.0;
  double expected_fluctuation = 0.0;  // binomial sd of the zero fraction
  double bias_sigmas = 0.0;
  std::int64_t pooled_bits = 0;
};

/// Pools key bits over the non-aborted transcripts and measures how far the
/// zero fraction sits from 1/2 in units of the binomial fluctuation.
/// Rejects an ensemble with no non-aborted transcript.
KeyBiasReport key_bias_report(std::span<const SessionTranscript> transcripts);

/// Same pooled statistic, computed from pre-counted totals.
KeyBiasReport key_bias_from_counts(std::int64_t zero_bits,
                                   std::int64_t total_bits);

/// Largest intercept fraction consistent with a QBER budget:
/// min(1, budget / per_attacked_error).
double max_attack_fraction(double qber_budget, double per_attacked_error);

/// Closed-form composition of the session statistics, used as the analytic
/// reference for Monte Carlo runs.
struct Bb84Analytic {
  double keep_prob = 1.0;      // P(Eve keeps | attacked)
  double forward_prob = 1.0;   // throughput-matching thinning
  double arrival_rate = 0.0;   // per sent qubit
  double attacked_fraction_of_sifted = 0.0;
  double expected_zero_fraction = 0.5;
  double expected_qber = 0.0;
  double per_attacked_error = 0.0;  // sifted error prob of an attacked qubit
};
Bb84Analytic bb84_analytic(const Bb84Config& config);

}  // namespace qkdsim

#endif  // QKDSIM_BB84_PROTOCOL_H
