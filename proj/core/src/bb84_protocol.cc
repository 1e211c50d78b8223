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

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qkdsim {

namespace {

bool policy_keeps(const Bb84Config& config, const OutcomeStats& stats,
                  int outcome) {
  switch (config.deletion_policy) {
    case DeletionPolicy::kNone:
      return true;
    case DeletionPolicy::kDeleteBitOne:
      return outcome == 0;
    case DeletionPolicy::kDeleteLowConfidence:
      return stats.confidence[outcome] >= config.confidence_threshold;
  }
  return true;
}

double keep_probability(const Bb84Config& config, const OutcomeStats& stats) {
  double p = 0.0;
  for (int o = 0; o < 2; ++o)
    if (policy_keeps(config, stats, o)) p += stats.prob[o];
  return p;
}

}  // namespace

void Bb84Config::validate() const {
  if (n_sent < 1)
    throw std::invalid_argument("Bb84Config: n_sent must be >= 1");
  if (!(eta > 0.0 && eta <= 1.0))
    throw std::invalid_argument("Bb84Config: eta outside (0,1]");
  if (!(attack_fraction >= 0.0 && attack_fraction <= 1.0))
    throw std::invalid_argument("Bb84Config: attack_fraction outside [0,1]");
  if (!(check_fraction >= 0.0 && check_fraction <= 1.0))
    throw std::invalid_argument("Bb84Config: check_fraction outside [0,1]");
  if (!(qber_threshold >= 0.0 && qber_threshold <= 1.0))
    throw std::invalid_argument("Bb84Config: qber_threshold outside [0,1]");
  if (!(intrinsic_error >= 0.0 && intrinsic_error <= 0.5))
    throw std::invalid_argument("Bb84Config: intrinsic_error outside [0,0.5]");
  if (deletion_policy == DeletionPolicy::kDeleteLowConfidence &&
      !(confidence_threshold >= 0.5 && confidence_threshold <= 1.0))
    throw std::invalid_argument(
        "Bb84Config: confidence_threshold outside [0.5,1]");
}

SessionTranscript run_session(const Bb84Config& config, RngStream& rng) {
  config.validate();
  const OutcomeStats attack_stats =
      outcome_stats(bb84_ensemble(), config.attack_basis);
  const double p_keep = keep_probability(config, attack_stats);
  const double forward_prob =
      config.match_throughput && p_keep > 0.0
          ? std::min(1.0, config.eta / p_keep)
          : 1.0;

  SessionTranscript transcript;
  transcript.qubits.resize(static_cast<std::size_t>(config.n_sent));
  const MeasBasis bases[2] = {MeasBasis::z(), MeasBasis::x()};

  for (std::int64_t i = 0; i < config.n_sent; ++i) {
    QubitRecord& record = transcript.qubits[static_cast<std::size_t>(i)];
    record.adam_bit = rng.bernoulli(0.5) ? 1 : 0;
    record.adam_basis = rng.bernoulli(0.5) ? 1 : 0;
    const QubitState sent = bb84_state(
        record.adam_bit,
        record.adam_basis ? BasisLabel::kX : BasisLabel::kZ);
    QubitState in_flight = sent;

    record.attacked = rng.bernoulli(config.attack_fraction);
    if (record.attacked) {
      ++transcript.n_attacked;
      const MeasureResult meas =
          measure_and_resend(sent, config.attack_basis, rng);
      record.eve_outcome = static_cast<std::uint8_t>(meas.outcome);
      const bool kept = policy_keeps(config, attack_stats, meas.outcome) &&
                        (forward_prob >= 1.0 || rng.bernoulli(forward_prob));
      if (!kept) {
        record.deleted = true;
        ++transcript.n_deleted;
        continue;
      }
      // Kept qubits bypass channel loss.
      in_flight = meas.resent;
      record.arrived = true;
    } else {
      if (!rng.bernoulli(config.eta)) {
        record.lost = true;
        ++transcript.n_lost;
        continue;
      }
      record.arrived = true;
    }
    ++transcript.n_arrived;

    record.babe_basis = rng.bernoulli(0.5) ? 1 : 0;
    const BornProbabilities p =
        born_probability(in_flight, bases[record.babe_basis]);
    int outcome = rng.bernoulli(p.p1) ? 1 : 0;
    if (config.intrinsic_error > 0.0 && rng.bernoulli(config.intrinsic_error))
      outcome ^= 1;
    record.babe_bit = static_cast<std::uint8_t>(outcome);

    if (record.babe_basis == record.adam_basis) {
      transcript.sifted_positions.push_back(i);
      transcript.sifted_adam_bits.push_back(record.adam_bit);
      transcript.sifted_babe_bits.push_back(record.babe_bit);
      if (record.attacked) ++transcript.n_attacked_kept_sifted;
    }
  }

  if (!transcript.sifted_positions.empty()) {
    transcript.qber_observed =
        estimate_qber(transcript, config.check_fraction, rng);
    transcript.aborted = transcript.qber_observed > config.qber_threshold;
  }
  return transcript;
}

double estimate_qber(SessionTranscript& transcript, double check_fraction,
                     RngStream& rng) {
  const auto n_sifted =
      static_cast<std::int64_t>(transcript.sifted_adam_bits.size());
  if (n_sifted == 0)
    throw std::invalid_argument("estimate_qber: sifted key is empty");
  if (!(check_fraction >= 0.0 && check_fraction <= 1.0))
    throw std::invalid_argument("estimate_qber: check_fraction outside [0,1]");
  const auto n_check = static_cast<std::int64_t>(
      std::floor(check_fraction * static_cast<double>(n_sifted)));

  std::vector<std::int64_t> order(static_cast<std::size_t>(n_sifted));
  for (std::int64_t i = 0; i < n_sifted; ++i)
    order[static_cast<std::size_t>(i)] = i;
  for (std::int64_t i = 0; i < n_check; ++i) {
    const std::int64_t j =
        i + static_cast<std::int64_t>(
                rng.uniform_index(static_cast<std::uint64_t>(n_sifted - i)));
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(j)]);
  }
  transcript.checked_positions.assign(order.begin(), order.begin() + n_check);
  std::sort(transcript.checked_positions.begin(),
            transcript.checked_positions.end());

  std::int64_t disagreements = 0;
  std::vector<bool> is_checked(static_cast<std::size_t>(n_sifted), false);
  for (std::int64_t pos : transcript.checked_positions) {
    is_checked[static_cast<std::size_t>(pos)] = true;
    if (transcript.sifted_adam_bits[static_cast<std::size_t>(pos)] !=
        transcript.sifted_babe_bits[static_cast<std::size_t>(pos)])
      ++disagreements;
  }
  transcript.key_bits.clear();
  transcript.key_bits.reserve(static_cast<std::size_t>(n_sifted - n_check));
  for (std::int64_t i = 0; i < n_sifted; ++i) {
    if (!is_checked[static_cast<std::size_t>(i)])
      transcript.key_bits.push_back(
          transcript.sifted_adam_bits[static_cast<std::size_t>(i)]);
  }
  transcript.qber_observed =
      n_check == 0 ? 0.0
                   : static_cast<double>(disagreements) /
                         static_cast<double>(n_check);
  return transcript.qber_observed;
}

KeyBiasReport key_bias_from_counts(std::int64_t zero_bits,
                                   std::int64_t total_bits) {
  if (total_bits < 1)
    throw std::invalid_argument("key_bias: pooled key is empty");
  KeyBiasReport report;
  report.pooled_bits = total_bits;
  report.zero_fraction =
      static_cast<double>(zero_bits) / static_cast<double>(total_bits);
  report.expected_fluctuation =
      1.0 / (2.0 * std::sqrt(static_cast<double>(total_bits)));
  report.bias_sigmas =
      (report.zero_fraction - 0.5) / report.expected_fluctuation;
  return report;
}

KeyBiasReport key_bias_report(std::span<const SessionTranscript> transcripts) {
  std::int64_t zeros = 0;
  std::int64_t total = 0;
  bool any = false;
  for (const SessionTranscript& transcript : transcripts) {
    if (transcript.aborted) continue;
    any = true;
    total += static_cast<std::int64_t>(transcript.key_bits.size());
    for (std::uint8_t bit : transcript.key_bits) zeros += bit == 0 ? 1 : 0;
  }
  if (!any)
    throw std::invalid_argument("key_bias_report: all sessions aborted");
  return key_bias_from_counts(zeros, total);
}

double max_attack_fraction(double qber_budget, double per_attacked_error) {
  if (!(per_attacked_error > 0.0))
    throw std::invalid_argument(
        "max_attack_fraction: per_attacked_error must be > 0");
  if (!(qber_budget >= 0.0))
    throw std::invalid_argument("max_attack_fraction: budget must be >= 0");
  return std::min(1.0, qber_budget / per_attacked_error);
}

Bb84Analytic bb84_analytic(const Bb84Config& config) {
  config.validate();
  const OutcomeStats stats = outcome_stats(bb84_ensemble(), config.attack_basis);
  Bb84Analytic out;
  out.keep_prob = keep_probability(config, stats);
  out.forward_prob = config.match_throughput && out.keep_prob > 0.0
                         ? std::min(1.0, config.eta / out.keep_prob)
                         : 1.0;

  // Composition over the four signal states and Eve's kept outcomes.
  double weight = 0.0;
  double weight_zero = 0.0;
  double weight_error = 0.0;
  const MeasBasis bases[2] = {MeasBasis::z(), MeasBasis::x()};
  for (int basis = 0; basis < 2; ++basis) {
    for (int bit = 0; bit < 2; ++bit) {
      const QubitState state =
          bb84_state(bit, basis ? BasisLabel::kX : BasisLabel::kZ);
      const BornProbabilities p_eve =
          born_probability(state, config.attack_basis);
      const double p_out[2] = {p_eve.p0, p_eve.p1};
      for (int o = 0; o < 2; ++o) {
        if (!policy_keeps(config, stats, o)) continue;
        const double w = 0.25 * p_out[o];
        const QubitState resent = config.attack_basis.eigenstate(o);
        const BornProbabilities p_babe =
            born_probability(resent, bases[basis]);
        const double p_wrong = bit == 0 ? p_babe.p1 : p_babe.p0;
        weight += w;
        weight_zero += bit == 0 ? w : 0.0;
        weight_error += w * p_wrong;
      }
    }
  }
  const double ie = config.intrinsic_error;
  const double f = config.attack_fraction;
  out.per_attacked_error = weight > 0.0 ? weight_error / weight : 0.0;
  const double zero_given_kept = weight > 0.0 ? weight_zero / weight : 0.5;
  const double attacked_error_with_noise =
      out.per_attacked_error * (1.0 - ie) + (1.0 - out.per_attacked_error) * ie;

  out.arrival_rate = f * out.keep_prob * out.forward_prob +
                     (1.0 - f) * config.eta;
  const double g = out.arrival_rate > 0.0
                       ? f * out.keep_prob * out.forward_prob / out.arrival_rate
                       : 0.0;
  out.attacked_fraction_of_sifted = g;
  out.expected_zero_fraction = 0.5 * (1.0 - g) + g * zero_given_kept;
  out.expected_qber = g * attacked_error_with_noise + (1.0 - g) * ie;
  return out;
}

}  // namespace qkdsim
