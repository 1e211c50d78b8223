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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qkdsim/error.h"
#include "qkdsim/stats.h"

namespace qkdsim {

void DecoyScheme::validate() const {
  if (levels.size() < 1)
    throw std::invalid_argument("DecoyScheme: at least one level required");
  double total = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i].s >= 0.0))
      throw std::invalid_argument("DecoyScheme: level S must be >= 0");
    if (!(levels[i].probability >= 0.0))
      throw std::invalid_argument(
          "DecoyScheme: level probability must be >= 0");
    total += levels[i].probability;
    for (std::size_t j = i + 1; j < levels.size(); ++j) {
      if (levels[i].s == levels[j].s)
        throw std::invalid_argument("DecoyScheme: level S values must be distinct");
    }
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("DecoyScheme: probabilities must sum to 1");
  if (signal_index < 0 || signal_index >= static_cast<int>(levels.size()))
    throw std::invalid_argument("DecoyScheme: signal_index out of range");
}

double poisson_pmf(std::int64_t k, double mean) {
  if (k < 0) return 0.0;
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(-mean + static_cast<double>(k) * std::log(mean) -
                  std::lgamma(static_cast<double>(k) + 1.0));
}

double poisson_tail_ge2(double mean) {
  return 1.0 - std::exp(-mean) * (1.0 + mean);
}

PulseRecord emit_pulse(const DecoyScheme& scheme, RngStream& rng) {
  scheme.validate();
  const double u = rng.uniform01();
  double cumulative = 0.0;
  int index = static_cast<int>(scheme.levels.size()) - 1;
  for (std::size_t i = 0; i < scheme.levels.size(); ++i) {
    cumulative += scheme.levels[i].probability;
    if (u < cumulative) {
      index = static_cast<int>(i);
      break;
    }
  }
  PulseRecord pulse;
  pulse.level_index = index;
  pulse.s_level = scheme.levels[static_cast<std::size_t>(index)].s;
  pulse.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double r = std::sqrt(pulse.s_level);
  pulse.amplitude = {r * std::cos(pulse.phase), r * std::sin(pulse.phase)};
  pulse.forwarded_amplitude = pulse.amplitude;
  return pulse;
}

std::int64_t realize_photon_count(PulseRecord& pulse, RngStream& rng) {
  if (!pulse.realized_n.has_value()) {
    pulse.realized_n = rng.poisson(pulse.s_level);
    pulse.forwarded_n = pulse.realized_n;
  }
  return *pulse.realized_n;
}

PulseRecord pns_split(const PulseRecord& pulse) {
  if (!pulse.realized_n.has_value())
    throw std::invalid_argument("pns_split: photon count not realized");
  PulseRecord out = pulse;
  const std::int64_t n = *pulse.realized_n;
  if (n >= 2) {
    out.eve_split_photons = 1;
    out.forwarded_n = n - 1;
    out.tagged = true;
    out.lossless_forward = true;
  } else {
    out.forwarded_n = n;
  }
  return out;
}

PulseRecord coherent_split(const PulseRecord& pulse, double kappa) {
  if (!(kappa >= 0.0 && kappa <= 1.0))
    throw std::invalid_argument("coherent_split: kappa outside [0,1]");
  PulseRecord out = pulse;
  out.eve_split_amplitude = std::sqrt(kappa) * pulse.amplitude;
  out.forwarded_amplitude = std::sqrt(1.0 - kappa) * pulse.amplitude;
  const double energy = std::norm(out.eve_split_amplitude) +
                        std::norm(out.forwarded_amplitude);
  if (std::abs(energy - pulse.s_level) > 1e-12)
    throw InvariantViolation("coherent_split: energy not conserved");
  return out;
}

std::int64_t split_arm_count(PulseRecord& pulse, RngStream& rng) {
  const double arm_energy = std::norm(pulse.eve_split_amplitude);
  if (pulse.realized_n.has_value()) {
    const double fraction =
        pulse.s_level > 0.0 ? arm_energy / pulse.s_level : 0.0;
    pulse.eve_split_photons = rng.binomial(*pulse.realized_n, fraction);
    pulse.forwarded_n = *pulse.realized_n - pulse.eve_split_photons;
  } else {
    pulse.eve_split_photons = rng.poisson(arm_energy);
  }
  return pulse.eve_split_photons;
}

namespace {

// log of prior-weighted Poisson likelihood; -inf when impossible.
double log_weighted_pmf(std::int64_t k, double mean, double prior) {
  if (prior <= 0.0) return -std::numeric_limits<double>::infinity();
  if (mean == 0.0)
    return k == 0 ? std::log(prior)
                  : -std::numeric_limits<double>::infinity();
  return std::log(prior) - mean + static_cast<double>(k) * std::log(mean) -
         std::lgamma(static_cast<double>(k) + 1.0);
}

std::int64_t poisson_tail_cutoff(double mean) {
  return static_cast<std::int64_t>(std::ceil(mean + 40.0 * std::sqrt(mean + 1.0))) + 20;
}

}  // namespace

double poisson_lr_success_analytic(double mean_a, double mean_b,
                                   double prior_a) {
  if (!(prior_a >= 0.0 && prior_a <= 1.0))
    throw std::invalid_argument("poisson_lr_success: prior outside [0,1]");
  const double prior_b = 1.0 - prior_a;
  const std::int64_t cutoff =
      poisson_tail_cutoff(std::max(mean_a, mean_b));
  double success = 0.0;
  for (std::int64_t k = 0; k <= cutoff; ++k) {
    success += std::max(prior_a * poisson_pmf(k, mean_a),
                        prior_b * poisson_pmf(k, mean_b));
  }
  return std::min(success, 1.0);
}

DiscriminationResult discriminate_levels_poisson(double kappa, double s_a,
                                                 double s_b, double prior_a,
                                                 std::int64_t n_trials,
                                                 RngStream& rng) {
  if (!(kappa >= 0.0 && kappa <= 1.0))
    throw std::invalid_argument(
        "discriminate_levels_poisson: kappa outside [0,1]");
  if (!(prior_a > 0.0 && prior_a < 1.0))
    throw std::invalid_argument(
        "discriminate_levels_poisson: prior_a outside (0,1)");
  if (n_trials < 1)
    throw std::invalid_argument(
        "discriminate_levels_poisson: n_trials must be >= 1");
  const double mean_a = kappa * s_a;
  const double mean_b = kappa * s_b;
  const double prior_b = 1.0 - prior_a;
  std::int64_t successes = 0;
  for (std::int64_t i = 0; i < n_trials; ++i) {
    const bool truth_a = rng.bernoulli(prior_a);
    const std::int64_t count = rng.poisson(truth_a ? mean_a : mean_b);
    const double la = log_weighted_pmf(count, mean_a, prior_a);
    const double lb = log_weighted_pmf(count, mean_b, prior_b);
    // Ties resolve toward the larger prior, then toward a.
    const bool guess_a = la > lb || (la == lb && prior_a >= prior_b);
    if (guess_a == truth_a) ++successes;
  }
  DiscriminationResult result;
  result.n_trials = n_trials;
  result.mc_success =
      static_cast<double>(successes) / static_cast<double>(n_trials);
  result.analytic_success =
      poisson_lr_success_analytic(mean_a, mean_b, prior_a);
  result.std_error = std::sqrt(result.analytic_success *
                               (1.0 - result.analytic_success) /
                               static_cast<double>(n_trials));
  return result;
}

double helstrom_error(std::complex<double> alpha, std::complex<double> beta,
                      double prior_a) {
  if (!(prior_a >= 0.0 && prior_a <= 1.0))
    throw std::invalid_argument("helstrom_error: prior outside [0,1]");
  const double prior_b = 1.0 - prior_a;
  const double distance_sq = std::norm(alpha - beta);
  const double overlap = std::exp(-distance_sq);
  const double radicand = 1.0 - 4.0 * prior_a * prior_b * overlap;
  return 0.5 * (1.0 - std::sqrt(std::max(radicand, 0.0)));
}

void transmit(PulseRecord& pulse, double eta, RngStream& rng) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw std::invalid_argument("transmit: eta outside (0,1]");
  if (pulse.deleted) {
    pulse.received_n = 0;
    return;
  }
  if (!pulse.forwarded_n.has_value())
    throw std::invalid_argument("transmit: forwarded photon count not set");
  if (pulse.lossless_forward) {
    pulse.received_n = *pulse.forwarded_n;
    return;
  }
  pulse.received_n = rng.binomial(*pulse.forwarded_n, eta);
}

double expected_yield(double s, double eta) {
  return 1.0 - std::exp(-eta * s);
}

double expected_yield_under_attack(double s, double eta,
                                   const PnsAttackParams& attack) {
  if (!attack.enabled) return expected_yield(s, eta);
  const std::int64_t cutoff = poisson_tail_cutoff(s);
  double yield = poisson_pmf(1, s) * (1.0 - attack.block_single_prob) * eta;
  for (std::int64_t n = 2; n <= cutoff; ++n) {
    const double lossy = 1.0 - std::pow(1.0 - eta, static_cast<double>(n));
    yield += poisson_pmf(n, s) *
             (attack.attack_prob + (1.0 - attack.attack_prob) * lossy);
  }
  return yield;
}

double pns_rate_matching_block_prob(const DecoyScheme& scheme, double eta,
                                    double attack_prob) {
  scheme.validate();
  if (!(eta > 0.0 && eta <= 1.0))
    throw std::invalid_argument(
        "pns_rate_matching_block_prob: eta outside (0,1]");
  double no_attack_rate = 0.0;
  double multi_rate = 0.0;   // arrival rate from n >= 2 pulses under attack
  double single_rate = 0.0;  // arrival rate from unblocked singles
  for (const DecoyLevel& level : scheme.levels) {
    no_attack_rate += level.probability * expected_yield(level.s, eta);
    const std::int64_t cutoff = poisson_tail_cutoff(level.s);
    for (std::int64_t n = 2; n <= cutoff; ++n) {
      const double pn = level.probability * poisson_pmf(n, level.s);
      const double lossy = 1.0 - std::pow(1.0 - eta, static_cast<double>(n));
      multi_rate += pn * (attack_prob * 1.0 + (1.0 - attack_prob) * lossy);
    }
    single_rate += level.probability * poisson_pmf(1, level.s) * eta;
  }
  if (single_rate <= 0.0) return 0.0;
  // multi_rate + (1 - b) * single_rate = no_attack_rate
  const double b = 1.0 - (no_attack_rate - multi_rate) / single_rate;
  return std::clamp(b, 0.0, 1.0);
}

std::vector<PulseRecord> run_decoy_ensemble(const DecoyScheme& scheme,
                                            double eta,
                                            const PnsAttackParams& attack,
                                            std::int64_t n_pulses,
                                            std::uint64_t master_seed,
                                            std::uint64_t pulse_index_base,
                                            std::string_view site_label) {
  scheme.validate();
  if (n_pulses < 1)
    throw std::invalid_argument("run_decoy_ensemble: n_pulses must be >= 1");
  std::vector<PulseRecord> records;
  records.reserve(static_cast<std::size_t>(n_pulses));
  for (std::int64_t i = 0; i < n_pulses; ++i) {
    RngStream rng(master_seed, pulse_index_base + static_cast<std::uint64_t>(i),
                  site_label);
    PulseRecord pulse = emit_pulse(scheme, rng);
    realize_photon_count(pulse, rng);
    // Decision draws happen unconditionally so a pulse's sample path is
    // comparable across attack settings (common random numbers).
    const bool split_draw = rng.uniform01() < attack.attack_prob;
    const bool block_draw = rng.uniform01() < attack.block_single_prob;
    if (attack.enabled) {
      if (*pulse.realized_n >= 2 && split_draw) {
        pulse = pns_split(pulse);
      } else if (*pulse.realized_n == 1 && block_draw) {
        pulse.deleted = true;
      }
    }
    transmit(pulse, eta, rng);
    records.push_back(pulse);
  }
  return records;
}

YieldCheckResult decoy_yield_check(std::span<const PulseRecord> records,
                                   const DecoyScheme& scheme, double eta,
                                   double tolerance_sigmas) {
  scheme.validate();
  if (scheme.levels.size() < 2)
    throw std::invalid_argument(
        "decoy_yield_check: at least two levels required");
  if (!(tolerance_sigmas > 0.0))
    throw std::invalid_argument(
        "decoy_yield_check: tolerance_sigmas must be > 0");
  YieldCheckResult result;
  result.levels.resize(scheme.levels.size());
  for (std::size_t l = 0; l < scheme.levels.size(); ++l) {
    result.levels[l].s = scheme.levels[l].s;
    result.levels[l].expected = expected_yield(scheme.levels[l].s, eta);
  }
  for (const PulseRecord& pulse : records) {
    auto& level = result.levels[static_cast<std::size_t>(pulse.level_index)];
    ++level.pulses;
    if (pulse.received_n.value_or(0) >= 1) ++level.arrivals;
  }
  for (LevelYield& level : result.levels) {
    if (level.pulses == 0) continue;
    const double n = static_cast<double>(level.pulses);
    level.yield = static_cast<double>(level.arrivals) / n;
    const double var = level.expected * (1.0 - level.expected);
    level.sigma = var > 0.0 ? std::sqrt(var / n) : 0.0;
    if (level.sigma > 0.0) {
      level.deviation_sigmas = (level.yield - level.expected) / level.sigma;
    } else {
      // Degenerate level (yield exactly 0 or 1): any mismatch is an alarm.
      level.deviation_sigmas =
          level.yield == level.expected
              ? 0.0
              : std::numeric_limits<double>::infinity();
    }
    if (std::abs(level.deviation_sigmas) > tolerance_sigmas)
      result.alarm = true;
  }
  const double per_level = 2.0 * normal_cdf(-tolerance_sigmas);
  result.nominal_false_alarm =
      1.0 - std::pow(1.0 - per_level,
                     static_cast<double>(scheme.levels.size()));
  return result;
}

TaggedFractionResult tagged_fraction(std::span<const PulseRecord> records,
                                     double eta) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw std::invalid_argument("tagged_fraction: eta outside (0,1]");
  TaggedFractionResult result;
  std::int64_t arrivals = 0;
  std::int64_t tagged_arrivals = 0;
  std::int64_t multi = 0;
  std::int64_t single = 0;
  std::int64_t sourced = 0;
  for (const PulseRecord& pulse : records) {
    if (pulse.realized_n.has_value()) {
      ++sourced;
      if (*pulse.realized_n >= 2) ++multi;
      if (*pulse.realized_n == 1) ++single;
    }
    if (pulse.received_n.value_or(0) >= 1) {
      ++arrivals;
      if (pulse.tagged) ++tagged_arrivals;
    }
  }
  if (arrivals > 0)
    result.fraction =
        static_cast<double>(tagged_arrivals) / static_cast<double>(arrivals);
  if (sourced > 0) {
    result.multi_fraction =
        static_cast<double>(multi) / static_cast<double>(sourced);
    result.single_fraction =
        static_cast<double>(single) / static_cast<double>(sourced);
  }
  result.supply_exceeds_single_throughput =
      result.multi_fraction >= eta * result.single_fraction;
  return result;
}

}  // namespace qkdsim
