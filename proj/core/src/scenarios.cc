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

#include "qkdsim/scenarios.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numbers>
#include <thread>

#include "qkdsim/bb84_protocol.h"
#include "qkdsim/cv_channel.h"
#include "qkdsim/decoy_source.h"
#include "qkdsim/error.h"
#include "qkdsim/key_rate.h"
#include "qkdsim/qubit.h"

namespace qkdsim {

namespace {

constexpr std::int64_t kTrialBlock = 1024;

int effective_threads(int requested) {
  return requested < 1 ? 1 : requested;
}

void run_blocks(std::int64_t n_blocks, int n_threads,
                const std::function<void(std::int64_t)>& block_fn) {
  if (n_threads <= 1 || n_blocks <= 1) {
    for (std::int64_t b = 0; b < n_blocks; ++b) block_fn(b);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> workers;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  workers.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) {
    workers.emplace_back([&] {
      while (true) {
        const std::int64_t b = next.fetch_add(1);
        if (b >= n_blocks) return;
        try {
          block_fn(b);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& worker : workers) worker.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<MetricAccumulator> run_trials_aggregate(
    std::int64_t n_trials, int n_threads, std::uint64_t master_seed,
    std::string_view site_label, std::size_t n_values, const TrialFn& fn) {
  if (n_trials < 1) throw ScenarioError("no trials requested");
  const std::int64_t n_blocks = (n_trials + kTrialBlock - 1) / kTrialBlock;
  std::vector<std::vector<MetricAccumulator>> partials(
      static_cast<std::size_t>(n_blocks),
      std::vector<MetricAccumulator>(n_values));
  run_blocks(n_blocks, effective_threads(n_threads), [&](std::int64_t b) {
    const std::int64_t lo = b * kTrialBlock;
    const std::int64_t hi = std::min(lo + kTrialBlock, n_trials);
    std::vector<double> values(n_values, 0.0);
    auto& partial = partials[static_cast<std::size_t>(b)];
    for (std::int64_t trial = lo; trial < hi; ++trial) {
      RngStream rng(master_seed, static_cast<std::uint64_t>(trial),
                    site_label);
      std::fill(values.begin(), values.end(), 0.0);
      fn(trial, rng, values);
      for (std::size_t k = 0; k < n_values; ++k) partial[k].add(values[k]);
    }
  });
  std::vector<MetricAccumulator> merged(n_values);
  for (const auto& partial : partials)
    for (std::size_t k = 0; k < n_values; ++k) merged[k].merge(partial[k]);
  return merged;
}

std::vector<double> run_trials_collect(
    std::int64_t n_trials, int n_threads, std::uint64_t master_seed,
    std::string_view site_label,
    const std::function<double(std::int64_t, RngStream&)>& fn) {
  if (n_trials < 1) throw ScenarioError("no trials requested");
  std::vector<double> out(static_cast<std::size_t>(n_trials), 0.0);
  const std::int64_t n_blocks = (n_trials + kTrialBlock - 1) / kTrialBlock;
  run_blocks(n_blocks, effective_threads(n_threads), [&](std::int64_t b) {
    const std::int64_t lo = b * kTrialBlock;
    const std::int64_t hi = std::min(lo + kTrialBlock, n_trials);
    for (std::int64_t trial = lo; trial < hi; ++trial) {
      RngStream rng(master_seed, static_cast<std::uint64_t>(trial),
                    site_label);
      out[static_cast<std::size_t>(trial)] = fn(trial, rng);
    }
  });
  return out;
}

namespace {

MetricSummary summarize(const MetricAccumulator& acc,
                        std::optional<double> analytic_ref = std::nullopt) {
  MetricSummary metric;
  metric.mean = acc.mean();
  metric.variance = acc.count() > 1 ? acc.sample_variance() : 0.0;
  const double half = acc.count() > 1 ? acc.ci95_halfwidth() : 0.0;
  metric.ci_lo = metric.mean - half;
  metric.ci_hi = metric.mean + half;
  metric.n = acc.count();
  if (analytic_ref.has_value()) {
    metric.analytic_ref = analytic_ref;
    const double se = acc.count() > 1 ? acc.std_error() : 0.0;
    if (se > 0.0) {
      metric.sigmas_off = (metric.mean - *analytic_ref) / se;
    } else {
      metric.sigmas_off = metric.mean == *analytic_ref ? 0.0 : 0.0;
    }
  }
  if (std::isnan(metric.mean))
    throw InvariantViolation("metric mean is NaN");
  return metric;
}

MetricSummary binomial_metric(double p, std::int64_t n) {
  MetricSummary metric;
  metric.mean = p;
  metric.variance = p * (1.0 - p);
  const double half =
      n > 0 ? 1.959963984540054 * std::sqrt(metric.variance /
                                            static_cast<double>(n))
            : 0.0;
  metric.ci_lo = p - half;
  metric.ci_hi = p + half;
  metric.n = n;
  return metric;
}

CvChannelParams cv_params_from_json(const nlohmann::json& p) {
  CvChannelParams params;
  params.transmittance = p["T"].get<double>();
  params.modulation_variance = p["V"].get<double>();
  params.var_n_a = p["var_n_a"].get<double>();
  params.var_n_b = p["var_n_b"].get<double>();
  params.var_n_e_passive = p["var_n_e"].get<double>();
  params.var_n_e_het = p["var_n_e_het"].get<double>();
  params.delta_t = p["delta_t"].get<double>();
  params.validate();
  return params;
}

ScenarioReport base_report(const ScenarioConfig& config) {
  ScenarioReport report;
  report.config_echo = config.semantic_json();
  report.config_hash = config.config_hash();
  report.scenario = to_string(config.scenario);
  report.n_trials = config.n_trials;
  return report;
}

// ---------------------------------------------------------------------------
// CV passive / heterodyne-resend

ScenarioReport run_cv_scenario(const ScenarioConfig& config) {
  const CvScenario scenario = config.scenario == Scenario::kCvPassive
                                  ? CvScenario::kPassive
                                  : CvScenario::kHeterodyneResend;
  const CvChannelParams params = cv_params_from_json(config.parameters);
  const CvAnalytic analytic = cv_analytic(params, scenario);

  const double v = params.modulation_variance;
  const double t = params.transmittance;
  const double sigma_m = std::sqrt(v);
  const double w_b_of_m = analytic.cov_m_m_b / analytic.var_m_b;
  const double cov_m_m_e =
      scenario == CvScenario::kPassive ? std::sqrt(1.0 - t) * v : v;
  const double w_e_of_m = cov_m_m_e / analytic.var_m_e;
  const double w_a_of_mb = std::sqrt(t) * v / (v + params.var_n_a);
  const double cov_mb_me = scenario == CvScenario::kPassive
                               ? std::sqrt(t * (1.0 - t)) * v
                               : std::sqrt(t) * analytic.var_m_e;
  const double w_e_of_mb = cov_mb_me / analytic.var_m_e;

  const char* site = scenario == CvScenario::kPassive ? "cv.passive" : "cv.het";
  const auto accs = run_trials_aggregate(
      config.n_trials, config.n_threads, config.master_seed, site, 7,
      [&](std::int64_t, RngStream& rng, std::span<double> values) {
        const double m = rng.gaussian(0.0, sigma_m);
        const QuadratureTriple triple =
            scenario == CvScenario::kPassive
                ? sample_passive(m, params, rng)
                : sample_heterodyne_resend(m, params, rng);
        const double eb = w_b_of_m * triple.m_b - m;
        const double ee = w_e_of_m * triple.m_e - m;
        const double ea = w_a_of_mb * triple.m_a - triple.m_b;
        const double er = w_e_of_mb * triple.m_e - triple.m_b;
        values[0] = triple.m_b * triple.m_b;
        values[1] = triple.m_e * triple.m_e;
        values[2] = triple.m * triple.m_b;
        values[3] = eb * eb;
        values[4] = ee * ee;
        values[5] = ea * ea;
        values[6] = er * er;
      });

  ScenarioReport report = base_report(config);
  report.metrics["var_m_b"] = summarize(accs[0], analytic.var_m_b);
  report.metrics["var_m_e"] = summarize(accs[1], analytic.var_m_e);
  report.metrics["cov_m_m_b"] = summarize(accs[2], analytic.cov_m_m_b);
  report.metrics["mse_b_of_m"] = summarize(accs[3], analytic.mse_b_of_m);
  report.metrics["mse_e_of_m"] = summarize(accs[4], analytic.mse_e_of_m);
  report.metrics["mse_a_of_mb"] = summarize(accs[5], analytic.mse_a_of_mb);
  report.metrics["mse_e_of_mb"] = summarize(accs[6], analytic.mse_e_of_mb);
  report.derived["i_ab"] = analytic.i_ab;
  report.derived["i_ae"] = analytic.i_ae;
  report.derived["i_be"] = analytic.i_be;
  const double rate = channel_rate(analytic.i_ab, analytic.i_ae);
  report.derived["channel_rate"] = rate;
  report.caveats.push_back(kCaveatChannelRate);
  if (rate <= 0.0) report.caveats.push_back(kCaveatNegativeRate);
  return report;
}

// ---------------------------------------------------------------------------
// CV excess-noise detectability

ScenarioReport run_excess_noise_scenario(const ScenarioConfig& config) {
  const CvChannelParams params = cv_params_from_json(config.parameters);
  const auto n_pulses = config.parameters["n_pulses"].get<std::int64_t>();
  const double alpha = config.parameters["alpha"].get<double>();
  const auto n_cal = config.parameters["n_calibration"].get<std::int64_t>();
  const double t = params.transmittance;
  const double dt = params.delta_t;

  const auto calibration = run_trials_collect(
      n_cal, config.n_threads, config.master_seed, "xnt.cal",
      [&](std::int64_t, RngStream& rng) {
        return mb_variance_statistic(params, CvScenario::kPassive, t + dt,
                                     n_pulses, rng);
      });
  const auto h0 = run_trials_collect(
      config.n_trials, config.n_threads, config.master_seed, "xnt.h0",
      [&](std::int64_t, RngStream& rng) {
        const double t_actual = dt == 0.0 ? t : rng.uniform(t - dt, t + dt);
        return mb_variance_statistic(params, CvScenario::kPassive, t_actual,
                                     n_pulses, rng);
      });
  const auto h1 = run_trials_collect(
      config.n_trials, config.n_threads, config.master_seed, "xnt.h1",
      [&](std::int64_t, RngStream& rng) {
        return mb_variance_statistic(params, CvScenario::kHeterodyneResend, t,
                                     n_pulses, rng);
      });
  const ExcessNoiseResult result =
      excess_noise_from_samples(calibration, h0, h1, alpha);

  MetricAccumulator h0_acc, h1_acc;
  for (double s : h0) h0_acc.add(s);
  for (double s : h1) h1_acc.add(s);

  const double v = params.modulation_variance;
  ScenarioReport report = base_report(config);
  report.metrics["power"] = binomial_metric(result.power, config.n_trials);
  report.metrics["false_alarm_achieved"] =
      binomial_metric(result.false_alarm_achieved, config.n_trials);
  report.metrics["var_m_b_h0"] =
      summarize(h0_acc, t * v + params.var_n_b);
  report.metrics["var_m_b_h1"] = summarize(
      h1_acc, t * (v + params.var_n_e_het) + params.var_n_b);
  report.derived["threshold"] = result.threshold;
  report.derived["alpha"] = alpha;
  report.derived["h0_var_worst_case"] = (t + dt) * v + params.var_n_b;
  report.derived["attack_excess_variance"] = t * params.var_n_e_het;
  report.derived["nuisance_halfwidth_variance"] = dt * v;
  return report;
}

// ---------------------------------------------------------------------------
// BB84 with partial intercept and deletion

Bb84Config bb84_config_from_json(const nlohmann::json& p) {
  Bb84Config config;
  config.n_sent = p["n_sent"].get<std::int64_t>();
  config.eta = p["eta"].get<double>();
  config.attack_fraction = p["attack_fraction"].get<double>();
  const auto basis = p["attack_basis"].get<std::string>();
  if (basis == "z") {
    config.attack_basis = MeasBasis::z();
  } else if (basis == "x") {
    config.attack_basis = MeasBasis::x();
  } else if (basis == "breidbart") {
    config.attack_basis = MeasBasis::breidbart();
  } else {
    config.attack_basis = MeasBasis::custom(p["attack_angle"].get<double>());
  }
  const auto policy = p["deletion_policy"].get<std::string>();
  config.deletion_policy = policy == "none" ? DeletionPolicy::kNone
                           : policy == "delete_bit_one"
                               ? DeletionPolicy::kDeleteBitOne
                               : DeletionPolicy::kDeleteLowConfidence;
  config.confidence_threshold = p["confidence_threshold"].get<double>();
  config.check_fraction = p["check_fraction"].get<double>();
  config.qber_threshold = p["qber_threshold"].get<double>();
  config.intrinsic_error = p["intrinsic_error"].get<double>();
  config.match_throughput = p["match_throughput"].get<bool>();
  config.validate();
  return config;
}

ScenarioReport run_bb84_scenario(const ScenarioConfig& config) {
  const Bb84Config session_config = bb84_config_from_json(config.parameters);
  const Bb84Analytic analytic = bb84_analytic(session_config);
  const double n_sent = static_cast<double>(session_config.n_sent);

  enum ValueIndex : std::size_t {
    kQber,
    kAborted,
    kSifted,
    kKeyBits,
    kKeyZeros,
    kArrived,
    kDeleted,
    kLost,
    kAttackedKeptSifted,
    kValueCount,
  };
  const auto accs = run_trials_aggregate(
      config.n_trials, config.n_threads, config.master_seed, "bb84.session",
      kValueCount,
      [&](std::int64_t, RngStream& rng, std::span<double> values) {
        const SessionTranscript transcript = run_session(session_config, rng);
        values[kQber] = transcript.qber_observed;
        values[kAborted] = transcript.aborted ? 1.0 : 0.0;
        values[kSifted] =
            static_cast<double>(transcript.sifted_positions.size());
        if (!transcript.aborted) {
          values[kKeyBits] = static_cast<double>(transcript.key_bits.size());
          std::int64_t zeros = 0;
          for (std::uint8_t bit : transcript.key_bits)
            zeros += bit == 0 ? 1 : 0;
          values[kKeyZeros] = static_cast<double>(zeros);
        }
        values[kArrived] = static_cast<double>(transcript.n_arrived);
        values[kDeleted] = static_cast<double>(transcript.n_deleted);
        values[kLost] = static_cast<double>(transcript.n_lost);
        values[kAttackedKeptSifted] =
            static_cast<double>(transcript.n_attacked_kept_sifted);
      });

  const auto pooled_bits = static_cast<std::int64_t>(accs[kKeyBits].sum());
  const auto pooled_zeros = static_cast<std::int64_t>(accs[kKeyZeros].sum());
  if (pooled_bits == 0)
    throw ScenarioError(
        "bb84_prs: no key bits pooled (all sessions aborted or empty)");
  const KeyBiasReport bias = key_bias_from_counts(pooled_zeros, pooled_bits);

  ScenarioReport report = base_report(config);
  report.metrics["qber"] = summarize(accs[kQber], analytic.expected_qber);
  report.metrics["abort_rate"] = summarize(accs[kAborted]);
  report.metrics["sifted_count"] =
      summarize(accs[kSifted], 0.5 * analytic.arrival_rate * n_sent);
  report.metrics["arrived_count"] =
      summarize(accs[kArrived], analytic.arrival_rate * n_sent);
  report.metrics["attacked_kept_sifted_count"] = summarize(
      accs[kAttackedKeptSifted],
      0.5 * session_config.attack_fraction * analytic.keep_prob *
          analytic.forward_prob * n_sent);
  report.derived["pooled_key_bits"] = static_cast<double>(bias.pooled_bits);
  report.derived["zero_fraction"] = bias.zero_fraction;
  report.derived["expected_zero_fraction"] = analytic.expected_zero_fraction;
  report.derived["expected_fluctuation"] = bias.expected_fluctuation;
  report.derived["bias_sigmas"] = bias.bias_sigmas;
  report.derived["expected_qber"] = analytic.expected_qber;
  report.derived["per_attacked_error"] = analytic.per_attacked_error;
  report.derived["keep_prob"] = analytic.keep_prob;
  report.derived["forward_prob"] = analytic.forward_prob;
  report.derived["attacked_fraction_of_sifted"] =
      analytic.attacked_fraction_of_sifted;
  return report;
}

// ---------------------------------------------------------------------------
// Decoy levels under photon-number splitting

ScenarioReport run_decoy_pns_scenario(const ScenarioConfig& config) {
  const nlohmann::json& p = config.parameters;
  DecoyScheme scheme;
  for (const auto& level : p["levels"])
    scheme.levels.push_back(
        {level["s"].get<double>(), level["probability"].get<double>()});
  scheme.signal_index = p["signal_index"].get<int>();
  scheme.validate();
  const double eta = p["eta"].get<double>();
  const auto n_pulses = p["n_pulses"].get<std::int64_t>();
  const double tolerance = p["tolerance_sigmas"].get<double>();

  PnsAttackParams attack;
  attack.enabled = p["attack"].get<std::string>() == "pns";
  attack.attack_prob = p["attack_prob"].get<double>();
  double block = p["block_single_prob"].get<double>();
  if (attack.enabled && block < 0.0)
    block = pns_rate_matching_block_prob(scheme, eta, attack.attack_prob);
  attack.block_single_prob = std::max(block, 0.0);

  const std::size_t n_levels = scheme.levels.size();
  const std::size_t n_values = 3 + 2 * n_levels;
  const auto accs = run_trials_aggregate(
      config.n_trials, config.n_threads, config.master_seed, "decoy.trial",
      n_values,
      [&](std::int64_t trial, RngStream&, std::span<double> values) {
        const auto records = run_decoy_ensemble(
            scheme, eta, attack, n_pulses, config.master_seed,
            static_cast<std::uint64_t>(trial) *
                static_cast<std::uint64_t>(n_pulses));
        const YieldCheckResult check =
            decoy_yield_check(records, scheme, eta, tolerance);
        const TaggedFractionResult tagged = tagged_fraction(records, eta);
        values[0] = check.alarm ? 1.0 : 0.0;
        values[1] = tagged.fraction;
        values[2] = tagged.supply_exceeds_single_throughput ? 1.0 : 0.0;
        for (std::size_t l = 0; l < n_levels; ++l) {
          values[3 + 2 * l] = static_cast<double>(check.levels[l].arrivals);
          values[4 + 2 * l] = static_cast<double>(check.levels[l].pulses);
        }
      });

  ScenarioReport report = base_report(config);
  report.metrics["alarm_rate"] = summarize(accs[0]);
  report.metrics["tagged_fraction"] = summarize(accs[1]);
  report.metrics["breach_condition_rate"] = summarize(accs[2]);
  for (std::size_t l = 0; l < n_levels; ++l) {
    const double arrivals = accs[3 + 2 * l].sum();
    const double pulses = accs[4 + 2 * l].sum();
    const double expected =
        expected_yield_under_attack(scheme.levels[l].s, eta, attack);
    MetricSummary yield;
    yield.mean = pulses > 0.0 ? arrivals / pulses : 0.0;
    yield.variance = expected * (1.0 - expected);
    const double se = pulses > 0.0 ? std::sqrt(yield.variance / pulses) : 0.0;
    yield.ci_lo = yield.mean - 1.959963984540054 * se;
    yield.ci_hi = yield.mean + 1.959963984540054 * se;
    yield.n = static_cast<std::int64_t>(pulses);
    yield.analytic_ref = expected;
    yield.sigmas_off = se > 0.0 ? (yield.mean - expected) / se : 0.0;
    report.metrics["yield_level_" + std::to_string(l)] = yield;
    report.derived["expected_yield_no_attack_level_" + std::to_string(l)] =
        expected_yield(scheme.levels[l].s, eta);
  }
  const double s_signal =
      scheme.levels[static_cast<std::size_t>(scheme.signal_index)].s;
  report.derived["block_single_prob_used"] = attack.block_single_prob;
  report.derived["signal_multiphoton_prob"] = poisson_tail_ge2(s_signal);
  report.derived["signal_single_throughput"] =
      eta * poisson_pmf(1, s_signal);
  const double per_level_tail = 2.0 * normal_cdf(-tolerance);
  report.derived["nominal_false_alarm"] =
      1.0 - std::pow(1.0 - per_level_tail, static_cast<double>(n_levels));
  return report;
}

// ---------------------------------------------------------------------------
// Coherent beam splitting and level discrimination

ScenarioReport run_decoy_cbs_scenario(const ScenarioConfig& config) {
  const nlohmann::json& p = config.parameters;
  const double kappa = p["kappa"].get<double>();
  const double s_a = p["s_a"].get<double>();
  const double s_b = p["s_b"].get<double>();
  const double prior_a = p["prior_a"].get<double>();
  const double mean_a = kappa * s_a;
  const double mean_b = kappa * s_b;

  const auto accs = run_trials_aggregate(
      config.n_trials, config.n_threads, config.master_seed, "cbs.trial", 2,
      [&](std::int64_t, RngStream& rng, std::span<double> values) {
        const bool truth_a = rng.bernoulli(prior_a);
        PulseRecord pulse;
        pulse.s_level = truth_a ? s_a : s_b;
        pulse.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double r = std::sqrt(pulse.s_level);
        pulse.amplitude = {r * std::cos(pulse.phase),
                           r * std::sin(pulse.phase)};
        PulseRecord split = coherent_split(pulse, kappa);
        const std::int64_t count = split_arm_count(split, rng);
        const double la = std::log(prior_a) +
                          (mean_a > 0.0
                               ? -mean_a + static_cast<double>(count) *
                                               std::log(mean_a)
                               : (count == 0 ? 0.0 : -1e300));
        const double lb = std::log(1.0 - prior_a) +
                          (mean_b > 0.0
                               ? -mean_b + static_cast<double>(count) *
                                               std::log(mean_b)
                               : (count == 0 ? 0.0 : -1e300));
        const bool guess_a = la > lb || (la == lb && prior_a >= 0.5);
        values[0] = guess_a == truth_a ? 1.0 : 0.0;
        values[1] = std::abs(std::norm(split.eve_split_amplitude) +
                             std::norm(split.forwarded_amplitude) -
                             pulse.s_level);
      });

  const double analytic = poisson_lr_success_analytic(mean_a, mean_b, prior_a);
  ScenarioReport report = base_report(config);
  report.metrics["discrimination_success"] = summarize(accs[0], analytic);
  report.metrics["energy_residual"] = summarize(accs[1], 0.0);
  report.derived["analytic_success"] = analytic;
  report.derived["helstrom_error"] = helstrom_error(
      std::complex<double>(std::sqrt(mean_a), 0.0),
      std::complex<double>(std::sqrt(mean_b), 0.0), prior_a);
  report.derived["counting_error"] = 1.0 - analytic;
  return report;
}

// ---------------------------------------------------------------------------
// Key-rate formula sweep

ScenarioReport run_key_rate_sweep(const ScenarioConfig& config) {
  const nlohmann::json& p = config.parameters;
  const double lo = p["qber_lo"].get<double>();
  const double hi = p["qber_hi"].get<double>();
  const double step = p["qber_step"].get<double>();
  const double f_factor = p["f_factor"].get<double>();
  const double n_bits = p["n_bits"].get<double>();
  const double lambda = p["lambda"].get<double>();

  ScenarioReport report = base_report(config);
  SweepTable table;
  table.columns = {"qber", "binary_entropy", "rate_ideal", "leak_ec_bits"};
  bool any_nonpositive = false;
  std::string leak_warning;
  for (double q = lo; q <= hi + 1e-12; q += step) {
    const double qber = std::min(q, 0.5);
    const double rate = key_rate_ideal(qber);
    any_nonpositive = any_nonpositive || rate <= 0.0;
    table.rows.push_back({qber, binary_entropy(qber), rate,
                          leak_ec(f_factor, n_bits, qber, &leak_warning)});
  }
  report.sweep = table;

  const IeP1Profile profile = ie_p1_profile(lambda, n_bits);
  report.derived["log2_ie"] = profile.log2_ie;
  report.derived["log2_p1"] = profile.log2_p1;
  const CountingBounds bounds =
      counting_bounds(p["n_total"].get<std::int64_t>(),
                      p["n_checked"].get<std::int64_t>(),
                      p["delta"].get<double>());
  report.derived["classical_exponent"] = bounds.classical_exponent;
  report.derived["quantum_exponent"] = bounds.quantum_exponent;
  report.derived["exponent_ratio"] =
      bounds.quantum_exponent / bounds.classical_exponent;
  report.caveats = {kCaveatAsymptotic, kCaveatChannelRate, kCaveatP1Exponent};
  if (any_nonpositive) report.caveats.push_back(kCaveatNegativeRate);
  if (!leak_warning.empty()) report.caveats.push_back(leak_warning);
  return report;
}

// ---------------------------------------------------------------------------
// Deletion-budget optimizer

ScenarioReport run_deletion_optimizer(const ScenarioConfig& config) {
  const nlohmann::json& p = config.parameters;
  std::vector<LabeledState> ensemble;
  if (p["ensemble"].get<std::string>() == "bb84") {
    ensemble = bb84_ensemble();
  } else {
    for (const auto& state : p["custom_states"]) {
      const double angle = state["angle"].get<double>();
      ensemble.push_back({QubitState{{std::cos(angle), 0.0},
                                     {std::sin(angle), 0.0}},
                          state["prior"].get<double>(),
                          state["bit"].get<int>()});
    }
  }
  const int basis_grid = p["basis_grid"].get<int>();
  const int threshold_grid = p["threshold_grid"].get<int>();

  ScenarioReport report = base_report(config);
  const DeletionAdvantage best = optimal_deletion_advantage(
      ensemble, p["deletion_budget"].get<double>(), basis_grid,
      threshold_grid);
  report.derived["best_basis_angle"] = best.best_basis_angle;
  report.derived["success_prob"] = best.success_prob;
  report.derived["expected_keep_fraction"] = best.expected_keep_fraction;
  report.notes["keep_rule"] = best.best_rule;

  if (!p["budgets"].empty()) {
    SweepTable table;
    table.columns = {"deletion_budget", "success_prob", "best_basis_angle",
                     "expected_keep_fraction"};
    for (const auto& budget : p["budgets"]) {
      const DeletionAdvantage point = optimal_deletion_advantage(
          ensemble, budget.get<double>(), basis_grid, threshold_grid);
      table.rows.push_back({budget.get<double>(), point.success_prob,
                            point.best_basis_angle,
                            point.expected_keep_fraction});
    }
    report.sweep = table;
  }
  return report;
}

ScenarioReport run_single(const ScenarioConfig& config) {
  switch (config.scenario) {
    case Scenario::kCvPassive:
    case Scenario::kCvHeterodyneResend:
      return run_cv_scenario(config);
    case Scenario::kCvExcessNoiseTest:
      return run_excess_noise_scenario(config);
    case Scenario::kBb84Prs:
      return run_bb84_scenario(config);
    case Scenario::kDecoyPns:
      return run_decoy_pns_scenario(config);
    case Scenario::kDecoyCbs:
      return run_decoy_cbs_scenario(config);
    case Scenario::kKeyRateSweep:
      return run_key_rate_sweep(config);
    case Scenario::kDeletionOptimizer:
      return run_deletion_optimizer(config);
  }
  throw ScenarioError("unknown scenario");
}

ScenarioReport run_sweep(const ScenarioConfig& config) {
  const SweepSpec& sweep = config.sweep;
  if (!config.parameters.contains(sweep.key))
    throw ConfigError("config error: sweep: unknown parameter '" + sweep.key +
                      "' for scenario '" + to_string(config.scenario) + "'");
  ScenarioReport report = base_report(config);
  SweepTable table;
  for (std::size_t i = 0; i < sweep.point_count(); ++i) {
    ScenarioConfig point_config = config;
    point_config.sweep.active = false;
    if (config.parameters[sweep.key].is_number_integer())
      point_config.parameters[sweep.key] =
          static_cast<std::int64_t>(std::llround(sweep.point(i)));
    else
      point_config.parameters[sweep.key] = sweep.point(i);
    revalidate_parameters(point_config);
    const ScenarioReport point = run_single(point_config);
    if (table.columns.empty()) {
      table.columns.push_back(sweep.key);
      for (const auto& [name, metric] : point.metrics)
        table.columns.push_back(name);
      for (const auto& [name, value] : point.derived)
        table.columns.push_back(name);
    }
    std::vector<double> row;
    row.push_back(sweep.point(i));
    for (const auto& [name, metric] : point.metrics) row.push_back(metric.mean);
    for (const auto& [name, value] : point.derived) row.push_back(value);
    table.rows.push_back(std::move(row));
    for (const std::string& caveat : point.caveats) {
      bool present = false;
      for (const std::string& existing : report.caveats)
        present = present || existing == caveat;
      if (!present) report.caveats.push_back(caveat);
    }
  }
  report.sweep = std::move(table);
  return report;
}

}  // namespace

ScenarioReport run_scenario(const ScenarioConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioReport report =
      config.sweep.active ? run_sweep(config) : run_single(config);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

}  // namespace qkdsim
