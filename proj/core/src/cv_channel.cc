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

#include "qkdsim/cv_channel.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qkdsim/stats.h"

namespace qkdsim {

void CvChannelParams::validate() const {
  if (!(transmittance > 0.0 && transmittance <= 1.0))
    throw std::invalid_argument("CvChannelParams: transmittance outside (0,1]");
  if (!(modulation_variance > 0.0))
    throw std::invalid_argument(
        "CvChannelParams: modulation_variance must be > 0");
  if (!(var_n_a >= 0.0))
    throw std::invalid_argument("CvChannelParams: var_n_a must be >= 0");
  if (!(var_n_b >= 0.0))
    throw std::invalid_argument("CvChannelParams: var_n_b must be >= 0");
  if (!(var_n_e_passive >= 0.0))
    throw std::invalid_argument(
        "CvChannelParams: var_n_e_passive must be >= 0");
  if (!(var_n_e_het >= 0.0))
    throw std::invalid_argument("CvChannelParams: var_n_e_het must be >= 0");
  if (!(delta_t >= 0.0))
    throw std::invalid_argument("CvChannelParams: delta_t must be >= 0");
  if (!(transmittance - delta_t > 0.0))
    throw std::invalid_argument(
        "CvChannelParams: transmittance - delta_t must be > 0");
}

namespace {

double gaussian_or_zero(RngStream& rng, double variance) {
  if (variance == 0.0) return 0.0;
  return rng.gaussian(0.0, std::sqrt(variance));
}

QuadratureTriple sample_passive_at(double m, double t_actual,
                                   const CvChannelParams& params,
                                   RngStream& rng) {
  QuadratureTriple triple;
  triple.scenario = CvScenario::kPassive;
  triple.m = m;
  triple.m_a = m + gaussian_or_zero(rng, params.var_n_a);
  triple.m_b = std::sqrt(t_actual) * m + gaussian_or_zero(rng, params.var_n_b);
  triple.m_e =
      std::sqrt(1.0 - t_actual) * m + gaussian_or_zero(rng, params.var_n_e_passive);
  return triple;
}

}  // namespace

QuadratureTriple sample_passive(double m, const CvChannelParams& params,
                                RngStream& rng) {
  params.validate();
  return sample_passive_at(m, params.transmittance, params, rng);
}

QuadratureTriple sample_heterodyne_resend(double m,
                                          const CvChannelParams& params,
                                          RngStream& rng) {
  params.validate();
  QuadratureTriple triple;
  triple.scenario = CvScenario::kHeterodyneResend;
  triple.m = m;
  triple.m_a = m + gaussian_or_zero(rng, params.var_n_a);
  triple.m_e = m + gaussian_or_zero(rng, params.var_n_e_het);
  triple.m_b = std::sqrt(params.transmittance) * triple.m_e +
               gaussian_or_zero(rng, params.var_n_b);
  return triple;
}

double adam_estimate(double m, const CvChannelParams& params, RngStream& rng) {
  if (!(params.var_n_a >= 0.0))
    throw std::invalid_argument("adam_estimate: var_n_a must be >= 0");
  return m + gaussian_or_zero(rng, params.var_n_a);
}

double gaussian_mutual_info(double signal_variance, double noise_variance) {
  if (!(signal_variance >= 0.0))
    throw std::invalid_argument(
        "gaussian_mutual_info: signal_variance must be >= 0");
  if (!(noise_variance > 0.0))
    throw std::invalid_argument(
        "gaussian_mutual_info: noise_variance must be > 0");
  return 0.5 * std::log2(1.0 + signal_variance / noise_variance);
}

double mutual_info_from_correlation(double rho_squared) {
  if (!(rho_squared >= 0.0 && rho_squared < 1.0))
    throw std::invalid_argument(
        "mutual_info_from_correlation: rho^2 must be in [0,1)");
  return -0.5 * std::log2(1.0 - rho_squared);
}

CvAnalytic cv_analytic(const CvChannelParams& params, CvScenario scenario) {
  params.validate();
  const double t = params.transmittance;
  const double v = params.modulation_variance;
  const double a = params.var_n_a;
  const double b = params.var_n_b;
  CvAnalytic out;
  if (scenario == CvScenario::kPassive) {
    const double e = params.var_n_e_passive;
    out.var_m_b = t * v + b;
    out.var_m_e = (1.0 - t) * v + e;
    out.cov_m_m_b = std::sqrt(t) * v;
    out.mse_b_of_m = v - t * v * v / out.var_m_b;
    out.mse_e_of_m = v - (1.0 - t) * v * v / out.var_m_e;
    out.mse_a_of_mb = out.var_m_b - t * v * v / (v + a);
    const double cov_mb_me = std::sqrt(t * (1.0 - t)) * v;
    out.mse_e_of_mb = out.var_m_b - cov_mb_me * cov_mb_me / out.var_m_e;
    out.i_ab =
        mutual_info_from_correlation(t * v * v / ((v + a) * out.var_m_b));
    out.i_ae = mutual_info_from_correlation((1.0 - t) * v * v /
                                            ((v + a) * out.var_m_e));
    out.i_be = mutual_info_from_correlation(cov_mb_me * cov_mb_me /
                                            (out.var_m_b * out.var_m_e));
  } else {
    const double e = params.var_n_e_het;
    out.var_m_e = v + e;
    out.var_m_b = t * (v + e) + b;
    out.cov_m_m_b = std::sqrt(t) * v;
    out.mse_b_of_m = v - t * v * v / out.var_m_b;
    out.mse_e_of_m = v - v * v / out.var_m_e;
    out.mse_a_of_mb = out.var_m_b - t * v * v / (v + a);
    const double cov_mb_me = std::sqrt(t) * (v + e);
    out.mse_e_of_mb = out.var_m_b - cov_mb_me * cov_mb_me / out.var_m_e;
    out.i_ab =
        mutual_info_from_correlation(t * v * v / ((v + a) * out.var_m_b));
    out.i_ae = mutual_info_from_correlation(v * v / ((v + a) * out.var_m_e));
    out.i_be = mutual_info_from_correlation(cov_mb_me * cov_mb_me /
                                            (out.var_m_b * out.var_m_e));
  }
  return out;
}

ReconciliationAdvantageReport reconciliation_advantage(
    const CvChannelParams& params, CvScenario scenario, std::int64_t n_trials,
    RngStream& rng) {
  if (n_trials < 1000)
    throw std::invalid_argument(
        "reconciliation_advantage: n_trials must be >= 1000");
  params.validate();
  const CvAnalytic analytic = cv_analytic(params, scenario);
  const double v = params.modulation_variance;
  const double a = params.var_n_a;
  const double t = params.transmittance;

  // Optimal linear (Wiener) weights from the closed-form second moments.
  const double w_b_of_m = analytic.cov_m_m_b / analytic.var_m_b;
  const double cov_m_m_e = scenario == CvScenario::kPassive
                               ? std::sqrt(1.0 - t) * v
                               : v;
  const double w_e_of_m = cov_m_m_e / analytic.var_m_e;
  const double cov_mb_ma = std::sqrt(t) * v;
  const double w_a_of_mb = cov_mb_ma / (v + a);
  const double cov_mb_me = scenario == CvScenario::kPassive
                               ? std::sqrt(t * (1.0 - t)) * v
                               : std::sqrt(t) * analytic.var_m_e;
  const double w_e_of_mb = cov_mb_me / analytic.var_m_e;

  KahanSum se_b_of_m, se_e_of_m, se_a_of_mb, se_e_of_mb;
  const double sigma_m = std::sqrt(v);
  for (std::int64_t i = 0; i < n_trials; ++i) {
    const double m = rng.gaussian(0.0, sigma_m);
    const QuadratureTriple triple =
        scenario == CvScenario::kPassive
            ? sample_passive_at(m, t, params, rng)
            : sample_heterodyne_resend(m, params, rng);
    const double eb = w_b_of_m * triple.m_b - m;
    const double ee = w_e_of_m * triple.m_e - m;
    const double ea = w_a_of_mb * triple.m_a - triple.m_b;
    const double er = w_e_of_mb * triple.m_e - triple.m_b;
    se_b_of_m.add(eb * eb);
    se_e_of_m.add(ee * ee);
    se_a_of_mb.add(ea * ea);
    se_e_of_mb.add(er * er);
  }
  const double inv_n = 1.0 / static_cast<double>(n_trials);
  ReconciliationAdvantageReport report;
  report.mse_b_of_m = se_b_of_m.value() * inv_n;
  report.mse_e_of_m = se_e_of_m.value() * inv_n;
  report.mse_a_of_mb = se_a_of_mb.value() * inv_n;
  report.mse_e_of_mb = se_e_of_mb.value() * inv_n;
  report.i_ab = analytic.i_ab;
  report.i_ae = analytic.i_ae;
  report.i_be = analytic.i_be;
  report.analytic = analytic;
  report.n_trials = n_trials;
  return report;
}

double mb_variance_statistic(const CvChannelParams& params,
                             CvScenario scenario, double t_actual,
                             std::int64_t n_pulses, RngStream& rng) {
  if (n_pulses < 2)
    throw std::invalid_argument("mb_variance_statistic: n_pulses must be >= 2");
  if (!(t_actual > 0.0 && t_actual <= 1.0))
    throw std::invalid_argument(
        "mb_variance_statistic: t_actual outside (0,1]");
  const double sigma_m = std::sqrt(params.modulation_variance);
  KahanSum sum, sum_sq;
  for (std::int64_t i = 0; i < n_pulses; ++i) {
    const double m = rng.gaussian(0.0, sigma_m);
    double m_b;
    if (scenario == CvScenario::kPassive) {
      m_b = std::sqrt(t_actual) * m + gaussian_or_zero(rng, params.var_n_b);
    } else {
      const double m_e = m + gaussian_or_zero(rng, params.var_n_e_het);
      m_b = std::sqrt(t_actual) * m_e + gaussian_or_zero(rng, params.var_n_b);
    }
    sum.add(m_b);
    sum_sq.add(m_b * m_b);
  }
  const double n = static_cast<double>(n_pulses);
  const double mean = sum.value() / n;
  return (sum_sq.value() - n * mean * mean) / (n - 1.0);
}

ExcessNoiseResult excess_noise_from_samples(std::vector<double> calibration,
                                            const std::vector<double>& h0,
                                            const std::vector<double>& h1,
                                            double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("excess_noise: alpha must be in (0,1)");
  if (calibration.empty() || h0.empty() || h1.empty())
    throw std::invalid_argument("excess_noise: empty sample set");
  std::sort(calibration.begin(), calibration.end());
  const auto n_cal = static_cast<std::int64_t>(calibration.size());
  auto rank = static_cast<std::int64_t>(
      std::ceil((1.0 - alpha) * static_cast<double>(n_cal)));
  rank = std::clamp<std::int64_t>(rank, 1, n_cal);
  ExcessNoiseResult result;
  result.threshold = calibration[static_cast<std::size_t>(rank - 1)];
  std::int64_t fa = 0;
  for (double s : h0) fa += s > result.threshold ? 1 : 0;
  std::int64_t hits = 0;
  for (double s : h1) hits += s > result.threshold ? 1 : 0;
  result.false_alarm_achieved =
      static_cast<double>(fa) / static_cast<double>(h0.size());
  result.power = static_cast<double>(hits) / static_cast<double>(h1.size());
  return result;
}

ExcessNoiseResult excess_noise_test(const CvChannelParams& params,
                                    std::int64_t n_pulses, double alpha,
                                    std::int64_t n_trials, RngStream& rng) {
  params.validate();
  if (n_pulses < 100)
    throw std::invalid_argument("excess_noise_test: n_pulses must be >= 100");
  if (n_trials < 10)
    throw std::invalid_argument("excess_noise_test: n_trials must be >= 10");
  const double t = params.transmittance;
  const double dt = params.delta_t;
  std::vector<double> calibration, h0, h1;
  calibration.reserve(static_cast<std::size_t>(n_trials));
  h0.reserve(static_cast<std::size_t>(n_trials));
  h1.reserve(static_cast<std::size_t>(n_trials));
  for (std::int64_t i = 0; i < n_trials; ++i)
    calibration.push_back(mb_variance_statistic(params, CvScenario::kPassive,
                                                t + dt, n_pulses, rng));
  for (std::int64_t i = 0; i < n_trials; ++i) {
    const double t_actual = dt == 0.0 ? t : rng.uniform(t - dt, t + dt);
    h0.push_back(mb_variance_statistic(params, CvScenario::kPassive, t_actual,
                                       n_pulses, rng));
  }
  for (std::int64_t i = 0; i < n_trials; ++i)
    h1.push_back(mb_variance_statistic(params, CvScenario::kHeterodyneResend,
                                       t, n_pulses, rng));
  return excess_noise_from_samples(std::move(calibration), h0, h1, alpha);
}

}  // namespace qkdsim
