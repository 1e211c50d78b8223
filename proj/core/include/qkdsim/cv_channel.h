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

#ifndef QKDSIM_CV_CHANNEL_H
#define QKDSIM_CV_CHANNEL_H

#include <cstdint>
#include <vector>

#include "qkdsim/rng.h"

namespace qkdsim {

/// One-quadrature Gaussian channel parameters, in shot-noise units. The
/// modulated quadrature m is drawn with variance V per use; the conjugate
/// quadrature behaves symmetrically and is not simulated separately.
struct CvChannelParams {
  double transmittance = 0.1;       // T = |t|^2, t real positive
  double modulation_variance = 25;  // V
  double var_n_a = 0.0;             // sender's uncertainty about its own m
  double var_n_b = 1.0;             // receiver homodyne noise
  double var_n_e_passive = 1.0;     // tap homodyne noise
  double var_n_e_het = 2.0;         // intercept heterodyne noise
  double delta_t = 0.0;             // absolute uncertainty of T

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

enum class CvScenario { kPassive, kHeterodyneResend };

/// One channel use: the modulated value and the three parties' versions.
struct QuadratureTriple {
  double m = 0.0;
  double m_a = 0.0;
  double m_b = 0.0;
  double m_e = 0.0;
  CvScenario scenario = CvScenario::kPassive;
};

/// Beamsplitter tap: m_B = sqrt(T) m + n_B, m_E = sqrt(1-T) m + n_E.
QuadratureTriple sample_passive(double m, const CvChannelParams& params,
                                RngStream& rng);

/// Intercept near the transmitter: m_E = m + n_E (heterodyne, var 2 by
/// default), then resend so m_B = sqrt(T) m_E + n_B.
QuadratureTriple sample_heterodyne_resend(double m,
                                          const CvChannelParams& params,
                                          RngStream& rng);

/// Sender's own record of the modulated value, m_A = m + n_A.
double adam_estimate(double m, const CvChannelParams& params, RngStream& rng);

/// Gaussian channel information: 0.5 log2(1 + S/N) bits per use.
/// Rejects zero noise.
double gaussian_mutual_info(double signal_variance, double noise_variance);

/// Mutual information of jointly Gaussian pairs from squared correlation.
double mutual_info_from_correlation(double rho_squared);

/// Closed-form second moments, optimal-linear-estimator errors, and mutual
/// informations for a scenario. All MSEs are in shot-noise units; mutual
/// informations are between m_A and the other party's variable (reduces to
/// the nominal-m forms when var_n_a = 0).
struct CvAnalytic {
  double var_m_b = 0.0;
  double var_m_e = 0.0;
  double cov_m_m_b = 0.0;
  double mse_b_of_m = 0.0;
  double mse_e_of_m = 0.0;
  double mse_a_of_mb = 0.0;
  double mse_e_of_mb = 0.0;
  double i_ab = 0.0;
  double i_ae = 0.0;
  double i_be = 0.0;
};
CvAnalytic cv_analytic(const CvChannelParams& params, CvScenario scenario);

/// Direct- and reverse-reconciliation accuracy comparison: Monte Carlo MSEs
/// using the optimal linear estimators, with the closed-form values carried
/// alongside.
struct ReconciliationAdvantageReport {
  double mse_b_of_m = 0.0;
  double mse_e_of_m = 0.0;
  double mse_a_of_mb = 0.0;
  double mse_e_of_mb = 0.0;
  double i_ab = 0.0;
  double i_ae = 0.0;
  double i_be = 0.0;
  CvAnalytic analytic;
  std::int64_t n_trials = 0;
};
ReconciliationAdvantageReport reconciliation_advantage(
    const CvChannelParams& params, CvScenario scenario, std::int64_t n_trials,
    RngStream& rng);

/// Variance statistic used by the excess-noise check: unbiased sample
/// variance of m_B over n_pulses channel uses at actual transmittance
/// `t_actual` (passive) or at the nominal T (intercept-resend).
double mb_variance_statistic(const CvChannelParams& params,
                             CvScenario scenario, double t_actual,
                             std::int64_t n_pulses, RngStream& rng);

struct ExcessNoiseResult {
  double power = 0.0;
  double false_alarm_achieved = 0.0;
  double threshold = 0.0;
};

/// Builds the decision rule "flag an attack when the m_B variance statistic
/// exceeds a threshold" from three sample sets: calibration draws under the
/// worst-case no-attack hypothesis, fresh no-attack draws, and attack draws.
/// The threshold is the empirical (1-alpha) quantile of the calibration set.
ExcessNoiseResult excess_noise_from_samples(std::vector<double> calibration,
                                            const std::vector<double>& h0,
                                            const std::vector<double>& h1,
                                            double alpha);

/// One-shot detectability experiment. Null hypothesis: passive channel with
/// T drawn uniformly in [T - delta_t, T + delta_t] per trial. Alternative:
/// intercept-resend at the nominal T. Threshold is calibrated empirically on
/// the worst-case null (largest in-band transmittance) so the achieved false
/// alarm stays at or below alpha.
ExcessNoiseResult excess_noise_test(const CvChannelParams& params,
                                    std::int64_t n_pulses, double alpha,
                                    std::int64_t n_trials, RngStream& rng);

}  // namespace qkdsim

#endif  // QKDSIM_CV_CHANNEL_H
