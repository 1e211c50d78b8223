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

#include "qkdsim/key_rate.h"

#include <cmath>
#include <stdexcept>

namespace qkdsim {

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("binary_entropy: p must be in [0,1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double key_rate_ideal(double qber) {
  if (!(qber >= 0.0 && qber <= 0.5))
    throw std::invalid_argument("key_rate_ideal: qber must be in [0,0.5]");
  return 1.0 - 2.0 * binary_entropy(qber);
}

double channel_rate(double i_ab, double i_ae) {
  if (!(i_ab >= 0.0) || !(i_ae >= 0.0))
    throw std::invalid_argument("channel_rate: inputs must be >= 0");
  return i_ab - i_ae;
}

double leak_ec(double f_factor, double n_bits, double qber,
               std::string* warning) {
  if (!(n_bits >= 0.0))
    throw std::invalid_argument("leak_ec: n must be >= 0");
  if ((f_factor < 1.0 || f_factor > 2.0) && warning != nullptr)
    *warning = kCaveatLeakFactorRange;
  return f_factor * n_bits * binary_entropy(qber);
}

IeP1Profile ie_p1_profile(double lambda, double n_bits) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("ie_p1_profile: lambda must be > 0");
  if (!(n_bits >= 2.0))
    throw std::invalid_argument("ie_p1_profile: n must be >= 2");
  IeP1Profile profile;
  profile.log2_ie = -(lambda * n_bits - std::log2(n_bits));
  profile.log2_p1 = -lambda * n_bits;
  return profile;
}

CountingBounds counting_bounds(std::int64_t n_total, std::int64_t n_checked,
                               double delta) {
  if (n_total <= 0 || n_checked <= 0 || n_checked >= n_total)
    throw std::invalid_argument(
        "counting_bounds: need 0 < n_checked < n_total");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("counting_bounds: delta must be in (0,1)");
  const double k = static_cast<double>(n_checked);
  const double n = static_cast<double>(n_total);
  // Serfling: P(sample mean - population mean >= delta)
  //   <= exp(-2 k delta^2 / (1 - (k-1)/n)).
  const double fstar = (k - 1.0) / n;
  CountingBounds bounds;
  bounds.classical_exponent = 2.0 * k * delta * delta / ((1.0 - fstar) * std::log(2.0));
  bounds.quantum_exponent = 0.5 * bounds.classical_exponent;
  return bounds;
}

KeyRateReport make_key_rate_report(double qber, double f_factor, double n_bits,
                                   double lambda) {
  KeyRateReport report;
  report.qber = qber;
  report.rate = key_rate_ideal(qber);
  std::string warning;
  report.leak_ec_bits = leak_ec(f_factor, n_bits, qber, &warning);
  const IeP1Profile profile = ie_p1_profile(lambda, n_bits);
  report.log2_ie_bound = profile.log2_ie;
  report.log2_p1_bound = profile.log2_p1;
  report.caveats = {kCaveatAsymptotic, kCaveatChannelRate, kCaveatP1Exponent};
  if (report.rate <= 0.0) report.caveats.push_back(kCaveatNegativeRate);
  if (!warning.empty()) report.caveats.push_back(warning);
  return report;
}

}  // namespace qkdsim
