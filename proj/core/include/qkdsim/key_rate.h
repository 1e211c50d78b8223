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

#ifndef QKDSIM_KEY_RATE_H
#define QKDSIM_KEY_RATE_H

#include <cstdint>
#include <string>
#include <vector>

namespace qkdsim {

// Caveats attached to every key-rate report. The closed-form rates computed
// here quantify specific formulas, not end-to-end security; the annotations
// keep that distinction visible in emitted reports.
inline constexpr const char* kCaveatChannelRate =
    "channel mutual-information rate: valid for passive attacks only; "
    "I(A;E) is a channel quantity, not the attacker's mutual information "
    "I_E(K) on the final key";
inline constexpr const char* kCaveatAsymptotic =
    "asymptotic random-coding rate; nonconstructive for finite codes and "
    "excludes side information leaked by error-correction and "
    "privacy-amplification messages";
inline constexpr const char* kCaveatNegativeRate =
    "rate <= 0 => no key; negative rates are reported unclamped";
inline constexpr const char* kCaveatP1Exponent =
    "p1 guessing bound is treated as exact at the exponent level";
inline constexpr const char* kCaveatLeakFactorRange =
    "ECC leak factor f outside the conventional [1,2] range";

/// Binary entropy in bits; h(0) = h(1) = 0. Rejects p outside [0,1].
double binary_entropy(double p);

/// Ideal asymptotic secret-key rate 1 - 2*h(qber), bits per channel use.
/// May be negative; callers report it unclamped. Rejects qber outside
/// [0, 0.5].
double key_rate_ideal(double qber);

/// Channel-rate difference I(A;B) - I(A;E), bits per use. Meaningful only
/// for passive attacks (see kCaveatChannelRate). Rejects negative inputs.
double channel_rate(double i_ab, double i_ae);

/// ECC information leak f * n * h(qber) in bits. If `warning` is non-null it
/// receives kCaveatLeakFactorRange when f lies outside [1,2]; the value is
/// computed regardless.
double leak_ec(double f_factor, double n_bits, double qber,
               std::string* warning = nullptr);

/// Exponent-level profile of the accessible-information bound versus the
/// whole-key guessing probability: log2 I_E = -(lambda*n - log2 n) and
/// log2 p1 = -lambda*n. Returned as log2 values to avoid underflow.
struct IeP1Profile {
  double log2_ie = 0.0;
  double log2_p1 = 0.0;
};
IeP1Profile ie_p1_profile(double lambda, double n_bits);

/// Tail-bound exponents (log2) for estimating the unchecked-part error rate
/// from a randomly checked subset of n_total positions. The classical
/// exponent is the Serfling sampling-without-replacement bound; the quantum
/// exponent is exactly half of it.
struct CountingBounds {
  double classical_exponent = 0.0;
  double quantum_exponent = 0.0;
};
CountingBounds counting_bounds(std::int64_t n_total, std::int64_t n_checked,
                               double delta);

struct KeyRateReport {
  double rate = 0.0;
  double qber = 0.0;
  double leak_ec_bits = 0.0;
  double log2_ie_bound = 0.0;
  double log2_p1_bound = 0.0;
  std::vector<std::string> caveats;
};

/// Assembles the closed-form quantities for one (qber, f, n, lambda) point
/// with the standard caveat annotations attached.
KeyRateReport make_key_rate_report(double qber, double f_factor, double n_bits,
                                   double lambda);

}  // namespace qkdsim

#endif  // QKDSIM_KEY_RATE_H
