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

#ifndef QKDSIM_QUBIT_H
#define QKDSIM_QUBIT_H

#include <complex>
#include <string>
#include <vector>

#include "qkdsim/rng.h"

namespace qkdsim {

/// Pure two-level state. All four BB84 signal states and every measurement
/// basis used here live on the real-amplitude circle, but complex amplitudes
/// are kept for generality.
struct QubitState {
  std::complex<double> amp0{1.0, 0.0};
  std::complex<double> amp1{0.0, 0.0};

  bool is_normalized(double tol = 1e-12) const;
};

/// Squared overlap |<a|b>|^2.
double overlap_probability(const QubitState& a, const QubitState& b);

enum class BasisLabel { kZ, kX, kBreidbart, kCustom };

/// Orthonormal measurement basis oriented at `angle` on the real-amplitude
/// circle: eigenstates (cos a, sin a) and (-sin a, cos a).
struct MeasBasis {
  double angle = 0.0;
  BasisLabel label = BasisLabel::kCustom;

  static MeasBasis z();
  static MeasBasis x();
  static MeasBasis breidbart();
  static MeasBasis custom(double angle);

  QubitState eigenstate(int outcome) const;
};

/// Canonical BB84 signal state for (bit, basis). Basis must be kZ or kX.
QubitState bb84_state(int bit, BasisLabel basis);

struct BornProbabilities {
  double p0 = 0.0;
  double p1 = 0.0;
};

/// Born-rule outcome probabilities of `state` measured in `basis`.
/// Rejects unnormalized states.
BornProbabilities born_probability(const QubitState& state,
                                   const MeasBasis& basis);

struct MeasureResult {
  int outcome = 0;
  QubitState resent;
};

/// Projective measurement with resend: samples the outcome per the Born rule
/// and collapses to the corresponding basis eigenstate.
MeasureResult measure_and_resend(const QubitState& state,
                                 const MeasBasis& basis, RngStream& rng);

/// One member of a signal ensemble: a state, its prior, and the bit it
/// encodes.
struct LabeledState {
  QubitState state;
  double prior = 0.0;
  int bit = 0;
};

/// The four BB84 states with uniform priors.
std::vector<LabeledState> bb84_ensemble();

/// Per-outcome statistics of measuring an ensemble in a fixed basis:
/// outcome probability, posterior confidence of the best bit guess, and that
/// guess.
struct OutcomeStats {
  double prob[2] = {0.0, 0.0};
  double joint[2][2] = {{0.0, 0.0}, {0.0, 0.0}};  // [outcome][bit]
  double confidence[2] = {1.0, 1.0};
  int best_bit[2] = {0, 0};
};

OutcomeStats outcome_stats(const std::vector<LabeledState>& ensemble,
                           const MeasBasis& basis);

struct DeletionAdvantage {
  double best_basis_angle = 0.0;
  std::string best_rule;
  double success_prob = 0.0;
  double expected_keep_fraction = 1.0;
};

/// Brute-force search for the best measure-and-postselect bit guess when a
/// fraction of outcomes may be discarded.
///
/// Sweeps `basis_grid` measurement angles over [0, pi) and confidence
/// thresholds of the form "delete outcomes whose posterior confidence is
/// below t" (t swept over `threshold_grid` values in [0.5, 1]), subject to
/// keeping at least 1 - deletion_budget of outcomes in expectation. Returns
/// the best average success probability over kept outcomes.
DeletionAdvantage optimal_deletion_advantage(
    const std::vector<LabeledState>& ensemble, double deletion_budget,
    int basis_grid, int threshold_grid = 100);

}  // namespace qkdsim

#endif  // QKDSIM_QUBIT_H
