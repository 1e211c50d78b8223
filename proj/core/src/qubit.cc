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

#include "qkdsim/qubit.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qkdsim {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInvSqrt2 = 0.7071067811865475244;
}  // namespace

bool QubitState::is_normalized(double tol) const {
  const double n = std::norm(amp0) + std::norm(amp1);
  return std::abs(n - 1.0) <= tol;
}

double overlap_probability(const QubitState& a, const QubitState& b) {
  const std::complex<double> ip =
      std::conj(a.amp0) * b.amp0 + std::conj(a.amp1) * b.amp1;
  return std::norm(ip);
}

MeasBasis MeasBasis::z() { return {0.0, BasisLabel::kZ}; }
MeasBasis MeasBasis::x() { return {kPi / 4.0, BasisLabel::kX}; }
MeasBasis MeasBasis::breidbart() { return {kPi / 8.0, BasisLabel::kBreidbart}; }
MeasBasis MeasBasis::custom(double angle) {
  return {angle, BasisLabel::kCustom};
}

QubitState MeasBasis::eigenstate(int outcome) const {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  if (outcome == 0) return {{c, 0.0}, {s, 0.0}};
  if (outcome == 1) return {{-s, 0.0}, {c, 0.0}};
  throw std::invalid_argument("eigenstate: outcome must be 0 or 1");
}

QubitState bb84_state(int bit, BasisLabel basis) {
  if (bit != 0 && bit != 1)
    throw std::invalid_argument("bb84_state: bit must be 0 or 1");
  switch (basis) {
    case BasisLabel::kZ:
      return bit == 0 ? QubitState{{1.0, 0.0}, {0.0, 0.0}}
                      : QubitState{{0.0, 0.0}, {1.0, 0.0}};
    case BasisLabel::kX:
      return bit == 0 ? QubitState{{kInvSqrt2, 0.0}, {kInvSqrt2, 0.0}}
                      : QubitState{{kInvSqrt2, 0.0}, {-kInvSqrt2, 0.0}};
    default:
      throw std::invalid_argument("bb84_state: basis must be Z or X");
  }
}

BornProbabilities born_probability(const QubitState& state,
                                   const MeasBasis& basis) {
  if (!state.is_normalized())
    throw std::invalid_argument("born_probability: state is not normalized");
  const double c = std::cos(basis.angle);
  const double s = std::sin(basis.angle);
  const double p0 = std::norm(c * state.amp0 + s * state.amp1);
  const double p1 = std::norm(-s * state.amp0 + c * state.amp1);
  // Renormalize away rounding so p0 + p1 == 1 holds exactly downstream.
  const double total = p0 + p1;
  return {p0 / total, p1 / total};
}

MeasureResult measure_and_resend(const QubitState& state,
                                 const MeasBasis& basis, RngStream& rng) {
  const BornProbabilities p = born_probability(state, basis);
  const int outcome = rng.bernoulli(p.p1) ? 1 : 0;
  return {outcome, basis.eigenstate(outcome)};
}

std::vector<LabeledState> bb84_ensemble() {
  return {
      {bb84_state(0, BasisLabel::kZ), 0.25, 0},
      {bb84_state(1, BasisLabel::kZ), 0.25, 1},
      {bb84_state(0, BasisLabel::kX), 0.25, 0},
      {bb84_state(1, BasisLabel::kX), 0.25, 1},
  };
}

OutcomeStats outcome_stats(const std::vector<LabeledState>& ensemble,
                           const MeasBasis& basis) {
  OutcomeStats stats;
  for (const LabeledState& member : ensemble) {
    const BornProbabilities p = born_probability(member.state, basis);
    const int bit = member.bit ? 1 : 0;
    stats.joint[0][bit] += member.prior * p.p0;
    stats.joint[1][bit] += member.prior * p.p1;
  }
  for (int o = 0; o < 2; ++o) {
    stats.prob[o] = stats.joint[o][0] + stats.joint[o][1];
    if (stats.prob[o] > 0.0) {
      stats.best_bit[o] = stats.joint[o][1] > stats.joint[o][0] ? 1 : 0;
      stats.confidence[o] = stats.joint[o][stats.best_bit[o]] / stats.prob[o];
    }
  }
  return stats;
}

DeletionAdvantage optimal_deletion_advantage(
    const std::vector<LabeledState>& ensemble, double deletion_budget,
    int basis_grid, int threshold_grid) {
  if (ensemble.empty())
    throw std::invalid_argument("optimal_deletion_advantage: empty ensemble");
  if (!(deletion_budget >= 0.0 && deletion_budget < 1.0))
    throw std::invalid_argument(
        "optimal_deletion_advantage: deletion_budget must be in [0,1)");
  if (basis_grid < 1 || threshold_grid < 1)
    throw std::invalid_argument(
        "optimal_deletion_advantage: grid counts must be >= 1");
  double prior_sum = 0.0;
  for (const LabeledState& member : ensemble) prior_sum += member.prior;
  if (std::abs(prior_sum - 1.0) > 1e-9)
    throw std::invalid_argument(
        "optimal_deletion_advantage: priors must sum to 1");

  const double min_keep = 1.0 - deletion_budget;
  DeletionAdvantage best;
  best.success_prob = -1.0;

  for (int gi = 0; gi < basis_grid; ++gi) {
    const double angle = kPi * static_cast<double>(gi) / basis_grid;
    const OutcomeStats stats = outcome_stats(ensemble, MeasBasis::custom(angle));
    for (int ti = 0; ti < threshold_grid; ++ti) {
      const double threshold =
          threshold_grid == 1
              ? 0.5
              : 0.5 + 0.5 * static_cast<double>(ti) / (threshold_grid - 1);
      double keep_prob = 0.0;
      double keep_success = 0.0;
      bool kept[2] = {false, false};
      for (int o = 0; o < 2; ++o) {
        // Zero-probability outcomes are kept vacuously; they contribute
        // nothing either way.
        if (stats.prob[o] == 0.0 || stats.confidence[o] >= threshold) {
          kept[o] = true;
          keep_prob += stats.prob[o];
          keep_success += stats.prob[o] * stats.confidence[o];
        }
      }
      if (keep_prob < min_keep - 1e-12 || keep_prob <= 0.0) continue;
      const double success = keep_success / keep_prob;
      if (success > best.success_prob + 1e-15) {
        best.success_prob = success;
        best.best_basis_angle = angle;
        best.expected_keep_fraction = keep_prob;
        std::ostringstream rule;
        rule << "keep outcomes with posterior confidence >= " << threshold
             << "; kept = {";
        bool first = true;
        for (int o = 0; o < 2; ++o) {
          if (!kept[o]) continue;
          if (!first) rule << ",";
          rule << o;
          first = false;
        }
        rule << "}";
        best.best_rule = rule.str();
      }
    }
  }
  if (best.success_prob < 0.0)
    throw std::invalid_argument(
        "optimal_deletion_advantage: no feasible keep rule on the grid");
  return best;
}

}  // namespace qkdsim
