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

#ifndef QKDSIM_STATS_H
#define QKDSIM_STATS_H

#include <cstdint>

namespace qkdsim {

/// Compensated (Neumaier) summation. Used everywhere trial results are
/// aggregated so the merged totals do not depend on how work was chunked
/// across threads, as long as insertion order is fixed.
class KahanSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Streaming mean/variance over per-trial values. Deterministic for a fixed
/// insertion/merge order.
class MetricAccumulator {
 public:
  void add(double x);
  /// Appends `other` after this accumulator's values. Callers merge in
  /// ascending trial-block order to keep results thread-count independent.
  void merge(const MetricAccumulator& other);

  std::int64_t count() const { return n_; }
  double sum() const { return sum_.value(); }
  double mean() const;
  /// Unbiased sample variance of the per-trial values.
  double sample_variance() const;
  /// Standard error of the mean.
  double std_error() const;
  double ci95_halfwidth() const;

 private:
  std::int64_t n_ = 0;
  KahanSum sum_;
  KahanSum sum_sq_;
};

double normal_cdf(double z);
/// Inverse standard normal CDF (Acklam's approximation, |rel err| < 2e-9).
double normal_quantile(double p);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

/// Chi-square CDF with `df` degrees of freedom.
double chi_square_cdf(double x, int df);

}  // namespace qkdsim

#endif  // QKDSIM_STATS_H
