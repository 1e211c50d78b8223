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

#ifndef QKDSIM_RNG_H
#define QKDSIM_RNG_H

#include <cstdint>
#include <string_view>

namespace qkdsim {

/// 64-bit FNV-1a hash, used to key RNG substreams by site label.
std::uint64_t fnv1a64(std::string_view s);

/// Counter-based random substream (Philox2x64-10).
///
/// A stream is addressed by (master_seed, trial_index, site_label). The same
/// address always replays the same draw sequence, independent of execution
/// order and thread count. Distinct trial indices under one label occupy
/// disjoint counter blocks; distinct labels select distinct cipher keys.
///
/// Satisfies UniformRandomBitGenerator, but the distribution helpers below
/// are hand-rolled so draw sequences do not depend on the standard library
/// implementation.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, std::uint64_t trial_index,
            std::string_view site_label);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }

  result_type operator()();

  /// Uniform double in [0, 1), 53 bits of precision.
  double uniform01();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  /// Gaussian variate (Marsaglia polar method; one spare is cached).
  double gaussian(double mean, double stddev);

  bool bernoulli(double p);

  /// Uniform integer in [0, n). Requires n >= 1.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Poisson variate. Exact for any mean >= 0 (chunked multiplication
  /// method; large means are split into independent partial sums).
  std::int64_t poisson(double mean);

  /// Binomial(n, p) by direct Bernoulli summation.
  std::int64_t binomial(std::int64_t n, double p);

 private:
  void refill();

  std::uint64_t key_;
  std::uint64_t block_;
  std::uint64_t stream_id_;
  std::uint64_t out_[2];
  int pos_;
  double spare_;
  bool has_spare_;
};

}  // namespace qkdsim

#endif  // QKDSIM_RNG_H
