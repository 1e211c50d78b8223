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

#include "qkdsim/stats.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "qkdsim/rng.h"

namespace qkdsim {
namespace {

TEST(KahanSum, CompensatesCancellation) {
  KahanSum sum;
  sum.add(1e16);
  sum.add(1.0);
  sum.add(-1e16);
  EXPECT_DOUBLE_EQ(sum.value(), 1.0);
}

TEST(KahanSum, ManySmallAdds) {
  KahanSum sum;
  for (int i = 0; i < 10000000; ++i) sum.add(0.1);
  EXPECT_NEAR(sum.value(), 1e6, 1e-6);
}

TEST(MetricAccumulator, MatchesTwoPassStatistics) {
  RngStream rng(21, 0, "stats");
  std::vector<double> values;
  MetricAccumulator acc;
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.gaussian(5.0, 3.0);
    values.push_back(x);
    acc.add(x);
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= (values.size() - 1.0);
  EXPECT_NEAR(acc.mean(), mean, 1e-10);
  EXPECT_NEAR(acc.sample_variance(), var, 1e-7);
}

TEST(MetricAccumulator, FixedBlockMergeIsDeterministic) {
  RngStream rng(22, 0, "stats.merge");
  std::vector<double> values;
  for (int i = 0; i < 4096; ++i) values.push_back(rng.gaussian(0.0, 1.0));

  MetricAccumulator sequential;
  for (double v : values) sequential.add(v);

  // Partials computed per fixed block and folded in block order give the
  // same bits no matter which worker produced each block.
  auto merge_blocks = [&values] {
    MetricAccumulator merged;
    for (std::size_t block = 0; block < 4; ++block) {
      MetricAccumulator partial;
      for (std::size_t i = block * 1024; i < (block + 1) * 1024; ++i)
        partial.add(values[i]);
      merged.merge(partial);
    }
    return merged;
  };
  const MetricAccumulator first = merge_blocks();
  const MetricAccumulator second = merge_blocks();
  EXPECT_EQ(first.sum(), second.sum());
  EXPECT_EQ(first.mean(), second.mean());
  EXPECT_NEAR(first.mean(), sequential.mean(), 1e-12);
  EXPECT_NEAR(first.sample_variance(), sequential.sample_variance(), 1e-9);
}

TEST(NormalQuantile, KnownValues) {
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-7);
  EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-12);
  EXPECT_NEAR(normal_quantile(0.05), -1.6448536269514722, 1e-7);
  for (double p : {0.001, 0.1, 0.3, 0.7, 0.9, 0.999})
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-8);
  EXPECT_THROW(normal_quantile(0.0), std::invalid_argument);
}

TEST(ChiSquareCdf, KnownValues) {
  EXPECT_NEAR(chi_square_cdf(6.634897, 1), 0.99, 1e-5);
  // df = 2 has the closed form 1 - exp(-x/2).
  EXPECT_NEAR(chi_square_cdf(3.0, 2), 1.0 - std::exp(-1.5), 1e-10);
  EXPECT_DOUBLE_EQ(chi_square_cdf(0.0, 3), 0.0);
  EXPECT_THROW(chi_square_cdf(1.0, 0), std::invalid_argument);
}

}  // namespace
}  // namespace qkdsim
