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

#ifndef QKDSIM_SCENARIOS_H
#define QKDSIM_SCENARIOS_H

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "qkdsim/config.h"
#include "qkdsim/report.h"
#include "qkdsim/rng.h"
#include "qkdsim/stats.h"

namespace qkdsim {

/// Computes one trial's metric values into `values` using the trial's own
/// substream. Must not touch shared state.
using TrialFn =
    std::function<void(std::int64_t trial, RngStream& rng,
                       std::span<double> values)>;

/// Runs n_trials over a worker pool and folds each metric with compensated
/// summation. Trials are grouped into fixed blocks folded in block order, so
/// the result is bit-identical for any thread count.
std::vector<MetricAccumulator> run_trials_aggregate(
    std::int64_t n_trials, int n_threads, std::uint64_t master_seed,
    std::string_view site_label, std::size_t n_values, const TrialFn& fn);

/// Runs n_trials and returns one scalar per trial, in trial order.
std::vector<double> run_trials_collect(
    std::int64_t n_trials, int n_threads, std::uint64_t master_seed,
    std::string_view site_label,
    const std::function<double(std::int64_t, RngStream&)>& fn);

/// Executes the configured scenario end to end (including any sweep) and
/// returns the assembled report. Throws ConfigError / ScenarioError /
/// InvariantViolation; never crashes on scenario-level failures.
ScenarioReport run_scenario(const ScenarioConfig& config);

}  // namespace qkdsim

#endif  // QKDSIM_SCENARIOS_H
