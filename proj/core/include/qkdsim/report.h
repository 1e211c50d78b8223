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

#ifndef QKDSIM_REPORT_H
#define QKDSIM_REPORT_H

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qkdsim/config.h"

namespace qkdsim {

/// One Monte Carlo metric: mean over trials, sample variance of the
/// per-trial values, normal 95% CI of the mean, and, when a closed form
/// exists, the analytic reference with the discrepancy in standard errors.
struct MetricSummary {
  double mean = 0.0;
  double variance = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::int64_t n = 0;
  std::optional<double> analytic_ref;
  std::optional<double> sigmas_off;
};

/// Grid results for sweep scenarios; one row per grid point.
struct SweepTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ScenarioReport {
  nlohmann::json config_echo;  // semantic config only
  std::uint64_t config_hash = 0;
  std::string scenario;
  std::int64_t n_trials = 0;
  std::map<std::string, MetricSummary> metrics;
  std::map<std::string, double> derived;  // closed-form scalars
  std::map<std::string, std::string> notes;
  std::vector<std::string> caveats;
  std::optional<SweepTable> sweep;

  // Wall-clock time is informational only and never serialized: emitted
  // bytes must be a function of (config, master_seed) alone.
  double wall_seconds = 0.0;
};

/// Locale-independent shortest-faithful formatting (17 significant digits).
std::string format_double(double value);

nlohmann::json report_to_json(const ScenarioReport& report);
std::string report_to_csv(const ScenarioReport& report);

/// Writes the report to `path` (or stdout when empty) in the given format.
/// Throws ScenarioError on unwritable destinations.
void emit_report(const ScenarioReport& report, OutputFormat format,
                 const std::string& path);

}  // namespace qkdsim

#endif  // QKDSIM_REPORT_H
