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

#ifndef QKDSIM_CONFIG_H
#define QKDSIM_CONFIG_H

#include <cstdint>
#include <string>

#include <json.hpp>

#include "qkdsim/error.h"

namespace qkdsim {

enum class Scenario {
  kCvPassive,
  kCvHeterodyneResend,
  kCvExcessNoiseTest,
  kBb84Prs,
  kDecoyPns,
  kDecoyCbs,
  kKeyRateSweep,
  kDeletionOptimizer,
};

std::string to_string(Scenario scenario);
Scenario scenario_from_string(const std::string& name);

enum class OutputFormat { kJson, kCsv };

std::string to_string(OutputFormat format);
OutputFormat output_format_from_string(const std::string& name);

/// Grid sweep over one numeric parameter: lo, lo+step, ..., up to hi
/// (inclusive within half a step).
struct SweepSpec {
  bool active = false;
  std::string key;
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;

  std::size_t point_count() const;
  double point(std::size_t i) const;
};

/// Parses "key=lo:hi:step".
SweepSpec parse_sweep_spec(const std::string& text);

struct ScenarioConfig {
  int schema_version = 1;
  Scenario scenario = Scenario::kCvPassive;
  std::uint64_t master_seed = 1;
  std::int64_t n_trials = 1;
  nlohmann::json parameters;  // fully validated, defaults applied

  OutputFormat format = OutputFormat::kJson;
  std::string output_path;  // empty: stdout
  int n_threads = 1;
  SweepSpec sweep;

  /// Canonical echo of the semantically meaningful fields (excludes output
  /// routing and thread count, which cannot affect results).
  nlohmann::json semantic_json() const;

  /// FNV-1a over the canonical semantic JSON.
  std::uint64_t config_hash() const;
};

/// Reads raw JSON from a file path, or from inline JSON text when the
/// argument starts with '{'.
nlohmann::json load_config_json(const std::string& path_or_inline);

/// Loads and fully validates a config from a file path, or from inline JSON
/// text when the argument starts with '{'. Unknown keys, missing scenarios,
/// and out-of-range values raise ConfigError naming the offending key and
/// the allowed range.
ScenarioConfig load_config(const std::string& path_or_inline);

/// Validates an already-parsed JSON document.
ScenarioConfig parse_config(const nlohmann::json& root);

/// Re-validates `config.parameters` after an override (used by sweeps).
void revalidate_parameters(ScenarioConfig& config);

}  // namespace qkdsim

#endif  // QKDSIM_CONFIG_H
