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

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qkdsim/config.h"
#include "qkdsim/error.h"
#include "qkdsim/report.h"
#include "qkdsim/scenarios.h"

namespace {

using qkdsim::Scenario;

struct SubcommandSpec {
  const char* name;
  const char* description;
  const char* default_scenario;
  std::vector<Scenario> allowed;
};

const std::vector<SubcommandSpec>& subcommands() {
  static const std::vector<SubcommandSpec> specs = {
      {"cv",
       "Continuous-variable channel experiments (passive tap, "
       "heterodyne intercept-resend, excess-noise detectability)",
       "cv_heterodyne_resend",
       {Scenario::kCvPassive, Scenario::kCvHeterodyneResend,
        Scenario::kCvExcessNoiseTest}},
      {"bb84",
       "Single-photon sessions with partial intercept-resend and deletion",
       "bb84_prs",
       {Scenario::kBb84Prs}},
      {"decoy",
       "Multi-photon source attacks: photon-number splitting and coherent "
       "beam splitting",
       "decoy_pns",
       {Scenario::kDecoyPns, Scenario::kDecoyCbs}},
      {"keyrate", "Closed-form key-rate, leak, and counting-bound sweeps",
       "key_rate_sweep",
       {Scenario::kKeyRateSweep}},
      {"optimize", "Measure-and-postselect deletion-budget search",
       "deletion_optimizer",
       {Scenario::kDeletionOptimizer}},
  };
  return specs;
}

struct CliOptions {
  std::string config_text;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::int64_t trials = 0;
  bool trials_set = false;
  std::string out_path;
  bool out_set = false;
  std::string format;
  int threads = 0;
  std::string sweep;
};

void emit_structured_error(const std::string& message,
                           qkdsim::OutputFormat format,
                           const std::string& path) {
  std::string payload;
  if (format == qkdsim::OutputFormat::kJson) {
    nlohmann::json out;
    out["schema_version"] = 1;
    out["error"] = message;
    payload = out.dump(2);
    payload.push_back('\n');
  } else {
    payload = "error\n" + message + "\n";
  }
  if (path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (out) out << payload;
}

int run_subcommand(const SubcommandSpec& spec, const CliOptions& options) {
  qkdsim::ScenarioConfig config;
  qkdsim::OutputFormat fallback_format = qkdsim::OutputFormat::kJson;
  std::string fallback_path = options.out_path;
  try {
    nlohmann::json root;
    if (options.config_text.empty()) {
      root = {{"scenario", spec.default_scenario}};
    } else {
      root = qkdsim::load_config_json(options.config_text);
    }
    if (root.is_object()) {
      if (options.seed_set) root["master_seed"] = options.seed;
      if (options.trials_set) root["n_trials"] = options.trials;
      if (!options.format.empty()) root["output"]["format"] = options.format;
      if (options.out_set) root["output"]["path"] = options.out_path;
    }
    config = qkdsim::parse_config(root);
    fallback_format = config.format;
    fallback_path = config.output_path;
    if (options.threads > 0) config.n_threads = options.threads;
    if (!options.sweep.empty())
      config.sweep = qkdsim::parse_sweep_spec(options.sweep);

    bool allowed = false;
    for (Scenario candidate : spec.allowed)
      allowed = allowed || candidate == config.scenario;
    if (!allowed)
      throw qkdsim::ConfigError(
          "config error: scenario: '" + qkdsim::to_string(config.scenario) +
          "' is not runnable under subcommand '" + spec.name + "'");

    const qkdsim::ScenarioReport report = qkdsim::run_scenario(config);
    qkdsim::emit_report(report, config.format, config.output_path);
    std::cerr << "completed " << report.scenario << " in "
              << report.wall_seconds << " s\n";
    return 0;
  } catch (const qkdsim::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const qkdsim::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const qkdsim::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    emit_structured_error(e.what(), fallback_format, fallback_path);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qkdsim: Monte Carlo experiments on intercept-resend, deletion, and "
      "multi-photon attacks against key-distribution channel models"};
  app.require_subcommand(1);

  std::vector<std::pair<const SubcommandSpec*, CliOptions>> invocations;
  invocations.reserve(subcommands().size());
  for (const SubcommandSpec& spec : subcommands()) {
    invocations.emplace_back(&spec, CliOptions{});
    CliOptions& options = invocations.back().second;
    CLI::App* sub = app.add_subcommand(spec.name, spec.description);
    sub->add_option("--config", options.config_text,
                    "Config file path, or inline JSON starting with '{'");
    sub->add_option("--seed", options.seed, "Master seed (64-bit)")
        ->each([&options](const std::string&) { options.seed_set = true; });
    sub->add_option("--trials", options.trials, "Number of trials")
        ->each([&options](const std::string&) { options.trials_set = true; });
    sub->add_option("--out", options.out_path,
                    "Output path (default: stdout)")
        ->each([&options](const std::string&) { options.out_set = true; });
    sub->add_option("--format", options.format, "Output format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--threads", options.threads, "Worker threads")
        ->check(CLI::PositiveNumber);
    sub->add_option("--sweep", options.sweep,
                    "Grid sweep over one numeric parameter: key=lo:hi:step");
  }

  CLI11_PARSE(app, argc, argv);

  for (const auto& [spec, options] : invocations) {
    if (app.got_subcommand(spec->name)) return run_subcommand(*spec, options);
  }
  std::cerr << "no subcommand selected\n";
  return 1;
}
