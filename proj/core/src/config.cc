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

#include "qkdsim/config.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "qkdsim/rng.h"

namespace qkdsim {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string param_path(const char* key) {
  return std::string("parameters.") + key;
}

struct ParamSpec {
  enum class Kind { kNumber, kInteger, kBoolean, kString, kArray };

  const char* key;
  Kind kind;
  json def;
  double lo = -kInf;
  double hi = kInf;
  bool lo_open = false;
  bool hi_open = false;
  const char* range_text = nullptr;
  std::vector<const char*> allowed = {};
  bool nullable = false;
};

void check_range(const ParamSpec& spec, double value) {
  const bool below = spec.lo_open ? value <= spec.lo : value < spec.lo;
  const bool above = spec.hi_open ? value >= spec.hi : value > spec.hi;
  if (below || above) {
    std::ostringstream message;
    message << "config error: " << param_path(spec.key) << ": value " << value
            << " outside required range " << (spec.range_text ? spec.range_text : "");
    throw ConfigError(message.str());
  }
}

json validate_one(const ParamSpec& spec, const json& given) {
  if (given.is_null()) {
    if (spec.nullable) return given;
    throw ConfigError("config error: " + param_path(spec.key) +
                      ": null is not allowed");
  }
  switch (spec.kind) {
    case ParamSpec::Kind::kNumber: {
      if (!given.is_number())
        throw ConfigError("config error: " + param_path(spec.key) +
                          ": expected a number");
      check_range(spec, given.get<double>());
      return given;
    }
    case ParamSpec::Kind::kInteger: {
      if (!given.is_number_integer() && !given.is_number_unsigned())
        throw ConfigError("config error: " + param_path(spec.key) +
                          ": expected an integer");
      check_range(spec, given.get<double>());
      return given;
    }
    case ParamSpec::Kind::kBoolean: {
      if (!given.is_boolean())
        throw ConfigError("config error: " + param_path(spec.key) +
                          ": expected a boolean");
      return given;
    }
    case ParamSpec::Kind::kString: {
      if (!given.is_string())
        throw ConfigError("config error: " + param_path(spec.key) +
                          ": expected a string");
      if (!spec.allowed.empty()) {
        const auto value = given.get<std::string>();
        for (const char* candidate : spec.allowed)
          if (value == candidate) return given;
        std::ostringstream message;
        message << "config error: " << param_path(spec.key) << ": '" << value
                << "' is not one of {";
        for (std::size_t i = 0; i < spec.allowed.size(); ++i)
          message << (i ? "," : "") << spec.allowed[i];
        message << "}";
        throw ConfigError(message.str());
      }
      return given;
    }
    case ParamSpec::Kind::kArray: {
      if (!given.is_array())
        throw ConfigError("config error: " + param_path(spec.key) +
                          ": expected an array");
      return given;
    }
  }
  throw ConfigError("config error: unhandled parameter kind");
}

std::vector<ParamSpec> cv_common_specs() {
  return {
      {"T", ParamSpec::Kind::kNumber, json(0.1), 0.0, 1.0, true, false,
       "(0,1]"},
      {"V", ParamSpec::Kind::kNumber, json(25.0), 0.0, kInf, true, false,
       "(0,inf)"},
      {"var_n_a", ParamSpec::Kind::kNumber, json(), 0.0, kInf, false, false,
       "[0,inf) or null for 0.01*V", {}, true},
      {"var_n_b", ParamSpec::Kind::kNumber, json(1.0), 0.0, kInf, false,
       false, "[0,inf)"},
      {"var_n_e", ParamSpec::Kind::kNumber, json(1.0), 0.0, kInf, false,
       false, "[0,inf)"},
      {"var_n_e_het", ParamSpec::Kind::kNumber, json(2.0), 0.0, kInf, false,
       false, "[0,inf)"},
      {"delta_t", ParamSpec::Kind::kNumber, json(0.0), 0.0, kInf, false,
       false, "[0,inf)"},
  };
}

std::vector<ParamSpec> specs_for(Scenario scenario) {
  switch (scenario) {
    case Scenario::kCvPassive:
    case Scenario::kCvHeterodyneResend:
      return cv_common_specs();
    case Scenario::kCvExcessNoiseTest: {
      auto specs = cv_common_specs();
      specs[6].def = json(0.02);  // delta_t
      specs.push_back({"n_pulses", ParamSpec::Kind::kInteger, json(1000),
                       100.0, 1e12, false, false, "[100,1e12]"});
      specs.push_back({"alpha", ParamSpec::Kind::kNumber, json(0.05), 0.0,
                       1.0, true, true, "(0,1)"});
      specs.push_back({"n_calibration", ParamSpec::Kind::kInteger, json(2000),
                       100.0, 1e9, false, false, "[100,1e9]"});
      return specs;
    }
    case Scenario::kBb84Prs:
      return {
          {"n_sent", ParamSpec::Kind::kInteger, json(400000), 1.0, 1e12,
           false, false, "[1,1e12]"},
          {"eta", ParamSpec::Kind::kNumber, json(0.1), 0.0, 1.0, true, false,
           "(0,1]"},
          {"attack_fraction", ParamSpec::Kind::kNumber, json(0.08), 0.0, 1.0,
           false, false, "[0,1]"},
          {"attack_basis", ParamSpec::Kind::kString, json("breidbart"), 0, 0,
           false, false, nullptr, {"z", "x", "breidbart", "custom"}},
          {"attack_angle", ParamSpec::Kind::kNumber, json(0.0), 0.0, 3.2,
           false, false, "[0,pi]"},
          {"deletion_policy", ParamSpec::Kind::kString, json("delete_bit_one"),
           0, 0, false, false, nullptr,
           {"none", "delete_bit_one", "delete_low_confidence"}},
          {"confidence_threshold", ParamSpec::Kind::kNumber, json(0.85), 0.5,
           1.0, false, false, "[0.5,1]"},
          {"check_fraction", ParamSpec::Kind::kNumber, json(0.1), 0.0, 1.0,
           false, false, "[0,1]"},
          {"qber_threshold", ParamSpec::Kind::kNumber, json(0.11), 0.0, 1.0,
           false, false, "[0,1]"},
          {"intrinsic_error", ParamSpec::Kind::kNumber, json(0.0), 0.0, 0.5,
           false, false, "[0,0.5]"},
          {"match_throughput", ParamSpec::Kind::kBoolean, json(false)},
      };
    case Scenario::kDecoyPns:
      return {
          {"levels", ParamSpec::Kind::kArray,
           json::parse(R"([{"s":0.5,"probability":0.5},
                           {"s":0.1,"probability":0.25},
                           {"s":0.0,"probability":0.25}])")},
          {"signal_index", ParamSpec::Kind::kInteger, json(0), 0.0, 1e3,
           false, false, "[0,1000]"},
          {"eta", ParamSpec::Kind::kNumber, json(0.25), 0.0, 1.0, true, false,
           "(0,1]"},
          {"n_pulses", ParamSpec::Kind::kInteger, json(100000), 100.0, 1e12,
           false, false, "[100,1e12]"},
          {"attack", ParamSpec::Kind::kString, json("pns"), 0, 0, false,
           false, nullptr, {"none", "pns"}},
          {"attack_prob", ParamSpec::Kind::kNumber, json(1.0), 0.0, 1.0,
           false, false, "[0,1]"},
          {"block_single_prob", ParamSpec::Kind::kNumber, json(-1.0), -1.0,
           1.0, false, false, "[-1,1] (negative: match total rate)"},
          {"tolerance_sigmas", ParamSpec::Kind::kNumber, json(5.0), 0.0, kInf,
           true, false, "(0,inf)"},
      };
    case Scenario::kDecoyCbs:
      return {
          {"kappa", ParamSpec::Kind::kNumber, json(0.9), 0.0, 1.0, false,
           false, "[0,1]"},
          {"s_a", ParamSpec::Kind::kNumber, json(1.0), 0.0, kInf, false,
           false, "[0,inf)"},
          {"s_b", ParamSpec::Kind::kNumber, json(0.0), 0.0, kInf, false,
           false, "[0,inf)"},
          {"prior_a", ParamSpec::Kind::kNumber, json(0.5), 0.0, 1.0, true,
           true, "(0,1)"},
      };
    case Scenario::kKeyRateSweep:
      return {
          {"qber_lo", ParamSpec::Kind::kNumber, json(0.0), 0.0, 0.5, false,
           false, "[0,0.5]"},
          {"qber_hi", ParamSpec::Kind::kNumber, json(0.25), 0.0, 0.5, false,
           false, "[0,0.5]"},
          {"qber_step", ParamSpec::Kind::kNumber, json(0.01), 0.0, 0.5, true,
           false, "(0,0.5]"},
          {"f_factor", ParamSpec::Kind::kNumber, json(1.2), 0.0, 10.0, true,
           false, "(0,10]"},
          {"n_bits", ParamSpec::Kind::kNumber, json(10000.0), 2.0, kInf,
           false, false, "[2,inf)"},
          {"lambda", ParamSpec::Kind::kNumber, json(0.01), 0.0, 1.0, true,
           false, "(0,1]"},
          {"n_total", ParamSpec::Kind::kInteger, json(1000), 2.0, 1e12, false,
           false, "[2,1e12]"},
          {"n_checked", ParamSpec::Kind::kInteger, json(200), 1.0, 1e12,
           false, false, "[1,1e12]"},
          {"delta", ParamSpec::Kind::kNumber, json(0.05), 0.0, 1.0, true,
           true, "(0,1)"},
      };
    case Scenario::kDeletionOptimizer:
      return {
          {"ensemble", ParamSpec::Kind::kString, json("bb84"), 0, 0, false,
           false, nullptr, {"bb84", "custom"}},
          {"custom_states", ParamSpec::Kind::kArray, json::array()},
          {"deletion_budget", ParamSpec::Kind::kNumber, json(0.0), 0.0, 1.0,
           false, true, "[0,1)"},
          {"budgets", ParamSpec::Kind::kArray, json::array()},
          {"basis_grid", ParamSpec::Kind::kInteger, json(720), 1.0, 1e6,
           false, false, "[1,1e6]"},
          {"threshold_grid", ParamSpec::Kind::kInteger, json(100), 1.0, 1e6,
           false, false, "[1,1e6]"},
      };
  }
  throw ConfigError("config error: unknown scenario");
}

std::int64_t min_trials_for(Scenario scenario) {
  switch (scenario) {
    case Scenario::kCvPassive:
    case Scenario::kCvHeterodyneResend:
      return 1000;
    case Scenario::kCvExcessNoiseTest:
      return 10;
    default:
      return 1;
  }
}

std::int64_t default_trials_for(Scenario scenario) {
  switch (scenario) {
    case Scenario::kCvPassive:
    case Scenario::kCvHeterodyneResend:
      return 100000;
    case Scenario::kCvExcessNoiseTest:
      return 2000;
    case Scenario::kBb84Prs:
      return 25;
    case Scenario::kDecoyPns:
      return 100;
    case Scenario::kDecoyCbs:
      return 1000000;
    case Scenario::kKeyRateSweep:
    case Scenario::kDeletionOptimizer:
      return 1;
  }
  return 1;
}

void validate_object_keys(const json& object, const char* where,
                          const std::vector<const char*>& allowed) {
  for (const auto& item : object.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) known = true;
    if (!known)
      throw ConfigError(std::string("config error: unknown key '") +
                        item.key() + "' in " + where);
  }
}

void cross_validate(Scenario scenario, json& params) {
  if (scenario == Scenario::kCvPassive ||
      scenario == Scenario::kCvHeterodyneResend ||
      scenario == Scenario::kCvExcessNoiseTest) {
    if (params["var_n_a"].is_null())
      params["var_n_a"] = 0.01 * params["V"].get<double>();
    const double t = params["T"].get<double>();
    const double dt = params["delta_t"].get<double>();
    if (!(t - dt > 0.0))
      throw ConfigError(
          "config error: parameters.delta_t: T - delta_t must stay in (0,1]; "
          "required range [0,T)");
  }
  if (scenario == Scenario::kDecoyPns) {
    const json& levels = params["levels"];
    if (levels.size() < 2)
      throw ConfigError(
          "config error: parameters.levels: at least 2 levels required");
    double total = 0.0;
    for (const json& level : levels) {
      if (!level.is_object())
        throw ConfigError(
            "config error: parameters.levels: entries must be objects");
      validate_object_keys(level, "parameters.levels[]", {"s", "probability"});
      if (!level.contains("s") || !level.contains("probability") ||
          !level["s"].is_number() || !level["probability"].is_number())
        throw ConfigError(
            "config error: parameters.levels: entries need numeric 's' and "
            "'probability'");
      if (!(level["s"].get<double>() >= 0.0))
        throw ConfigError(
            "config error: parameters.levels[].s: value outside required "
            "range [0,inf)");
      const double p = level["probability"].get<double>();
      if (!(p >= 0.0 && p <= 1.0))
        throw ConfigError(
            "config error: parameters.levels[].probability: value outside "
            "required range [0,1]");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw ConfigError(
          "config error: parameters.levels: probabilities must sum to 1");
    const auto signal = params["signal_index"].get<std::int64_t>();
    if (signal < 0 || signal >= static_cast<std::int64_t>(levels.size()))
      throw ConfigError(
          "config error: parameters.signal_index: value outside required "
          "range [0,#levels)");
  }
  if (scenario == Scenario::kKeyRateSweep) {
    if (params["qber_lo"].get<double>() > params["qber_hi"].get<double>())
      throw ConfigError(
          "config error: parameters.qber_hi: must be >= qber_lo");
    if (params["n_checked"].get<std::int64_t>() >=
        params["n_total"].get<std::int64_t>())
      throw ConfigError(
          "config error: parameters.n_checked: must be < n_total");
  }
  if (scenario == Scenario::kDeletionOptimizer) {
    const bool custom = params["ensemble"].get<std::string>() == "custom";
    const json& states = params["custom_states"];
    if (custom && states.empty())
      throw ConfigError(
          "config error: parameters.custom_states: required when ensemble is "
          "'custom'");
    double prior_total = 0.0;
    for (const json& state : states) {
      if (!state.is_object())
        throw ConfigError(
            "config error: parameters.custom_states: entries must be objects");
      validate_object_keys(state, "parameters.custom_states[]",
                           {"angle", "prior", "bit"});
      if (!state.contains("angle") || !state.contains("prior") ||
          !state.contains("bit"))
        throw ConfigError(
            "config error: parameters.custom_states: entries need 'angle', "
            "'prior', 'bit'");
      const double prior = state["prior"].get<double>();
      if (!(prior >= 0.0 && prior <= 1.0))
        throw ConfigError(
            "config error: parameters.custom_states[].prior: value outside "
            "required range [0,1]");
      const auto bit = state["bit"].get<std::int64_t>();
      if (bit != 0 && bit != 1)
        throw ConfigError(
            "config error: parameters.custom_states[].bit: must be 0 or 1");
      prior_total += prior;
    }
    if (custom && std::abs(prior_total - 1.0) > 1e-9)
      throw ConfigError(
          "config error: parameters.custom_states: priors must sum to 1");
    for (const json& budget : params["budgets"]) {
      if (!budget.is_number() || !(budget.get<double>() >= 0.0) ||
          !(budget.get<double>() < 1.0))
        throw ConfigError(
            "config error: parameters.budgets: entries must be numbers in "
            "[0,1)");
    }
  }
}

json validate_parameters(Scenario scenario, const json& given) {
  if (!given.is_object() && !given.is_null())
    throw ConfigError("config error: parameters must be an object");
  const std::vector<ParamSpec> specs = specs_for(scenario);
  if (given.is_object()) {
    for (const auto& item : given.items()) {
      bool known = false;
      for (const ParamSpec& spec : specs)
        if (item.key() == spec.key) known = true;
      if (!known)
        throw ConfigError("config error: unknown parameter '" + item.key() +
                          "' for scenario '" + to_string(scenario) + "'");
    }
  }
  json out = json::object();
  for (const ParamSpec& spec : specs) {
    if (given.is_object() && given.contains(spec.key)) {
      out[spec.key] = validate_one(spec, given.at(spec.key));
    } else {
      out[spec.key] = spec.def;
    }
  }
  cross_validate(scenario, out);
  return out;
}

}  // namespace

std::string to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::kCvPassive:
      return "cv_passive";
    case Scenario::kCvHeterodyneResend:
      return "cv_heterodyne_resend";
    case Scenario::kCvExcessNoiseTest:
      return "cv_excess_noise_test";
    case Scenario::kBb84Prs:
      return "bb84_prs";
    case Scenario::kDecoyPns:
      return "decoy_pns";
    case Scenario::kDecoyCbs:
      return "decoy_cbs";
    case Scenario::kKeyRateSweep:
      return "key_rate_sweep";
    case Scenario::kDeletionOptimizer:
      return "deletion_optimizer";
  }
  return "unknown";
}

Scenario scenario_from_string(const std::string& name) {
  if (name == "cv_passive") return Scenario::kCvPassive;
  if (name == "cv_heterodyne_resend") return Scenario::kCvHeterodyneResend;
  if (name == "cv_excess_noise_test") return Scenario::kCvExcessNoiseTest;
  if (name == "bb84_prs") return Scenario::kBb84Prs;
  if (name == "decoy_pns") return Scenario::kDecoyPns;
  if (name == "decoy_cbs") return Scenario::kDecoyCbs;
  if (name == "key_rate_sweep") return Scenario::kKeyRateSweep;
  if (name == "deletion_optimizer") return Scenario::kDeletionOptimizer;
  throw ConfigError("config error: scenario: unknown scenario '" + name +
                    "'");
}

std::string to_string(OutputFormat format) {
  return format == OutputFormat::kJson ? "json" : "csv";
}

OutputFormat output_format_from_string(const std::string& name) {
  if (name == "json") return OutputFormat::kJson;
  if (name == "csv") return OutputFormat::kCsv;
  throw ConfigError("config error: output.format: must be 'json' or 'csv'");
}

std::size_t SweepSpec::point_count() const {
  if (!active) return 0;
  return static_cast<std::size_t>(
             std::floor((hi - lo) / step + 1e-9)) +
         1;
}

double SweepSpec::point(std::size_t i) const {
  return lo + step * static_cast<double>(i);
}

SweepSpec parse_sweep_spec(const std::string& text) {
  SweepSpec spec;
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("config error: sweep: expected key=lo:hi:step");
  spec.key = text.substr(0, eq);
  const std::string rest = text.substr(eq + 1);
  const auto c1 = rest.find(':');
  const auto c2 = rest.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw ConfigError("config error: sweep: expected key=lo:hi:step");
  try {
    spec.lo = std::stod(rest.substr(0, c1));
    spec.hi = std::stod(rest.substr(c1 + 1, c2 - c1 - 1));
    spec.step = std::stod(rest.substr(c2 + 1));
  } catch (const std::exception&) {
    throw ConfigError("config error: sweep: lo, hi, step must be numbers");
  }
  if (!(spec.step > 0.0) || spec.hi < spec.lo)
    throw ConfigError("config error: sweep: need step > 0 and hi >= lo");
  spec.active = true;
  return spec;
}

nlohmann::json ScenarioConfig::semantic_json() const {
  json out;
  out["schema_version"] = schema_version;
  out["scenario"] = to_string(scenario);
  out["master_seed"] = master_seed;
  out["n_trials"] = n_trials;
  out["parameters"] = parameters;
  if (sweep.active) {
    out["sweep"] = {{"key", sweep.key},
                    {"lo", sweep.lo},
                    {"hi", sweep.hi},
                    {"step", sweep.step}};
  }
  return out;
}

std::uint64_t ScenarioConfig::config_hash() const {
  return fnv1a64(semantic_json().dump());
}

ScenarioConfig parse_config(const nlohmann::json& root) {
  if (!root.is_object())
    throw ConfigError("config error: top level must be a JSON object");
  validate_object_keys(root, "config",
                       {"schema_version", "scenario", "master_seed",
                        "n_trials", "parameters", "output"});
  ScenarioConfig config;
  if (root.contains("schema_version")) {
    if (!root["schema_version"].is_number_integer() &&
        !root["schema_version"].is_number_unsigned())
      throw ConfigError("config error: schema_version: expected an integer");
    config.schema_version = root["schema_version"].get<int>();
  }
  if (config.schema_version != 1)
    throw ConfigError("config error: schema_version: only version 1 is "
                      "supported");
  if (!root.contains("scenario"))
    throw ConfigError("config error: scenario: missing required key");
  if (!root["scenario"].is_string())
    throw ConfigError("config error: scenario: expected a string");
  config.scenario = scenario_from_string(root["scenario"].get<std::string>());

  if (root.contains("master_seed")) {
    const json& seed = root["master_seed"];
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() &&
                                        seed.get<std::int64_t>() >= 0))
      throw ConfigError(
          "config error: master_seed: expected a non-negative integer");
    config.master_seed = seed.get<std::uint64_t>();
  }

  config.n_trials = default_trials_for(config.scenario);
  if (root.contains("n_trials")) {
    const json& trials = root["n_trials"];
    if (!trials.is_number_integer() && !trials.is_number_unsigned())
      throw ConfigError("config error: n_trials: expected an integer");
    config.n_trials = trials.get<std::int64_t>();
  }
  const std::int64_t min_trials = min_trials_for(config.scenario);
  if (config.n_trials < min_trials) {
    std::ostringstream message;
    message << "config error: n_trials: value " << config.n_trials
            << " outside required range [" << min_trials << ",inf) for "
            << to_string(config.scenario);
    throw ConfigError(message.str());
  }

  config.parameters = validate_parameters(
      config.scenario,
      root.contains("parameters") ? root["parameters"] : json());

  if (root.contains("output")) {
    const json& output = root["output"];
    if (!output.is_object())
      throw ConfigError("config error: output: expected an object");
    validate_object_keys(output, "output", {"format", "path"});
    if (output.contains("format")) {
      if (!output["format"].is_string())
        throw ConfigError("config error: output.format: expected a string");
      config.format =
          output_format_from_string(output["format"].get<std::string>());
    }
    if (output.contains("path")) {
      if (!output["path"].is_string())
        throw ConfigError("config error: output.path: expected a string");
      config.output_path = output["path"].get<std::string>();
    }
  }
  return config;
}

nlohmann::json load_config_json(const std::string& path_or_inline) {
  std::string text;
  if (!path_or_inline.empty() && path_or_inline.front() == '{') {
    text = path_or_inline;
  } else {
    std::ifstream in(path_or_inline);
    if (!in)
      throw ConfigError("config error: cannot open config file '" +
                        path_or_inline + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    text = buffer.str();
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config error: invalid JSON: ") + e.what());
  }
}

ScenarioConfig load_config(const std::string& path_or_inline) {
  return parse_config(load_config_json(path_or_inline));
}

void revalidate_parameters(ScenarioConfig& config) {
  config.parameters = validate_parameters(config.scenario, config.parameters);
}

}  // namespace qkdsim
