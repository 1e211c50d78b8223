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

#include "qkdsim/report.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qkdsim/error.h"

namespace qkdsim {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                    std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

namespace {

std::string hash_hex(std::uint64_t hash) {
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << hash;
  return out.str();
}

}  // namespace

nlohmann::json report_to_json(const ScenarioReport& report) {
  nlohmann::json out;
  out["schema_version"] = 1;
  out["scenario"] = report.scenario;
  out["config"] = report.config_echo;
  out["config_hash"] = hash_hex(report.config_hash);
  out["n_trials"] = report.n_trials;
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [name, metric] : report.metrics) {
    nlohmann::json entry;
    entry["mean"] = metric.mean;
    entry["variance"] = metric.variance;
    entry["ci95_lo"] = metric.ci_lo;
    entry["ci95_hi"] = metric.ci_hi;
    entry["n"] = metric.n;
    if (metric.analytic_ref.has_value()) {
      entry["analytic_ref"] = *metric.analytic_ref;
      entry["sigmas_off"] = metric.sigmas_off.value_or(0.0);
    }
    metrics[name] = entry;
  }
  out["metrics"] = metrics;
  out["derived"] = report.derived;
  if (!report.notes.empty()) out["notes"] = report.notes;
  out["caveats"] = report.caveats;
  if (report.sweep.has_value()) {
    nlohmann::json sweep;
    sweep["columns"] = report.sweep->columns;
    sweep["rows"] = report.sweep->rows;
    out["sweep"] = sweep;
  }
  return out;
}

std::string report_to_csv(const ScenarioReport& report) {
  std::ostringstream out;
  if (report.sweep.has_value()) {
    const SweepTable& table = *report.sweep;
    for (std::size_t i = 0; i < table.columns.size(); ++i)
      out << (i ? "," : "") << table.columns[i];
    out << "\n";
    for (const std::vector<double>& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i)
        out << (i ? "," : "") << format_double(row[i]);
      out << "\n";
    }
    return out.str();
  }
  out << "name,mean,var,ci_lo,ci_hi,n,analytic_ref,sigmas_off\n";
  for (const auto& [name, metric] : report.metrics) {
    out << name << "," << format_double(metric.mean) << ","
        << format_double(metric.variance) << "," << format_double(metric.ci_lo)
        << "," << format_double(metric.ci_hi) << "," << metric.n << ",";
    if (metric.analytic_ref.has_value())
      out << format_double(*metric.analytic_ref);
    out << ",";
    if (metric.sigmas_off.has_value()) out << format_double(*metric.sigmas_off);
    out << "\n";
  }
  for (const auto& [name, value] : report.derived) {
    out << name << "," << format_double(value) << ",,,,0,,\n";
  }
  return out.str();
}

void emit_report(const ScenarioReport& report, OutputFormat format,
                 const std::string& path) {
  std::string payload;
  if (format == OutputFormat::kJson) {
    payload = report_to_json(report).dump(2);
    payload.push_back('\n');
  } else {
    payload = report_to_csv(report);
  }
  if (path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ScenarioError("cannot open output destination '" + path + "'");
  out << payload;
  if (!out) throw ScenarioError("failed writing report to '" + path + "'");
}

}  // namespace qkdsim
