#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace chordseed::evalkit {

/// Mean and sample standard deviation (0 for a single value).
struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;

  static MetricSummary of(std::span<const double> values);
};

struct ReportRow {
  std::string condition;
  std::map<std::string, std::string> attributes;
  std::map<std::string, std::vector<double>> values;

  MetricSummary summary(const std::string& metric) const;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<std::string> attribute_columns;
  std::vector<std::string> metric_columns;
  std::vector<ReportRow> rows;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::uint64_t> seeds;

  const ReportRow& row(const std::string& condition) const;

  nlohmann::json to_json() const;
  static ExperimentReport from_json(const nlohmann::json& j);
  /// One line per condition, metrics shown as mean±std (2 decimals) or as a
  /// bare value when the row holds a single measurement.
  std::string to_markdown() const;
  /// Long format: condition,metric,index,value.
  std::string to_csv() const;
  /// Writes <experiment>.json, .md and .csv under `dir`.
  void write(const std::filesystem::path& dir) const;
};

}  // namespace chordseed::evalkit
