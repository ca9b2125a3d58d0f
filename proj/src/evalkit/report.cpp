#include "chordseed/evalkit/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "chordseed/common/error.hpp"

namespace chordseed::evalkit {

MetricSummary MetricSummary::of(std::span<const double> values) {
  MetricSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

MetricSummary ReportRow::summary(const std::string& metric) const {
  const auto it = values.find(metric);
  if (it == values.end()) return {};
  return MetricSummary::of(it->second);
}

const ReportRow& ExperimentReport::row(const std::string& condition) const {
  for (const auto& r : rows) {
    if (r.condition == condition) return r;
  }
  throw std::out_of_range("no report row for condition " + condition);
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json out;
  out["experiment"] = experiment;
  out["attribute_columns"] = attribute_columns;
  out["metric_columns"] = metric_columns;
  out["config"] = config;
  out["seeds"] = seeds;
  out["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row;
    row["condition"] = r.condition;
    row["attributes"] = r.attributes;
    row["metrics"] = nlohmann::json::object();
    for (const auto& [name, vals] : r.values) {
      const auto s = MetricSummary::of(vals);
      row["metrics"][name] = {{"mean", s.mean}, {"std", s.std}, {"count", s.count}, {"values", vals}};
    }
    out["rows"].push_back(std::move(row));
  }
  return out;
}

ExperimentReport ExperimentReport::from_json(const nlohmann::json& j) {
  ExperimentReport r;
  try {
    r.experiment = j.at("experiment").get<std::string>();
    r.attribute_columns = j.value("attribute_columns", std::vector<std::string>{});
    r.metric_columns = j.at("metric_columns").get<std::vector<std::string>>();
    r.config = j.value("config", nlohmann::json::object());
    r.seeds = j.value("seeds", std::vector<std::uint64_t>{});
    for (const auto& jr : j.at("rows")) {
      ReportRow row;
      row.condition = jr.at("condition").get<std::string>();
      row.attributes = jr.value("attributes", std::map<std::string, std::string>{});
      for (const auto& [name, m] : jr.at("metrics").items()) {
        row.values[name] = m.at("values").get<std::vector<double>>();
      }
      r.rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed experiment report: ") + e.what());
  }
  return r;
}

std::string ExperimentReport::to_markdown() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "| Method |";
  for (const auto& a : attribute_columns) out << ' ' << a << " |";
  for (const auto& m : metric_columns) out << ' ' << m << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < attribute_columns.size() + metric_columns.size(); ++i) out << "---|";
  out << '\n';
  for (const auto& r : rows) {
    out << "| " << r.condition << " |";
    for (const auto& a : attribute_columns) {
      const auto it = r.attributes.find(a);
      out << ' ' << (it == r.attributes.end() ? "" : it->second) << " |";
    }
    for (const auto& m : metric_columns) {
      const auto s = r.summary(m);
      if (s.count == 0) {
        out << "  |";
      } else if (s.count == 1) {
        out << ' ' << s.mean << " |";
      } else {
        out << ' ' << s.mean << "±" << s.std << " |";
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "condition,metric,index,value\n";
  for (const auto& r : rows) {
    for (const auto& m : metric_columns) {
      const auto it = r.values.find(m);
      if (it == r.values.end()) continue;
      for (std::size_t i = 0; i < it->second.size(); ++i) {
        out << r.condition << ',' << m << ',' << i << ',' << it->second[i] << '\n';
      }
    }
  }
  return out.str();
}

void ExperimentReport::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  const auto put = [&](const std::string& ext, const std::string& text) {
    const auto path = dir / (experiment + ext);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
  };
  put(".json", to_json().dump(2) + "\n");
  put(".md", to_markdown());
  put(".csv", to_csv());
}

}  // namespace chordseed::evalkit
