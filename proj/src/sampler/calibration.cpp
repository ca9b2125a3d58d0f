#include "chordseed/sampler/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "chordseed/common/error.hpp"
#include "chordseed/corpus/corpus.hpp"

namespace chordseed::sampler {

double calibrate_m(std::span<const double> ratios, double percentile) {
  if (!(percentile > 0.0 && percentile <= 1.0)) throw std::invalid_argument("percentile must lie in (0, 1]");
  if (ratios.size() < kMinCalibrationRatios) {
    throw InsufficientData("calibration needs at least " + std::to_string(kMinCalibrationRatios) +
                           " ratios, got " + std::to_string(ratios.size()));
  }
  std::vector<double> sorted(ratios.begin(), ratios.end());
  for (double r : sorted) {
    if (!std::isfinite(r) || !(r > 0.0)) throw std::invalid_argument("ratios must be finite and positive");
  }
  std::sort(sorted.begin(), sorted.end());
  // The epsilon keeps exact products such as 0.95 * 20 from rounding up a rank.
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(percentile * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

std::vector<double> probability_ratios(const std::vector<chordlang::Progression>& candidates,
                                       const seqmodel::SequenceModel& p, const seqmodel::SequenceModel& q,
                                       const SamplerConfig& cfg) {
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const auto& x : candidates) {
    const auto s = score(x, p, q, cfg);
    out.push_back(std::exp(s.log_p - s.log_q));
  }
  return out;
}

nlohmann::json Calibration::to_json() const { return {{"M", m}, {"percentile", percentile}, {"count", count}}; }

Calibration Calibration::from_json(const nlohmann::json& j) {
  Calibration c;
  c.m = j.at("M").get<double>();
  c.percentile = j.value("percentile", kDefaultPercentile);
  c.count = j.value("count", std::size_t{0});
  if (!(c.m > 0.0) || !std::isfinite(c.m)) throw std::invalid_argument("calibrated M must be positive");
  return c;
}

void Calibration::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw corpus::IoError("cannot write calibration file " + path.string());
  out << to_json().dump(2) << '\n';
}

Calibration Calibration::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw corpus::IoError("cannot open calibration file " + path.string());
  return from_json(nlohmann::json::parse(in));
}

double resolve_m(const std::optional<std::filesystem::path>& calibration_file) {
  if (!calibration_file) return kDefaultM;
  return Calibration::load(*calibration_file).m;
}

}  // namespace chordseed::sampler
