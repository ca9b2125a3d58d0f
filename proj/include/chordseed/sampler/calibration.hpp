#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chordseed/sampler/rejection.hpp"

namespace chordseed::sampler {

inline constexpr double kDefaultM = 7.64;
inline constexpr double kDefaultPercentile = 0.95;
inline constexpr std::size_t kMinCalibrationRatios = 20;

/// Nearest-rank percentile: the ceil(percentile * n)-th smallest ratio.
/// Throws InsufficientData below 20 ratios and std::invalid_argument for
/// non-finite or non-positive ratios or a percentile outside (0, 1].
double calibrate_m(std::span<const double> ratios, double percentile = kDefaultPercentile);

/// P(x)/Q(x) at the configured temperatures for each candidate.
std::vector<double> probability_ratios(const std::vector<chordlang::Progression>& candidates,
                                       const seqmodel::SequenceModel& p, const seqmodel::SequenceModel& q,
                                       const SamplerConfig& cfg);

struct Calibration {
  double m = kDefaultM;
  double percentile = kDefaultPercentile;
  std::size_t count = 0;

  nlohmann::json to_json() const;
  static Calibration from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static Calibration load(const std::filesystem::path& path);
};

/// M from a calibration artifact when one is given, else the shipped default.
double resolve_m(const std::optional<std::filesystem::path>& calibration_file);

}  // namespace chordseed::sampler
