#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chordseed/chordlang/progression.hpp"
#include "chordseed/seqmodel/model.hpp"

namespace chordseed::sampler {

enum class SelectionOrder { Ratio, Acceptance };

struct SamplerConfig {
  double m = 7.64;
  std::size_t n = 30;
  double tau = 1.7;
  /// Per-model overrides of `tau`.
  std::optional<double> tau_p;
  std::optional<double> tau_q;
  std::size_t target_count = 4;
  /// Fill with the best-ratio rejected candidates when too few are accepted.
  bool fallback = true;
  SelectionOrder order = SelectionOrder::Ratio;

  double p_temperature() const { return tau_p.value_or(tau); }
  double q_temperature() const { return tau_q.value_or(tau); }

  /// Throws std::invalid_argument unless m > 0, taus > 0, target_count >= 1 and n >= target_count.
  void validate() const;

  nlohmann::json to_json() const;
  /// Missing fields keep their defaults.
  static SamplerConfig from_json(const nlohmann::json& j);
  static SamplerConfig load(const std::filesystem::path& path);
};

enum class Provenance { Accepted, TopkFill };
std::string_view provenance_name(Provenance p);

struct AcceptanceRecord {
  chordlang::Progression candidate;
  double log_p = 0.0;
  double log_q = 0.0;
  double ratio = 0.0;
  double u = 0.0;
  bool accepted = false;
  /// Another candidate in the same pool renders identically.
  bool duplicate = false;
  std::optional<Provenance> selected;

  nlohmann::json to_json() const;
};

struct SuggestionSet {
  std::vector<chordlang::Progression> suggestions;
  std::vector<Provenance> provenance;
  std::vector<double> ratios;
  /// One record per candidate, in input order.
  std::vector<AcceptanceRecord> audit;
  std::vector<std::string> warnings;

  std::size_t accepted_count() const;
};

struct ScoredCandidate {
  chordlang::Progression candidate;
  double log_p = 0.0;
  double log_q = 0.0;
};

/// min(1, P(x) / (M Q(x))) from log-scores, computed as exp(log_p - log_q) / M so
/// that scaling M scales every unclamped ratio exactly. A candidate P rules out
/// gets 0; one Q rules out but P allows gets 1.
double acceptance_ratio(double log_p, double log_q, double m);

/// Scores `x` under both models at the configured temperatures.
/// Throws VocabMismatch if the two models do not share a vocabulary.
ScoredCandidate score(const chordlang::Progression& x, const seqmodel::SequenceModel& p,
                      const seqmodel::SequenceModel& q, const SamplerConfig& cfg);
double acceptance_ratio(const chordlang::Progression& x, const seqmodel::SequenceModel& p,
                        const seqmodel::SequenceModel& q, const SamplerConfig& cfg);

/// One uniform draw per candidate in input order; accepted iff u < ratio.
/// Surplus acceptances are cut to the target_count best by ratio; a shortfall
/// is filled from the rejected candidates ranked by ratio (stable on ties).
SuggestionSet run_rejection(const std::vector<ScoredCandidate>& candidates, const SamplerConfig& cfg,
                            std::mt19937_64& rng);
SuggestionSet run_rejection(const std::vector<chordlang::Progression>& candidates,
                            const seqmodel::SequenceModel& p, const seqmodel::SequenceModel& q,
                            const SamplerConfig& cfg, std::mt19937_64& rng);

}  // namespace chordseed::sampler
