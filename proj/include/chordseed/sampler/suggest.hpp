#pragma once

#include <random>
#include <string>
#include <vector>

#include "chordseed/llmgate/candidates.hpp"
#include "chordseed/llmgate/provider.hpp"
#include "chordseed/sampler/rejection.hpp"

namespace chordseed::sampler {

struct SuggestDeps {
  llmgate::LLMProvider& llm;
  const seqmodel::SequenceModel& p;
  const seqmodel::SequenceModel& q;
  SamplerConfig config;
  std::mt19937_64& rng;
  std::string model;  // LLM model override; empty uses the provider's
};

struct SuggestionResult {
  SuggestionSet set;
  std::vector<llmgate::DroppedLine> dropped;
  int llm_attempts = 0;
};

/// Candidates scored in C, the key the priors were trained in.
ScoredCandidate score_in_c(const chordlang::Progression& x, const seqmodel::SequenceModel& p,
                           const seqmodel::SequenceModel& q, const SamplerConfig& cfg);

/// Requests N candidates with the diverse batch prompt and runs rejection
/// sampling over the valid ones. Suggestions keep the requested key.
SuggestionResult generate_suggestions(const std::vector<std::string>& keywords, const chordlang::Key& key,
                                      chordlang::Mode mode, std::size_t bars, const SuggestDeps& deps);

}  // namespace chordseed::sampler
