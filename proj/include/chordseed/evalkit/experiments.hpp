#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chordseed/corpus/corpus.hpp"
#include "chordseed/evalkit/metrics.hpp"
#include "chordseed/evalkit/report.hpp"
#include "chordseed/llmgate/provider.hpp"
#include "chordseed/sampler/rejection.hpp"
#include "chordseed/seqmodel/model.hpp"

namespace chordseed::evalkit {

/// Individual keywords of a "Label: a, b, c" keyword list, in file order.
std::vector<std::string> keyword_pool(std::string_view keyword_list);

struct DiversityOptions {
  std::size_t pairs = 100;
  std::size_t set_size = 30;
  std::size_t bars = 4;
  std::size_t keywords_per_generation = 3;
  BleuOptions bleu;
  std::uint64_t seed = 0;
  std::string model;
  std::vector<std::string> keywords;  // empty uses the shipped keyword list
};

inline constexpr std::string_view kBatchCondition = "batch";
inline constexpr std::string_view kSingleCondition = "single";

/// Self-BLEU rows for named groups of sets, one value per set.
ExperimentReport self_bleu_report(const std::map<std::string, std::vector<std::vector<TokenSeq>>>& sets,
                                  const BleuOptions& options = {});

/// Per pair: one batch-prompt set (one call asking for set_size progressions)
/// and one single-prompt set (set_size calls), in C major, with a fresh random
/// keyword draw for every LLM call. Rows are "batch" and "single".
ExperimentReport run_diversity_experiment(llmgate::LLMProvider& provider, const DiversityOptions& options);

struct Condition {
  std::string label;
  bool keyword_conditional = false;
  std::vector<TokenSeq> progressions;
};

struct CoherenceOptions {
  std::size_t min_per_condition = 500;
};

/// Unigram and bigram JSD between each condition and the corpus, which is
/// transposed to C first. Throws InsufficientData for an empty corpus or a
/// condition smaller than `min_per_condition`.
ExperimentReport run_coherence_experiment(std::span<const corpus::CorpusRecord> corpus,
                                          std::span<const Condition> conditions,
                                          const CoherenceOptions& options = {});

/// Ancestral samples from a prior at temperature 1.
std::vector<TokenSeq> prior_samples(const seqmodel::SequenceModel& model, std::size_t count, std::size_t bars,
                                    std::mt19937_64& rng);

/// Progressions with every chord drawn uniformly from the non-reserved tokens.
std::vector<TokenSeq> uniform_samples(const corpus::TokenVocab& vocab, std::size_t count, std::size_t bars,
                                      std::mt19937_64& rng);

/// Runs the pool through rejection sampling in groups of cfg.n with the
/// fallback off and keeps every accepted candidate.
std::vector<TokenSeq> rejection_samples(std::span<const chordlang::Progression> pool,
                                        const seqmodel::SequenceModel& p, const seqmodel::SequenceModel& q,
                                        const sampler::SamplerConfig& cfg, std::mt19937_64& rng);

}  // namespace chordseed::evalkit
