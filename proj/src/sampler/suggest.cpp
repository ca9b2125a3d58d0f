#include "chordseed/sampler/suggest.hpp"

namespace chordseed::sampler {

ScoredCandidate score_in_c(const chordlang::Progression& x, const seqmodel::SequenceModel& p,
                           const seqmodel::SequenceModel& q, const SamplerConfig& cfg) {
  auto scored = score(chordlang::transpose_progression(x, chordlang::Key{}), p, q, cfg);
  scored.candidate = x;
  return scored;
}

SuggestionResult generate_suggestions(const std::vector<std::string>& keywords, const chordlang::Key& key,
                                      chordlang::Mode mode, std::size_t bars, const SuggestDeps& deps) {
  deps.config.validate();
  llmgate::CandidateRequest req;
  req.keywords = keywords;
  req.key = key;
  req.mode = mode;
  req.bars = bars;
  req.n = deps.config.n;
  req.model = deps.model;
  auto batch = llmgate::generate_candidates_batch(req, deps.llm);

  std::vector<ScoredCandidate> scored;
  scored.reserve(batch.progressions.size());
  for (const auto& x : batch.progressions) scored.push_back(score_in_c(x, deps.p, deps.q, deps.config));

  SuggestionResult out;
  out.set = run_rejection(scored, deps.config, deps.rng);
  for (const auto& d : batch.dropped) {
    out.set.warnings.push_back("dropped line " + std::to_string(d.line) + ": " + d.reason);
  }
  out.dropped = std::move(batch.dropped);
  out.llm_attempts = batch.attempts;
  return out;
}

}  // namespace chordseed::sampler
