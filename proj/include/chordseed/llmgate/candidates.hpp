#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "chordseed/chordlang/progression.hpp"
#include "chordseed/llmgate/provider.hpp"

namespace chordseed::llmgate {

struct DroppedLine {
  std::size_t line = 0;  // 1-based within the response
  std::string text;
  std::string reason;
};

struct ParsedResponse {
  std::vector<chordlang::Progression> progressions;
  std::vector<DroppedLine> dropped;
};

/// Splits on newlines and on the two-character sequence "\n", which the
/// prompt examples use as a separator. Blank lines are skipped; lines that
/// fail to parse or do not hold exactly `bars` chords are dropped.
ParsedResponse parse_candidate_lines(std::string_view response, const chordlang::Key& key, chordlang::Mode mode,
                                     std::size_t bars);

struct CandidateRequest {
  std::vector<std::string> keywords;
  chordlang::Key key{};
  chordlang::Mode mode = chordlang::Mode::Maj;
  std::size_t bars = 4;
  std::size_t n = 30;
  std::string model;
};

struct BatchResult {
  std::vector<chordlang::Progression> progressions;
  std::vector<DroppedLine> dropped;
  int attempts = 0;
};

/// One diverse-batch prompt. Retries once with the same prompt when fewer than
/// ceil(0.8 n) lines are valid and keeps the better attempt; at most n are kept.
/// Throws InvalidInput for a bad request, EmptyResponse or
/// AllCandidatesMalformed, and propagates UpstreamLLMError.
BatchResult generate_candidates_batch(const CandidateRequest& request, LLMProvider& provider);

/// One single-progression prompt; the first valid line wins, with one retry.
chordlang::Progression generate_candidate_single(const CandidateRequest& request, LLMProvider& provider);

}  // namespace chordseed::llmgate
